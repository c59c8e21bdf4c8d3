#include "recourse/numerics/loss.hpp"

#include <algorithm>
#include <cmath>

#include "recourse/error.hpp"

namespace recourse {

namespace {
void check_shapes(const Matrix& pred, const Matrix& target, const char* who) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols() || pred.empty()) {
    throw SpecError(std::string(who) + ": shape mismatch");
  }
}
}  // namespace

LossResult bce_loss(const Matrix& pred, const Matrix& target) {
  check_shapes(pred, target, "bce_loss");
  LossResult out{0.0, Matrix(pred.rows(), pred.cols())};
  const double n = static_cast<double>(pred.size());
  const auto p = pred.values();
  const auto t = target.values();
  auto g = out.grad.values();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double q = std::clamp(p[k], kProbabilityClamp, 1.0 - kProbabilityClamp);
    out.loss -= t[k] * std::log(q) + (1.0 - t[k]) * std::log(1.0 - q);
    g[k] = (q - t[k]) / (q * (1.0 - q)) / n;
  }
  out.loss /= n;
  if (!std::isfinite(out.loss)) throw NumericError("bce_loss: non-finite loss");
  return out;
}

LossResult mse_loss(const Matrix& pred, const Matrix& target) {
  check_shapes(pred, target, "mse_loss");
  LossResult out{0.0, Matrix(pred.rows(), pred.cols())};
  const double n = static_cast<double>(pred.size());
  const auto p = pred.values();
  const auto t = target.values();
  auto g = out.grad.values();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = p[k] - t[k];
    out.loss += d * d;
    g[k] = 2.0 * d / n;
  }
  out.loss /= n;
  if (!std::isfinite(out.loss)) throw NumericError("mse_loss: non-finite loss");
  return out;
}

}  // namespace recourse
