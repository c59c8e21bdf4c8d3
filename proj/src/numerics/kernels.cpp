#include "recourse/numerics/kernels.hpp"

#include <cmath>

#include "recourse/error.hpp"

#if defined(RECOURSE_HAVE_OPENMP)
#include <omp.h>
#endif

namespace recourse::kernels {

bool openmp_enabled() noexcept {
#if defined(RECOURSE_HAVE_OPENMP)
  return true;
#else
  return false;
#endif
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void check_affine(const Matrix& x, const Matrix& w, std::span<const double> b) {
  if (x.cols() != w.cols() || b.size() != w.rows()) {
    throw SpecError("affine_forward: shape mismatch");
  }
}

inline double activation_value(Activation act, double z) noexcept {
  switch (act) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::sigmoid: return sigmoid(z);
    case Activation::tanh: return std::tanh(z);
    case Activation::linear: return z;
  }
  return z;
}

inline double activation_slope(Activation act, double z, double a) noexcept {
  switch (act) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return a * (1.0 - a);
    case Activation::tanh: return 1.0 - a * a;
    case Activation::linear: return 1.0;
  }
  return 1.0;
}

// Row kernels shared by both implementations so the arithmetic is literally
// the same code.
inline void affine_row(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& z,
                       std::size_t n) {
  const auto xr = x.row(n);
  auto zr = z.row(n);
  for (std::size_t o = 0; o < w.rows(); ++o) {
    const auto wr = w.row(o);
    double acc = b[o];
    for (std::size_t i = 0; i < xr.size(); ++i) acc += xr[i] * wr[i];
    zr[o] = acc;
  }
}

inline void weight_grad_row(const Matrix& dz, const Matrix& x, Matrix& dw, std::span<double> db,
                            std::size_t o) {
  auto dwr = dw.row(o);
  std::fill(dwr.begin(), dwr.end(), 0.0);
  double bias_acc = 0.0;
  for (std::size_t n = 0; n < dz.rows(); ++n) {
    const double g = dz(n, o);
    bias_acc += g;
    if (g == 0.0) continue;
    const auto xr = x.row(n);
    for (std::size_t i = 0; i < xr.size(); ++i) dwr[i] += g * xr[i];
  }
  db[o] = bias_acc;
}

inline void input_grad_row(const Matrix& dz, const Matrix& w, Matrix& dx, std::size_t n) {
  auto dxr = dx.row(n);
  std::fill(dxr.begin(), dxr.end(), 0.0);
  const auto dzr = dz.row(n);
  for (std::size_t o = 0; o < w.rows(); ++o) {
    const double g = dzr[o];
    if (g == 0.0) continue;
    const auto wr = w.row(o);
    for (std::size_t i = 0; i < dxr.size(); ++i) dxr[i] += g * wr[i];
  }
}

}  // namespace

namespace serial {

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& z) {
  check_affine(x, w, b);
  if (z.rows() != x.rows() || z.cols() != w.rows()) z.resize(x.rows(), w.rows());
  for (std::size_t n = 0; n < x.rows(); ++n) affine_row(x, w, b, z, n);
}

void weight_grad(const Matrix& dz, const Matrix& x, Matrix& dw, std::span<double> db) {
  if (dz.rows() != x.rows() || db.size() != dz.cols()) throw SpecError("weight_grad: shape mismatch");
  if (dw.rows() != dz.cols() || dw.cols() != x.cols()) dw.resize(dz.cols(), x.cols());
  for (std::size_t o = 0; o < dz.cols(); ++o) weight_grad_row(dz, x, dw, db, o);
}

void input_grad(const Matrix& dz, const Matrix& w, Matrix& dx) {
  if (dz.cols() != w.rows()) throw SpecError("input_grad: shape mismatch");
  if (dx.rows() != dz.rows() || dx.cols() != w.cols()) dx.resize(dz.rows(), w.cols());
  for (std::size_t n = 0; n < dz.rows(); ++n) input_grad_row(dz, w, dx, n);
}

void activate(Activation act, const Matrix& z, Matrix& a) {
  if (a.rows() != z.rows() || a.cols() != z.cols()) a.resize(z.rows(), z.cols());
  const auto zs = z.values();
  auto as = a.values();
  for (std::size_t k = 0; k < zs.size(); ++k) as[k] = activation_value(act, zs[k]);
}

void activate_backward(Activation act, const Matrix& z, const Matrix& a, const Matrix& da,
                       Matrix& dz) {
  if (dz.rows() != z.rows() || dz.cols() != z.cols()) dz.resize(z.rows(), z.cols());
  const auto zs = z.values();
  const auto as = a.values();
  const auto das = da.values();
  auto dzs = dz.values();
  for (std::size_t k = 0; k < zs.size(); ++k) dzs[k] = das[k] * activation_slope(act, zs[k], as[k]);
}

}  // namespace serial

namespace omp {

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& z) {
  check_affine(x, w, b);
  if (z.rows() != x.rows() || z.cols() != w.rows()) z.resize(x.rows(), w.rows());
  const auto rows = static_cast<long long>(x.rows());
#pragma omp parallel for schedule(static)
  for (long long n = 0; n < rows; ++n) affine_row(x, w, b, z, static_cast<std::size_t>(n));
}

void weight_grad(const Matrix& dz, const Matrix& x, Matrix& dw, std::span<double> db) {
  if (dz.rows() != x.rows() || db.size() != dz.cols()) throw SpecError("weight_grad: shape mismatch");
  if (dw.rows() != dz.cols() || dw.cols() != x.cols()) dw.resize(dz.cols(), x.cols());
  const auto outs = static_cast<long long>(dz.cols());
#pragma omp parallel for schedule(static)
  for (long long o = 0; o < outs; ++o) weight_grad_row(dz, x, dw, db, static_cast<std::size_t>(o));
}

void input_grad(const Matrix& dz, const Matrix& w, Matrix& dx) {
  if (dz.cols() != w.rows()) throw SpecError("input_grad: shape mismatch");
  if (dx.rows() != dz.rows() || dx.cols() != w.cols()) dx.resize(dz.rows(), w.cols());
  const auto rows = static_cast<long long>(dz.rows());
#pragma omp parallel for schedule(static)
  for (long long n = 0; n < rows; ++n) input_grad_row(dz, w, dx, static_cast<std::size_t>(n));
}

void activate(Activation act, const Matrix& z, Matrix& a) {
  if (a.rows() != z.rows() || a.cols() != z.cols()) a.resize(z.rows(), z.cols());
  const auto zs = z.values();
  auto as = a.values();
  const auto count = static_cast<long long>(zs.size());
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < count; ++k) as[k] = activation_value(act, zs[k]);
}

void activate_backward(Activation act, const Matrix& z, const Matrix& a, const Matrix& da,
                       Matrix& dz) {
  if (dz.rows() != z.rows() || dz.cols() != z.cols()) dz.resize(z.rows(), z.cols());
  const auto zs = z.values();
  const auto as = a.values();
  const auto das = da.values();
  auto dzs = dz.values();
  const auto count = static_cast<long long>(zs.size());
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < count; ++k) dzs[k] = das[k] * activation_slope(act, zs[k], as[k]);
}

}  // namespace omp

namespace {
inline bool go_parallel(std::size_t work) {
#if defined(RECOURSE_HAVE_OPENMP)
  return work >= kParallelWork && omp_get_max_threads() > 1;
#else
  (void)work;
  return false;
#endif
}
}  // namespace

void affine_forward(const Matrix& x, const Matrix& w, std::span<const double> b, Matrix& z) {
  if (go_parallel(x.rows() * w.size())) return omp::affine_forward(x, w, b, z);
  serial::affine_forward(x, w, b, z);
}

void weight_grad(const Matrix& dz, const Matrix& x, Matrix& dw, std::span<double> db) {
  if (go_parallel(dz.size() * x.cols())) return omp::weight_grad(dz, x, dw, db);
  serial::weight_grad(dz, x, dw, db);
}

void input_grad(const Matrix& dz, const Matrix& w, Matrix& dx) {
  if (go_parallel(dz.rows() * w.size())) return omp::input_grad(dz, w, dx);
  serial::input_grad(dz, w, dx);
}

// Elementwise work is cheap; only very large batches are worth the fork.
void activate(Activation act, const Matrix& z, Matrix& a) {
  if (go_parallel(z.size() * 4)) return omp::activate(act, z, a);
  serial::activate(act, z, a);
}

void activate_backward(Activation act, const Matrix& z, const Matrix& a, const Matrix& da,
                       Matrix& dz) {
  if (go_parallel(z.size() * 4)) return omp::activate_backward(act, z, a, da, dz);
  serial::activate_backward(act, z, a, da, dz);
}

}  // namespace recourse::kernels
