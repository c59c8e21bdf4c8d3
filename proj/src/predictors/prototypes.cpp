#include "recourse/predictors/prototypes.hpp"

#include <algorithm>
#include <numeric>

#include "recourse/error.hpp"

namespace recourse {

PrototypeSet compute_prototypes(const AutoencoderModel& ae, const Dataset& data, int target_class, std::size_t k) {
  if (k == 0) throw SpecError("compute_prototypes: k must be positive");
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] == target_class) members.push_back(i);
  }
  if (members.empty()) throw SpecError("compute_prototypes: no rows of class " + std::to_string(target_class));

  Matrix rows(members.size(), data.width());
  for (std::size_t m = 0; m < members.size(); ++m) {
    std::copy_n(data.rows.row(members[m]).begin(), data.width(), rows.row(m).begin());
  }
  const Matrix z = encode(ae, rows);

  std::vector<std::size_t> order(z.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = z.row(a);
    const auto rb = z.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  PrototypeSet out{target_class, k, Matrix(z.rows(), z.cols())};
  for (std::size_t m = 0; m < order.size(); ++m) std::copy_n(z.row(order[m]).begin(), z.cols(), out.encodings.row(m).begin());
  return out;
}

Vector prototype_near(const PrototypeSet& protos, std::span<const double> latent) {
  return prototype_near(protos, latent, protos.k);
}

Vector prototype_near(const PrototypeSet& protos, std::span<const double> latent, std::size_t k_requested) {
  if (k_requested == 0) throw SpecError("prototype_near: k must be positive");
  const Matrix& enc = protos.encodings;
  if (enc.rows() == 0) throw SpecError("prototype_near: empty prototype set");
  if (latent.size() != enc.cols()) throw SpecError("prototype_near: latent width mismatch");

  std::vector<std::pair<double, std::size_t>> dist(enc.rows());
  for (std::size_t m = 0; m < enc.rows(); ++m) {
    double d = 0.0;
    const auto r = enc.row(m);
    for (std::size_t j = 0; j < r.size(); ++j) d += (r[j] - latent[j]) * (r[j] - latent[j]);
    dist[m] = {d, m};
  }
  const std::size_t k = std::min(k_requested, enc.rows());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  // sum in canonical order so the result is independent of how ties resolved above
  std::vector<std::size_t> chosen(k);
  for (std::size_t i = 0; i < k; ++i) chosen[i] = dist[i].second;
  std::sort(chosen.begin(), chosen.end());
  Vector mean(enc.cols(), 0.0);
  for (std::size_t m : chosen) {
    const auto r = enc.row(m);
    for (std::size_t j = 0; j < r.size(); ++j) mean[j] += r[j];
  }
  for (double& v : mean) v /= static_cast<double>(k);
  return mean;
}

Vector prototype_for(const PrototypeSet& protos, const AutoencoderModel& ae, std::span<const double> x,
                     int target_class) {
  if (target_class != protos.target_class) throw SpecError("prototype_for: no prototypes for requested class");
  return prototype_near(protos, encode(ae, x));
}

}  // namespace recourse
