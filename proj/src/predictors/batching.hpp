#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "recourse/numerics/matrix.hpp"
#include "recourse/numerics/rand.hpp"

namespace recourse::detail {

inline Matrix gather_rows(const Matrix& src, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), src.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) std::copy_n(src.row(idx[k]).begin(), src.cols(), out.row(k).begin());
  return out;
}

// Calls fn(batch_indices) for each minibatch of a fresh permutation.
template <class Fn>
void for_each_minibatch(std::size_t n, std::size_t batch_size, Rand& rng, Fn&& fn) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t len = std::min(batch_size, n - start);
    fn(std::span<const std::size_t>(order.data() + start, len));
  }
}

}  // namespace recourse::detail
