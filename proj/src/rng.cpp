#include "symprox/rng.hpp"

#include <algorithm>
#include <numeric>

namespace symprox {

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Fisher-Yates; std::shuffle output differs between standard libraries.
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(eng_() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

std::vector<std::size_t> Rng::subsample(std::size_t n, std::size_t k) {
  if (k >= n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  auto perm = permutation(n);
  perm.resize(k);
  std::sort(perm.begin(), perm.end());
  return perm;
}

}  // namespace symprox
