#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace symprox {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream `stream` of the root seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }
  std::vector<double> normals(std::size_t n) {
    std::vector<double> z(n);
    for (auto& v : z) v = normal();
    return z;
  }
  std::mt19937_64& engine() { return eng_; }

  // Uniform random permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);
  // k distinct indices from 0..n-1 in increasing order.
  std::vector<std::size_t> subsample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace symprox
