#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace mockcheck {

// Dense row-major tensor of doubles.  The engine only ever needs rank 1 and
// rank 2; higher ranks are stored flat with an explicit shape.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0);

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Tensor from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return values.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  // Elements per row, i.e. the product of the trailing dimensions.
  std::size_t cols() const;

  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

std::size_t shape_product(const std::vector<std::size_t>& dims);

// Deterministic random source.  Uses mt19937_64 with explicit uniform and
// Box-Muller transforms so streams are identical across standard libraries
// (std::normal_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; generates pairs, caches the spare.
  double normal();

  // Uniform integer in [0, n).  Rejection-sampled to avoid modulo bias.
  std::size_t below(std::size_t n);

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::swap(v[i], v[below(i + 1)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mockcheck
