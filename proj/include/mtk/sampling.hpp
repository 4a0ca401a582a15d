#pragma once

// Deterministic sampling: seeded point clouds in a box with an optional
// exclusion expression, plus generators for random polynomial scalar/vector
// fields and random orthogonal matrices. All randomness flows through Rng,
// whose output is fully specified (no implementation-defined distributions),
// so seeded runs are byte-identical across platforms.

#include "mtk/chart.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>

namespace mtk {

/// mt19937_64 with explicit mappings to doubles and ranges.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer in [lo, hi] inclusive.
  int integer(int lo, int hi) {
    const int span = hi - lo + 1;
    int k = static_cast<int>(unit() * span);
    if (k >= span) k = span - 1;
    return lo + k;
  }
  /// Standard normal via Box-Muller (deterministic, unlike
  /// std::normal_distribution).
  double gaussian();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct SamplingPlan {
  std::vector<std::array<double, 2>> box;  // per-coordinate [lo, hi]
  int count = 100;
  std::uint64_t seed = 42;
  /// A candidate point is excluded iff this evaluates > 0 there (or fails to
  /// evaluate). Encode regions as signed expressions, e.g. the disk of
  /// radius 0.1 as "0.01 - (x^2 + y^2)".
  std::optional<Expr> exclude;
};

/// Deterministic uniform samples in the box, resampling excluded points up
/// to count*100 candidate draws. Throws when the cap is exhausted (exclusion
/// region too large) or the plan is malformed.
std::vector<Vec> sample_points(const SamplingPlan& plan);

/// Random polynomial of total degree <= 2 with coefficients in [-1, 1]:
/// c0 + sum c_i x_i + sum_{i<=j} c_ij x_i x_j.
Expr random_polynomial(Rng& rng, const Chart& chart);

/// Vector field with random_polynomial components.
VectorField random_polynomial_field(Rng& rng, const Chart& chart);

/// (1,1) tensor field with random_polynomial entries.
TensorField11 random_polynomial_tensor(Rng& rng, const Chart& chart);

/// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the R
/// diagonal sign fixed.
Mat random_orthogonal(Rng& rng, int n);

}  // namespace mtk
