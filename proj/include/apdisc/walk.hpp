#pragma once

// Colorings: the Gram-Schmidt walk on a right factor, a random baseline and
// exhaustive optima for tiny instances.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

#include "apdisc/core.hpp"
#include "apdisc/gamma2.hpp"

namespace apdisc {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Counter-based 64-bit generator (SplitMix64 finalizer over a Weyl sequence).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

struct WalkStep {
  Index pivot = -1;
  double delta_plus = 0;
  double delta_minus = 0;
  double prob_plus = 0;
  double delta = 0;
  Index alive = 0;
};

struct WalkOptions {
  bool record_trace = false;
};

struct WalkResult {
  Eigen::VectorXi x;
  std::vector<WalkStep> trace;
  Index steps = 0;
  Index refreshes = 0;
  bool used_fallback = false;
};

/// Gram-Schmidt walk on the columns of R (each of norm <= 1).
WalkResult gs_walk(const Eigen::MatrixXd& R, std::uint64_t seed, const WalkOptions& options = {});
WalkResult gs_walk(const ColSparse& R, std::uint64_t seed, const WalkOptions& options = {});
/// Same walk from the Gram matrix G = R^T R.
WalkResult gs_walk_gram(const Eigen::MatrixXd& gram, std::uint64_t seed, const WalkOptions& options = {});

struct ColoringReport {
  Coloring coloring;
  std::int64_t disc = 0;
  /// sqrt(ln 2m) * certificate value.
  double scale = 0;
  double ratio = 0;
};

/// Walk on R / ||R||_{1->2}; disc evaluated exactly on the target family.
ColoringReport gamma2_coloring(const SetSystem& family, const FactorizationCertificate& cert, std::uint64_t seed);
/// Same with an external disc evaluator for families too large to materialize.
ColoringReport gamma2_coloring(const FactorizationCertificate& cert, Index num_sets,
                               const std::function<std::int64_t(const Coloring&)>& disc, std::uint64_t seed);

Coloring random_coloring(Index n, std::uint64_t seed);

struct BruteForceResult {
  std::int64_t min_disc = 0;
  Coloring witness;
  std::uint64_t evaluated = 0;
};

BruteForceResult brute_force_min_disc(const SetSystem& family, int max_n = 26);
BruteForceResult brute_force_min_pdisc(const SetSystem& family, const OrderingSigma& sigma, int max_n = 22);

}  // namespace apdisc
