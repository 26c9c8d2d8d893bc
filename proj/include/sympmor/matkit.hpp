#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "sympmor/types.hpp"

namespace sympmor::matkit {

// ---------------------------------------------------------------------------
// Seeded randomness.
//
// All randomness in the library flows from a single 64-bit seed through a
// counter-based generator: sample i of a stream is a pure function of
// (seed, i), so matrices fill identically regardless of evaluation order and
// experiments are bit-reproducible.
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer (Steele/Lea/Vigna); bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

/// Derives the seed of an independent child stream.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::uint64_t stream) noexcept {
  constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;
  return mix64(mix64(seed + golden) ^ (golden * (stream + 1)));
}

/// Counter-based uniform/normal generator.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept {
    constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;
    return mix64(seed_ + golden * (counter + 1));
  }

  /// Uniform double in [0, 1).
  double uniform01(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_open01(std::uint64_t counter) const noexcept {
    return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes counters 2i and 2i+1.
  double normal(std::uint64_t i) const noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform_open01(2 * i)));
    return r * std::cos(2.0 * std::numbers::pi * uniform01(2 * i + 1));
  }

  /// Standard complex normal (unit total variance).
  Complex complex_normal(std::uint64_t i) const noexcept {
    const double r = std::sqrt(-std::log(uniform_open01(2 * i)));
    const double phi = 2.0 * std::numbers::pi * uniform01(2 * i + 1);
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  /// Uniform integer in [0, bound); bound >= 1.
  std::uint64_t uniform_index(std::uint64_t counter,
                              std::uint64_t bound) const noexcept {
    return static_cast<std::uint64_t>(uniform01(counter) *
                                      static_cast<double>(bound));
  }

 private:
  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Canonical Poisson structure.
// ---------------------------------------------------------------------------

/// J_2N = [0 I; -I 0], represented by its half dimension only.
struct PoissonStructure {
  Index half_dim = 0;
};

/// Applies J_2N to a 2N x c block by row-block swap and negation; never
/// materializes J.
RealMatrix poisson_apply(const PoissonStructure& J,
                         const Eigen::Ref<const RealMatrix>& M);

// ---------------------------------------------------------------------------
// Orthonormalization and truncated SVD.
// ---------------------------------------------------------------------------

/// Orthonormal basis of range(M) via column-pivoted QR. Returns fewer columns
/// than M only when the numerical rank of M is below cols(M); the all-zero
/// matrix yields a zero-column result.
RealMatrix orthonormalize(const Eigen::Ref<const RealMatrix>& M);
ComplexMatrix orthonormalize(const Eigen::Ref<const ComplexMatrix>& M);

template <typename Scalar>
struct TruncatedSvd {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> U;
  RealVector singular_values;  // descending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> V;
};

TruncatedSvd<double> truncated_svd(const Eigen::Ref<const RealMatrix>& M,
                                   Index k);
TruncatedSvd<Complex> truncated_svd(const Eigen::Ref<const ComplexMatrix>& M,
                                    Index k);

// ---------------------------------------------------------------------------
// Sketching.
// ---------------------------------------------------------------------------

enum class SketchKind { kGaussian, kSrft };

struct SketchSpec {
  Index target_rank = 1;
  Index oversampling = 0;
  int power_iterations = 0;
  SketchKind kind = SketchKind::kGaussian;
  std::uint64_t seed = 0;

  Index width() const { return target_rank + oversampling; }
};

/// Dense matrix of i.i.d. standard normal entries, deterministic in the seed.
RealMatrix gaussian_test_matrix(Index rows, Index cols, std::uint64_t seed);

/// Complex counterpart with i.i.d. standard complex normal entries.
ComplexMatrix complex_gaussian_test_matrix(Index rows, Index cols,
                                           std::uint64_t seed);

/// Subsampled random Fourier transform test matrix
///   Omega = sqrt(rows/cols) * D * F * R,
/// D a random unit-modulus diagonal, F the unitary DFT of size `rows`, R a
/// restriction to `cols` distinct uniformly sampled columns. Scaled so that
/// E[Omega* Omega] = I.
ComplexMatrix srft_test_matrix(Index rows, Index cols, std::uint64_t seed);

/// Randomized range finder: Q = orth(B (B*B)^q Omega) with k+p columns.
/// For rank(B) <= k the projection error ||B - QQ*B||_F is at machine level.
RealMatrix randomized_range(const Eigen::Ref<const RealMatrix>& B,
                            const SketchSpec& spec);
ComplexMatrix randomized_range(const Eigen::Ref<const ComplexMatrix>& B,
                               const SketchSpec& spec);

// ---------------------------------------------------------------------------
// Real Schur form of skew-symmetric matrices.
// ---------------------------------------------------------------------------

/// Relative threshold on sigma^2 deciding the numerical rank of the form.
inline constexpr double kSkewRankThreshold = 1e-12;

/// K = U T U^T with T = blkdiag([0 s1^2; -s1^2 0], ..., [0 sp^2; -sp^2 0], 0)
/// and s1^2 >= ... >= sp^2 > 0.
struct SkewSchurResult {
  RealMatrix U;
  RealMatrix T;
  RealVector sigma_squares;

  Index symplectic_rank() const { return sigma_squares.size(); }
};

/// Canonically ordered real Schur form of a skew-symmetric matrix. The input
/// is symmetrized as (K - K^T)/2 and must be skew within 1e-8 relative.
/// Blocks are sorted by descending sigma^2, signs normalized so the
/// (2i-1, 2i) entry is +sigma_i^2, and blocks with
/// sigma_i^2 <= kSkewRankThreshold * sigma_1^2 are folded into the zero part.
SkewSchurResult real_schur_skew(const Eigen::Ref<const RealMatrix>& K);

}  // namespace sympmor::matkit
