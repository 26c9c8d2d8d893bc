#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "sympmor/matkit.hpp"

namespace sympmor::sympbasis {

enum class MethodTag {
  kCsvdFull,
  kCsvdPartial,
  kCsvdEig,
  kRcsvd,
  kSvdLike,
  kRsvdLikeK,
  kRsvdLikeXs,
  kRsvdLikeKXs,
};

std::string to_string(MethodTag tag);
MethodTag method_tag_from_string(const std::string& name);

/// Methods that consume a sketch seed.
bool is_randomized(MethodTag tag);
/// Methods whose bases are orthonormal in addition to symplectic.
bool is_csvd_family(MethodTag tag);
/// Randomized SVD-like methods carry the looser symplecticity tolerance.
bool is_rsvd_like(MethodTag tag);

enum class CsvdVariant { kFull, kPartial, kEig };
enum class SketchVariant { kK, kXs, kKXs };

/// ||V^T J V - J_2k||_F for a 2N x 2k matrix.
double symplectic_defect(const Eigen::Ref<const RealMatrix>& V);

/// Symplecticity tolerance for a method: 1e-8 k classically, 1e-6 k for the
/// randomized SVD-like family (sketching perturbs the Schur structure).
double defect_tolerance(MethodTag tag, Index half_rank);

/// Reduced order basis V in R^{2N x 2k} with V^T J_2N V = J_2k, plus the
/// cached symplectic inverse V+ = J_2k^T V^T J_2N.
class SymplecticBasis {
 public:
  SymplecticBasis(RealMatrix V, MethodTag tag,
                  std::optional<matkit::SketchSpec> sketch = std::nullopt);

  const RealMatrix& matrix() const { return V_; }
  Index half_dim() const { return V_.rows() / 2; }
  Index half_rank() const { return V_.cols() / 2; }
  MethodTag method_tag() const { return tag_; }
  const std::optional<matkit::SketchSpec>& sketch() const { return sketch_; }
  const RealMatrix& symplectic_inverse() const { return inverse_; }
  double defect() const { return defect_; }

 private:
  RealMatrix V_;
  RealMatrix inverse_;
  MethodTag tag_;
  std::optional<matkit::SketchSpec> sketch_;
  double defect_ = 0.0;
};

/// Xc = Xs(1:N, :) + i Xs(N+1:2N, :).
ComplexMatrix complexify(const Eigen::Ref<const RealMatrix>& Xs);

/// Maps a complex matrix with orthonormal columns to the real symplectic
/// (and orthonormal) matrix [Re U, -Im U; Im U, Re U].
SymplecticBasis embed_complex_basis(const Eigen::Ref<const ComplexMatrix>& U_C,
                                    MethodTag tag);

/// Classical complex-SVD basis; the three variants differ only in how the
/// leading k left singular vectors of Xc are computed.
SymplecticBasis csvd_basis(const Eigen::Ref<const RealMatrix>& Xs, Index k,
                           CsvdVariant variant);

/// Randomized complex SVD: U_C from the leading k left singular vectors of
/// the sketch Xc (Xc* Xc)^q Omega; deterministic in spec.seed.
SymplecticBasis rcsvd_basis(const Eigen::Ref<const RealMatrix>& Xs, Index k,
                            const matkit::SketchSpec& spec);

/// K = Xs^T J_2N Xs, formed by row-block swap (J is never materialized).
RealMatrix poisson_gram(const Eigen::Ref<const RealMatrix>& Xs);

/// Orthonormal range sketch for the randomized SVD-like method.
/// `target_cols` counts ROB columns (2k); the sketch has
/// target_cols + p_ovs columns. The KXs variant splits the width as
/// ceil/floor between the K-driven and Xs-driven blocks.
RealMatrix compute_sketch_range(SketchVariant variant,
                                const Eigen::Ref<const RealMatrix>& Xs,
                                Index target_cols, Index p_ovs, int q_pow,
                                std::uint64_t seed);

/// Symplectic singular values and the selected orthogonal-factor columns of
/// an (r)SVD-like factorization.
struct SVDLikeFactors {
  RealVector sigmas;        // descending, length p
  Index symplectic_rank;    // p
  RealMatrix P_cols;        // n_s x 2k columns used to build V
};

/// Classical SVD-like basis from the canonically ordered Schur form of K.
std::pair<SymplecticBasis, SVDLikeFactors> svd_like_basis(
    const Eigen::Ref<const RealMatrix>& Xs, Index k);

/// Randomized SVD-like basis: Schur form of Q^T K Q in the sketched
/// coordinates, permuted columns lifted back through Q.
std::pair<SymplecticBasis, SVDLikeFactors> rsvd_like_basis(
    const Eigen::Ref<const RealMatrix>& Xs, Index k, Index p_ovs, int q_pow,
    SketchVariant variant, std::uint64_t seed);

/// V+ = J_2k^T V^T J_2N, computed with poisson_apply only. Validates the
/// symplecticity defect against `tolerance` (defaults to the loose bound).
RealMatrix symplectic_inverse_matrix(const Eigen::Ref<const RealMatrix>& V,
                                     std::optional<double> tolerance = std::nullopt);

/// Cached symplectic inverse of a validated basis.
const RealMatrix& symplectic_inverse(const SymplecticBasis& basis);

/// Plain-text basis file with a small header (rows, cols, half rank, method
/// tag, sketch parameters); values round-trip exactly.
void save_basis(const SymplecticBasis& basis, const std::string& path);
SymplecticBasis load_basis(const std::string& path);

}  // namespace sympmor::sympbasis
