#include "sympmor/sympbasis.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

namespace sympmor::sympbasis {

namespace {

constexpr std::uint64_t kPartialIterationSeed = 0x5EED;
constexpr int kPartialMaxIterations = 2000;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(MethodTag tag) {
  switch (tag) {
    case MethodTag::kCsvdFull: return "cSVDFull";
    case MethodTag::kCsvdPartial: return "cSVDPartial";
    case MethodTag::kCsvdEig: return "cSVDEig";
    case MethodTag::kRcsvd: return "rcSVD";
    case MethodTag::kSvdLike: return "SVDLike";
    case MethodTag::kRsvdLikeK: return "rSVDLikeK";
    case MethodTag::kRsvdLikeXs: return "rSVDLikeXs";
    case MethodTag::kRsvdLikeKXs: return "rSVDLikeKXs";
  }
  throw ValidationError("unknown method tag");
}

MethodTag method_tag_from_string(const std::string& name) {
  static constexpr std::array<MethodTag, 8> all = {
      MethodTag::kCsvdFull,   MethodTag::kCsvdPartial, MethodTag::kCsvdEig,
      MethodTag::kRcsvd,      MethodTag::kSvdLike,     MethodTag::kRsvdLikeK,
      MethodTag::kRsvdLikeXs, MethodTag::kRsvdLikeKXs};
  for (const MethodTag tag : all) {
    if (to_string(tag) == name) return tag;
  }
  throw ValidationError("unknown method tag: " + name);
}

bool is_randomized(MethodTag tag) {
  return tag == MethodTag::kRcsvd || is_rsvd_like(tag);
}

bool is_csvd_family(MethodTag tag) {
  return tag == MethodTag::kCsvdFull || tag == MethodTag::kCsvdPartial ||
         tag == MethodTag::kCsvdEig || tag == MethodTag::kRcsvd;
}

bool is_rsvd_like(MethodTag tag) {
  return tag == MethodTag::kRsvdLikeK || tag == MethodTag::kRsvdLikeXs ||
         tag == MethodTag::kRsvdLikeKXs;
}

double symplectic_defect(const Eigen::Ref<const RealMatrix>& V) {
  if (V.rows() % 2 != 0 || V.cols() % 2 != 0 || V.rows() == 0 || V.cols() == 0) {
    throw ValidationError("symplectic_defect: matrix must be 2N x 2k");
  }
  const matkit::PoissonStructure J{V.rows() / 2};
  RealMatrix G = V.transpose() * matkit::poisson_apply(J, V);
  const Index k = V.cols() / 2;
  for (Index i = 0; i < k; ++i) {
    G(i, k + i) -= 1.0;
    G(k + i, i) += 1.0;
  }
  return G.norm();
}

double defect_tolerance(MethodTag tag, Index half_rank) {
  const double k = static_cast<double>(half_rank);
  return is_rsvd_like(tag) ? 1e-6 * k : 1e-8 * k;
}

SymplecticBasis::SymplecticBasis(RealMatrix V, MethodTag tag,
                                 std::optional<matkit::SketchSpec> sketch)
    : V_(std::move(V)), tag_(tag), sketch_(std::move(sketch)) {
  if (V_.rows() % 2 != 0 || V_.cols() % 2 != 0 || V_.rows() == 0 ||
      V_.cols() == 0) {
    throw ValidationError("SymplecticBasis: matrix must be 2N x 2k");
  }
  if (!V_.allFinite()) {
    throw ValidationError("SymplecticBasis: matrix has NaN/Inf entries");
  }
  defect_ = symplectic_defect(V_);
  const double tol = defect_tolerance(tag_, half_rank());
  if (defect_ > tol) {
    throw NumericalError("SymplecticBasis(" + to_string(tag_) +
                         "): symplecticity defect " + format_double(defect_) +
                         " above tolerance " + format_double(tol));
  }
  const matkit::PoissonStructure JN{half_dim()};
  const matkit::PoissonStructure Jk{half_rank()};
  inverse_ =
      matkit::poisson_apply(Jk, matkit::poisson_apply(JN, V_).transpose());
}

ComplexMatrix complexify(const Eigen::Ref<const RealMatrix>& Xs) {
  if (Xs.rows() % 2 != 0 || Xs.rows() == 0) {
    throw ValidationError("complexify: row count must be even");
  }
  const Index N = Xs.rows() / 2;
  ComplexMatrix Xc(N, Xs.cols());
  Xc.real() = Xs.topRows(N);
  Xc.imag() = Xs.bottomRows(N);
  return Xc;
}

namespace {

RealMatrix embed_matrix(const Eigen::Ref<const ComplexMatrix>& U_C) {
  const Index N = U_C.rows();
  const Index k = U_C.cols();
  if (N < 1 || k < 1) {
    throw ValidationError("embed_complex_basis: empty input");
  }
  const double ortho_defect =
      (U_C.adjoint() * U_C - ComplexMatrix::Identity(k, k)).norm();
  if (!(ortho_defect <= 1e-8)) {
    throw ValidationError(
        "embed_complex_basis: columns not orthonormal (defect " +
        format_double(ortho_defect) + ")");
  }
  RealMatrix V(2 * N, 2 * k);
  V.topLeftCorner(N, k) = U_C.real();
  V.topRightCorner(N, k) = -U_C.imag();
  V.bottomLeftCorner(N, k) = U_C.imag();
  V.bottomRightCorner(N, k) = U_C.real();
  return V;
}

}  // namespace

SymplecticBasis embed_complex_basis(const Eigen::Ref<const ComplexMatrix>& U_C,
                                    MethodTag tag) {
  return SymplecticBasis(embed_matrix(U_C), tag);
}

namespace {

// Leading k left singular vectors of Xc by blocked subspace iteration with
// Rayleigh-Ritz extraction, run on the smaller Gram side in matrix-free form.
// Returns the orthonormalized lifted vectors.
ComplexMatrix partial_left_singular_vectors(const ComplexMatrix& Xc, Index k) {
  const Index N = Xc.rows();
  const Index ns = Xc.cols();
  const bool column_side = ns <= N;  // iterate in C^{ns} on Xc* Xc
  const Index side = column_side ? ns : N;
  const Index buffer = std::max<Index>(10, k / 5);
  Index b = std::min(side, k + buffer);

  ComplexMatrix V = matkit::orthonormalize(
      matkit::complex_gaussian_test_matrix(side, b, kPartialIterationSeed));

  RealVector lambdas;
  ComplexMatrix ritz;
  bool converged = false;
  for (int iter = 0; iter < kPartialMaxIterations && !converged; ++iter) {
    ComplexMatrix GV;
    if (column_side) {
      GV = Xc.adjoint() * (Xc * V);
    } else {
      GV = Xc * (Xc.adjoint() * V);
    }
    ComplexMatrix H = V.adjoint() * GV;
    H = (0.5 * (H + H.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
    if (es.info() != Eigen::Success) {
      throw NumericalError("csvd_basis: Rayleigh-Ritz eigensolve failed");
    }
    const Index m = V.cols();
    // Ascending -> descending.
    ComplexMatrix Y(m, m);
    RealVector lam(m);
    for (Index j = 0; j < m; ++j) {
      Y.col(j) = es.eigenvectors().col(m - 1 - j);
      lam(j) = es.eigenvalues()(m - 1 - j);
    }
    const ComplexMatrix Z = V * Y;
    const ComplexMatrix GZ = GV * Y;
    const double scale = std::max(lam(0), 1e-300);
    converged = true;
    for (Index j = 0; j < k; ++j) {
      const double res = (GZ.col(j) - lam(j) * Z.col(j)).norm();
      if (res > 1e-12 * scale) {
        converged = false;
        break;
      }
    }
    lambdas = lam.head(k);
    ritz = Z.leftCols(k);
    if (!converged) {
      V = matkit::orthonormalize(GV);
      if (V.cols() < k) {
        throw NumericalError(
            "csvd_basis: numerical rank of the snapshot matrix fell below k");
      }
      b = V.cols();
    }
  }
  if (!converged) {
    throw NumericalError("csvd_basis: partial SVD iteration did not converge");
  }
  if (!(lambdas(k - 1) > 1e-14 * std::max(lambdas(0), 1e-300))) {
    throw NumericalError("csvd_basis: lambda_k is numerically zero");
  }
  ComplexMatrix U_C;
  if (column_side) {
    U_C = Xc * ritz;
    for (Index j = 0; j < k; ++j) {
      U_C.col(j) /= std::sqrt(lambdas(j));
    }
  } else {
    U_C = ritz;
  }
  // The lifted columns are orthonormal only up to the Ritz residuals; a thin
  // (unpivoted) QR restores machine-level orthonormality without changing the
  // span or the column order.
  Eigen::HouseholderQR<ComplexMatrix> qr(U_C);
  return qr.householderQ() * ComplexMatrix::Identity(U_C.rows(), k);
}

ComplexMatrix eig_left_singular_vectors(const ComplexMatrix& Xc, Index k) {
  const ComplexMatrix gram = Xc.adjoint() * Xc;  // n_s x n_s
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
  if (es.info() != Eigen::Success) {
    throw NumericalError("csvd_basis: Gram eigensolve failed");
  }
  const Index ns = gram.rows();
  const double lambda_max = std::max(es.eigenvalues()(ns - 1), 1e-300);
  if (!(es.eigenvalues()(ns - k) > 1e-14 * lambda_max)) {
    throw NumericalError("csvd_basis: lambda_k is numerically zero");
  }
  ComplexMatrix lifted(Xc.rows(), k);
  for (Index j = 0; j < k; ++j) {
    const double lambda = es.eigenvalues()(ns - 1 - j);
    lifted.col(j) = Xc * es.eigenvectors().col(ns - 1 - j) / std::sqrt(lambda);
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(lifted);
  return qr.householderQ() * ComplexMatrix::Identity(Xc.rows(), k);
}

}  // namespace

SymplecticBasis csvd_basis(const Eigen::Ref<const RealMatrix>& Xs, Index k,
                           CsvdVariant variant) {
  const ComplexMatrix Xc = complexify(Xs);
  if (k < 1 || k > std::min(Xc.rows(), Xc.cols())) {
    throw ValidationError("csvd_basis: k out of range");
  }
  switch (variant) {
    case CsvdVariant::kFull: {
      const auto svd = matkit::truncated_svd(Xc, k);
      return embed_complex_basis(svd.U, MethodTag::kCsvdFull);
    }
    case CsvdVariant::kPartial:
      return embed_complex_basis(partial_left_singular_vectors(Xc, k),
                                 MethodTag::kCsvdPartial);
    case CsvdVariant::kEig:
      return embed_complex_basis(eig_left_singular_vectors(Xc, k),
                                 MethodTag::kCsvdEig);
  }
  throw ValidationError("csvd_basis: unknown variant");
}

SymplecticBasis rcsvd_basis(const Eigen::Ref<const RealMatrix>& Xs, Index k,
                            const matkit::SketchSpec& spec) {
  const ComplexMatrix Xc = complexify(Xs);
  if (k < 1) {
    throw ValidationError("rcsvd_basis: k must be positive");
  }
  if (spec.oversampling < 0 || spec.power_iterations < 0) {
    throw ValidationError("rcsvd_basis: invalid sketch spec");
  }
  const Index width = k + spec.oversampling;
  if (width > std::min(Xc.rows(), Xc.cols())) {
    throw ValidationError("rcsvd_basis: k + p_ovs exceeds min(N, n_s)");
  }

  ComplexMatrix W = spec.kind == matkit::SketchKind::kSrft
                        ? matkit::srft_test_matrix(Xc.cols(), width, spec.seed)
                        : matkit::complex_gaussian_test_matrix(
                              Xc.cols(), width, spec.seed);
  for (int t = 0; t < spec.power_iterations; ++t) {
    W = (Xc.adjoint() * (Xc * W)).eval();
    if (spec.power_iterations > 2) {
      W = matkit::orthonormalize(W);
    }
  }
  const ComplexMatrix Y = Xc * W;

  Eigen::BDCSVD<ComplexMatrix> svd(Y, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Index achieved = 0;
  const double sv_max = std::max(sv(0), 1e-300);
  while (achieved < sv.size() && sv(achieved) > 1e-12 * sv_max) {
    ++achieved;
  }
  if (achieved < k) {
    throw RankDeficiencyError(
        "rcsvd_basis: sketch rank collapsed below k (achieved " +
            std::to_string(achieved) + "); increase p_ovs or q_pow",
        achieved);
  }
  matkit::SketchSpec used = spec;
  used.target_rank = k;
  return SymplecticBasis(embed_matrix(svd.matrixU().leftCols(k)),
                         MethodTag::kRcsvd, used);
}

RealMatrix poisson_gram(const Eigen::Ref<const RealMatrix>& Xs) {
  if (Xs.rows() % 2 != 0 || Xs.rows() == 0) {
    throw ValidationError("poisson_gram: row count must be even");
  }
  const matkit::PoissonStructure J{Xs.rows() / 2};
  return Xs.transpose() * matkit::poisson_apply(J, Xs);
}

namespace {

RealMatrix sketch_range_impl(SketchVariant variant,
                             const Eigen::Ref<const RealMatrix>& Xs,
                             const RealMatrix* K_pre, Index width, int q_pow,
                             std::uint64_t seed) {
  const Index ns = Xs.cols();
  if (width < 1) {
    throw ValidationError("compute_sketch_range: width must be positive");
  }
  if (width > ns) {
    throw ValidationError("compute_sketch_range: sketch width exceeds n_s");
  }
  if (q_pow < 0) {
    throw ValidationError("compute_sketch_range: q_pow must be nonnegative");
  }

  Index width_k = 0;
  Index width_x = 0;
  switch (variant) {
    case SketchVariant::kK: width_k = width; break;
    case SketchVariant::kXs: width_x = width; break;
    case SketchVariant::kKXs:
      width_k = (width + 1) / 2;
      width_x = width / 2;
      break;
  }

  RealMatrix Y(ns, width);
  if (width_k > 0) {
    RealMatrix K_local;
    if (K_pre == nullptr) {
      K_local = poisson_gram(Xs);
      K_pre = &K_local;
    }
    RealMatrix W =
        matkit::gaussian_test_matrix(ns, width_k, matkit::derive_seed(seed, 0));
    for (int t = 0; t < 2 * q_pow + 1; ++t) {
      W = ((*K_pre) * W).eval();
    }
    Y.leftCols(width_k) = W;
  }
  if (width_x > 0) {
    RealMatrix W = matkit::gaussian_test_matrix(Xs.rows(), width_x,
                                                matkit::derive_seed(seed, 1));
    for (int t = 0; t < q_pow; ++t) {
      W = (Xs * (Xs.transpose() * W)).eval();
    }
    Y.rightCols(width_x) = Xs.transpose() * W;
  }
  return matkit::orthonormalize(Y);
}

MethodTag tag_for(SketchVariant variant) {
  switch (variant) {
    case SketchVariant::kK: return MethodTag::kRsvdLikeK;
    case SketchVariant::kXs: return MethodTag::kRsvdLikeXs;
    case SketchVariant::kKXs: return MethodTag::kRsvdLikeKXs;
  }
  throw ValidationError("unknown sketch variant");
}

// Steps 5-7 shared by the classical and randomized paths: pick the first and
// second columns of each sigma-block of U, optionally lift them through the
// sketch basis, scale by 1/sigma and multiply by the snapshots.
std::pair<SymplecticBasis, SVDLikeFactors> assemble_svd_like(
    const Eigen::Ref<const RealMatrix>& Xs, const RealMatrix& U,
    const RealVector& sigma_squares, Index k, const RealMatrix* lift,
    MethodTag tag, std::optional<matkit::SketchSpec> sketch) {
  const Index p = sigma_squares.size();
  if (p < k) {
    std::string msg = "svd_like: symplectic rank " + std::to_string(p) +
                      " is below the requested k = " + std::to_string(k);
    if (lift != nullptr) {
      msg += "; increase p_ovs or q_pow";
    }
    throw RankDeficiencyError(msg, p);
  }
  RealVector sigmas = sigma_squares.array().sqrt();

  RealMatrix sel(U.rows(), 2 * k);
  for (Index j = 0; j < k; ++j) {
    sel.col(j) = U.col(2 * j);
    sel.col(k + j) = U.col(2 * j + 1);
  }
  RealMatrix p_cols = lift != nullptr ? RealMatrix((*lift) * sel) : sel;

  RealMatrix scaled = p_cols;
  for (Index j = 0; j < k; ++j) {
    scaled.col(j) /= sigmas(j);
    scaled.col(k + j) /= sigmas(j);
  }
  RealMatrix V = Xs * scaled;

  SVDLikeFactors factors;
  factors.sigmas = std::move(sigmas);
  factors.symplectic_rank = p;
  factors.P_cols = std::move(p_cols);
  return {SymplecticBasis(std::move(V), tag, std::move(sketch)),
          std::move(factors)};
}

}  // namespace

RealMatrix compute_sketch_range(SketchVariant variant,
                                const Eigen::Ref<const RealMatrix>& Xs,
                                Index target_cols, Index p_ovs, int q_pow,
                                std::uint64_t seed) {
  if (target_cols < 1 || p_ovs < 0) {
    throw ValidationError("compute_sketch_range: invalid width parameters");
  }
  return sketch_range_impl(variant, Xs, nullptr, target_cols + p_ovs, q_pow,
                           seed);
}

std::pair<SymplecticBasis, SVDLikeFactors> svd_like_basis(
    const Eigen::Ref<const RealMatrix>& Xs, Index k) {
  if (k < 1) {
    throw ValidationError("svd_like_basis: k must be positive");
  }
  const RealMatrix K = poisson_gram(Xs);
  const auto schur = matkit::real_schur_skew(K);
  return assemble_svd_like(Xs, schur.U, schur.sigma_squares, k, nullptr,
                           MethodTag::kSvdLike, std::nullopt);
}

std::pair<SymplecticBasis, SVDLikeFactors> rsvd_like_basis(
    const Eigen::Ref<const RealMatrix>& Xs, Index k, Index p_ovs, int q_pow,
    SketchVariant variant, std::uint64_t seed) {
  if (k < 1 || p_ovs < 0 || q_pow < 0) {
    throw ValidationError("rsvd_like_basis: invalid parameters");
  }
  const Index width = 2 * k + p_ovs;
  if (width > Xs.cols()) {
    throw ValidationError("rsvd_like_basis: sketch width 2k + p_ovs exceeds n_s");
  }
  const RealMatrix K = poisson_gram(Xs);
  const RealMatrix Q = sketch_range_impl(variant, Xs, &K, width, q_pow, seed);
  if (Q.cols() < 2 * k) {
    throw RankDeficiencyError(
        "rsvd_like_basis: sketch rank collapsed below 2k; increase p_ovs or q_pow",
        Q.cols() / 2);
  }
  const RealMatrix K_sketched = Q.transpose() * K * Q;
  const auto schur = matkit::real_schur_skew(K_sketched);

  matkit::SketchSpec spec;
  spec.target_rank = k;
  spec.oversampling = p_ovs;
  spec.power_iterations = q_pow;
  spec.kind = matkit::SketchKind::kGaussian;
  spec.seed = seed;
  return assemble_svd_like(Xs, schur.U, schur.sigma_squares, k, &Q,
                           tag_for(variant), spec);
}

RealMatrix symplectic_inverse_matrix(const Eigen::Ref<const RealMatrix>& V,
                                     std::optional<double> tolerance) {
  const double defect = symplectic_defect(V);
  const double tol =
      tolerance.value_or(1e-6 * static_cast<double>(V.cols() / 2));
  if (defect > tol) {
    throw NumericalError("symplectic_inverse: defect " + format_double(defect) +
                         " above tolerance " + format_double(tol));
  }
  const matkit::PoissonStructure JN{V.rows() / 2};
  const matkit::PoissonStructure Jk{V.cols() / 2};
  return matkit::poisson_apply(Jk, matkit::poisson_apply(JN, V).transpose());
}

const RealMatrix& symplectic_inverse(const SymplecticBasis& basis) {
  return basis.symplectic_inverse();
}

void save_basis(const SymplecticBasis& basis, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("save_basis: cannot open " + path);
  }
  const RealMatrix& V = basis.matrix();
  out << "sympmor-basis 1\n";
  out << V.rows() << ' ' << V.cols() << ' ' << basis.half_rank() << ' '
      << to_string(basis.method_tag()) << "\n";
  if (basis.sketch().has_value()) {
    const auto& s = *basis.sketch();
    out << "sketch " << s.target_rank << ' ' << s.oversampling << ' '
        << s.power_iterations << ' '
        << (s.kind == matkit::SketchKind::kSrft ? "srft" : "gaussian") << ' '
        << s.seed << "\n";
  } else {
    out << "sketch none\n";
  }
  for (Index i = 0; i < V.rows(); ++i) {
    for (Index j = 0; j < V.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(V(i, j));
    }
    out << "\n";
  }
  if (!out) {
    throw ValidationError("save_basis: write failed for " + path);
  }
}

SymplecticBasis load_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("load_basis: cannot open " + path);
  }
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "sympmor-basis" || version != 1) {
    throw ValidationError("load_basis: not a sympmor basis file: " + path);
  }
  Index rows = 0, cols = 0, half_rank = 0;
  std::string tag_name;
  in >> rows >> cols >> half_rank >> tag_name;
  if (!in || rows < 2 || cols < 2 || half_rank * 2 != cols) {
    throw ValidationError("load_basis: malformed header in " + path);
  }
  const MethodTag tag = method_tag_from_string(tag_name);

  std::string sketch_word, kind_word;
  in >> sketch_word;
  if (sketch_word != "sketch") {
    throw ValidationError("load_basis: malformed sketch line in " + path);
  }
  std::optional<matkit::SketchSpec> sketch;
  std::string first;
  in >> first;
  if (first != "none") {
    matkit::SketchSpec s;
    s.target_rank = std::stoll(first);
    in >> s.oversampling >> s.power_iterations >> kind_word >> s.seed;
    s.kind = kind_word == "srft" ? matkit::SketchKind::kSrft
                                 : matkit::SketchKind::kGaussian;
    sketch = s;
  }

  RealMatrix V(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      in >> V(i, j);
    }
  }
  if (!in) {
    throw ValidationError("load_basis: truncated matrix data in " + path);
  }
  return SymplecticBasis(std::move(V), tag, std::move(sketch));
}

}  // namespace sympmor::sympbasis
