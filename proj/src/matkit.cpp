#include "sympmor/matkit.hpp"

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

namespace sympmor::matkit {

namespace {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& M, const char* op) {
  if (!M.allFinite()) {
    throw ValidationError(std::string(op) + ": input has NaN/Inf entries");
  }
}

template <typename MatrixType>
MatrixType orthonormalize_impl(const MatrixType& M, const char* op) {
  if (M.rows() < 1 || M.cols() < 1) {
    throw ValidationError(std::string(op) + ": empty input");
  }
  require_finite(M, op);
  Eigen::ColPivHouseholderQR<MatrixType> qr(M);
  const Index rank = qr.rank();
  if (rank == 0) {
    return MatrixType(M.rows(), 0);
  }
  MatrixType thin = MatrixType::Identity(M.rows(), rank);
  return qr.householderQ() * thin;
}

template <typename MatrixType>
TruncatedSvd<typename MatrixType::Scalar> truncated_svd_impl(
    const MatrixType& M, Index k) {
  if (k < 1 || k > std::min(M.rows(), M.cols())) {
    throw ValidationError("truncated_svd: k out of range");
  }
  require_finite(M, "truncated_svd");
  Eigen::BDCSVD<MatrixType> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd<typename MatrixType::Scalar> out;
  out.U = svd.matrixU().leftCols(k);
  out.singular_values = svd.singularValues().head(k);
  out.V = svd.matrixV().leftCols(k);
  return out;
}

// Right-to-left evaluation of B (B*B)^q Omega. Re-orthonormalizes the running
// block between powers when q > 2 to protect against underflow of the small
// singular directions.
template <typename MatrixType>
MatrixType power_sketch(const MatrixType& B, const MatrixType& Omega, int q) {
  MatrixType W = Omega;
  for (int t = 0; t < q; ++t) {
    W = (B.adjoint() * (B * W)).eval();
    if (q > 2) {
      W = orthonormalize_impl(W, "randomized_range");
    }
  }
  return B * W;
}

template <typename MatrixType>
MatrixType make_test_matrix(Index rows, Index cols, const SketchSpec& spec);

template <>
RealMatrix make_test_matrix<RealMatrix>(Index rows, Index cols,
                                        const SketchSpec& spec) {
  if (spec.kind == SketchKind::kSrft) {
    throw ValidationError("randomized_range: SRFT sketch requires a complex matrix");
  }
  return gaussian_test_matrix(rows, cols, spec.seed);
}

template <>
ComplexMatrix make_test_matrix<ComplexMatrix>(Index rows, Index cols,
                                              const SketchSpec& spec) {
  if (spec.kind == SketchKind::kSrft) {
    return srft_test_matrix(rows, cols, spec.seed);
  }
  return complex_gaussian_test_matrix(rows, cols, spec.seed);
}

template <typename MatrixType>
MatrixType randomized_range_impl(const MatrixType& B, const SketchSpec& spec) {
  if (spec.target_rank < 1 || spec.oversampling < 0 ||
      spec.power_iterations < 0) {
    throw ValidationError("randomized_range: invalid sketch spec");
  }
  const Index w = spec.width();
  if (w > std::min(B.rows(), B.cols())) {
    throw ValidationError("randomized_range: sketch width exceeds dimensions");
  }
  require_finite(B, "randomized_range");
  const MatrixType Omega = make_test_matrix<MatrixType>(B.cols(), w, spec);
  const MatrixType Y = power_sketch(B, Omega, spec.power_iterations);
  return orthonormalize_impl(Y, "randomized_range");
}

}  // namespace

RealMatrix poisson_apply(const PoissonStructure& J,
                         const Eigen::Ref<const RealMatrix>& M) {
  const Index n = J.half_dim;
  if (n < 1) {
    throw ValidationError("poisson_apply: half_dim must be positive");
  }
  if (M.rows() != 2 * n) {
    throw ValidationError("poisson_apply: row count does not equal 2N");
  }
  RealMatrix out(M.rows(), M.cols());
  out.topRows(n) = M.bottomRows(n);
  out.bottomRows(n) = -M.topRows(n);
  return out;
}

RealMatrix orthonormalize(const Eigen::Ref<const RealMatrix>& M) {
  return orthonormalize_impl<RealMatrix>(M, "orthonormalize");
}

ComplexMatrix orthonormalize(const Eigen::Ref<const ComplexMatrix>& M) {
  return orthonormalize_impl<ComplexMatrix>(M, "orthonormalize");
}

TruncatedSvd<double> truncated_svd(const Eigen::Ref<const RealMatrix>& M,
                                   Index k) {
  return truncated_svd_impl<RealMatrix>(M, k);
}

TruncatedSvd<Complex> truncated_svd(const Eigen::Ref<const ComplexMatrix>& M,
                                    Index k) {
  return truncated_svd_impl<ComplexMatrix>(M, k);
}

RealMatrix gaussian_test_matrix(Index rows, Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw ValidationError("gaussian_test_matrix: dimensions must be positive");
  }
  const CounterRng rng(seed);
  RealMatrix M(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      M(i, j) = rng.normal(static_cast<std::uint64_t>(j * rows + i));
    }
  }
  return M;
}

ComplexMatrix complex_gaussian_test_matrix(Index rows, Index cols,
                                           std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw ValidationError("gaussian_test_matrix: dimensions must be positive");
  }
  const CounterRng rng(seed);
  ComplexMatrix M(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      M(i, j) = rng.complex_normal(static_cast<std::uint64_t>(j * rows + i));
    }
  }
  return M;
}

ComplexMatrix srft_test_matrix(Index rows, Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw ValidationError("srft_test_matrix: dimensions must be positive");
  }
  if (cols > rows) {
    throw ValidationError("srft_test_matrix: cols must not exceed rows");
  }
  const auto l = static_cast<std::uint64_t>(rows);
  const CounterRng rng(seed);

  // Unit-modulus diagonal D, counters [0, l).
  ComplexVector d(rows);
  for (Index a = 0; a < rows; ++a) {
    const double phi =
        2.0 * std::numbers::pi * rng.uniform01(static_cast<std::uint64_t>(a));
    d(a) = Complex(std::cos(phi), std::sin(phi));
  }

  // Distinct column sample via partial Fisher-Yates, counters [l, l+cols).
  std::vector<Index> idx(static_cast<std::size_t>(rows));
  for (Index a = 0; a < rows; ++a) idx[static_cast<std::size_t>(a)] = a;
  for (Index t = 0; t < cols; ++t) {
    const std::uint64_t r = rng.uniform_index(
        l + static_cast<std::uint64_t>(t), l - static_cast<std::uint64_t>(t));
    std::swap(idx[static_cast<std::size_t>(t)],
              idx[static_cast<std::size_t>(t) + static_cast<std::size_t>(r)]);
  }

  const double scale = std::sqrt(static_cast<double>(rows) /
                                 static_cast<double>(cols)) /
                       std::sqrt(static_cast<double>(rows));
  ComplexMatrix Omega(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    const double freq = -2.0 * std::numbers::pi *
                        static_cast<double>(idx[static_cast<std::size_t>(c)]) /
                        static_cast<double>(rows);
    for (Index a = 0; a < rows; ++a) {
      const double ang = freq * static_cast<double>(a);
      Omega(a, c) = scale * d(a) * Complex(std::cos(ang), std::sin(ang));
    }
  }
  return Omega;
}

RealMatrix randomized_range(const Eigen::Ref<const RealMatrix>& B,
                            const SketchSpec& spec) {
  return randomized_range_impl<RealMatrix>(B, spec);
}

ComplexMatrix randomized_range(const Eigen::Ref<const ComplexMatrix>& B,
                               const SketchSpec& spec) {
  return randomized_range_impl<ComplexMatrix>(B, spec);
}

SkewSchurResult real_schur_skew(const Eigen::Ref<const RealMatrix>& K) {
  if (K.rows() != K.cols()) {
    throw ValidationError("real_schur_skew: matrix must be square");
  }
  require_finite(K, "real_schur_skew");
  const Index n = K.rows();
  const double norm_k = K.norm();
  if ((K + K.transpose()).norm() > 1e-8 * std::max(norm_k, 1e-300)) {
    throw ValidationError("real_schur_skew: input is not skew-symmetric");
  }
  const RealMatrix Ks = 0.5 * (K - K.transpose());

  SkewSchurResult out;
  if (norm_k == 0.0) {
    out.U = RealMatrix::Identity(n, n);
    out.T = RealMatrix::Zero(n, n);
    out.sigma_squares = RealVector(0);
    return out;
  }

  Eigen::RealSchur<RealMatrix> schur(Ks);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("real_schur_skew: Schur iteration failed");
  }
  const RealMatrix& T = schur.matrixT();
  const RealMatrix& U = schur.matrixU();

  // Scan the quasi-triangular diagonal: a nonzero subdiagonal entry marks a
  // 2x2 block carrying an eigenvalue pair +-i sigma^2.
  struct Block {
    double sigma_sq;
    Index col;   // first of the two columns in U
    bool swap;   // columns must swap to make the superdiagonal entry positive
  };
  std::vector<Block> blocks;
  std::vector<Index> zero_cols;
  Index i = 0;
  while (i < n) {
    if (i + 1 < n && T(i + 1, i) != 0.0) {
      const double b = T(i, i + 1);
      const double c = T(i + 1, i);
      const double sigma_sq = std::sqrt(std::abs(b * c));
      blocks.push_back({sigma_sq, i, b < 0.0});
      i += 2;
    } else {
      zero_cols.push_back(i);
      i += 1;
    }
  }

  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& a, const Block& b) {
                     return a.sigma_sq > b.sigma_sq;
                   });

  const double sigma_max = blocks.empty() ? 0.0 : blocks.front().sigma_sq;
  Index p = 0;
  while (p < static_cast<Index>(blocks.size()) &&
         blocks[static_cast<std::size_t>(p)].sigma_sq >
             kSkewRankThreshold * sigma_max) {
    ++p;
  }

  out.U = RealMatrix(n, n);
  out.T = RealMatrix::Zero(n, n);
  out.sigma_squares = RealVector(p);
  Index col = 0;
  for (Index j = 0; j < p; ++j) {
    const Block& blk = blocks[static_cast<std::size_t>(j)];
    const Index first = blk.swap ? blk.col + 1 : blk.col;
    const Index second = blk.swap ? blk.col : blk.col + 1;
    out.U.col(col) = U.col(first);
    out.U.col(col + 1) = U.col(second);
    out.T(col, col + 1) = blk.sigma_sq;
    out.T(col + 1, col) = -blk.sigma_sq;
    out.sigma_squares(j) = blk.sigma_sq;
    col += 2;
  }
  // Truncated blocks and 1x1 zero modes fill the trailing zero part.
  for (Index j = p; j < static_cast<Index>(blocks.size()); ++j) {
    const Block& blk = blocks[static_cast<std::size_t>(j)];
    out.U.col(col++) = U.col(blk.col);
    out.U.col(col++) = U.col(blk.col + 1);
  }
  for (const Index z : zero_cols) {
    out.U.col(col++) = U.col(z);
  }
  return out;
}

}  // namespace sympmor::matkit
