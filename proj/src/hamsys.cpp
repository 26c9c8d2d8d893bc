#include "sympmor/hamsys.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <vector>

#include <Eigen/SparseLU>

namespace sympmor::hamsys {

double bump(double s) {
  const double a = std::abs(s);
  if (a <= 1.0) {
    return 1.0 - 1.5 * a * a + 0.75 * a * a * a;
  }
  if (a <= 2.0) {
    const double r = 2.0 - a;
    return 0.25 * r * r * r;
  }
  return 0.0;
}

LinearHamiltonianSystem discretize_wave(const GridConfig& grid) {
  if (grid.n_x1 < 3 || grid.n_x2 < 3) {
    throw ValidationError("discretize_wave: grid must be at least 3x3");
  }
  const Index n1 = grid.n_x1;
  const Index n2 = grid.n_x2;
  const Index N = grid.point_count();
  const double w1 = 1.0 / (grid.dx1() * grid.dx1());
  const double w2 = 1.0 / (grid.dx2() * grid.dx2());

  // Stiffness = D11 + D22, the (positive definite) negated discrete Laplacian
  // on interior points, xi1-major with xi2 running fastest.
  auto stiffness = std::make_shared<SparseRealMatrix>(N, N);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(5 * N));
    for (Index i1 = 0; i1 < n1; ++i1) {
      for (Index i2 = 0; i2 < n2; ++i2) {
        const Index row = i1 * n2 + i2;
        trips.emplace_back(row, row, 2.0 * w1 + 2.0 * w2);
        if (i1 > 0) trips.emplace_back(row, row - n2, -w1);
        if (i1 + 1 < n1) trips.emplace_back(row, row + n2, -w1);
        if (i2 > 0) trips.emplace_back(row, row - 1, -w2);
        if (i2 + 1 < n2) trips.emplace_back(row, row + 1, -w2);
      }
    }
    stiffness->setFromTriplets(trips.begin(), trips.end());
    stiffness->makeCompressed();
  }

  RealVector u0(N);
  const double dx1 = grid.dx1();
  for (Index i1 = 0; i1 < n1; ++i1) {
    const double xi1 = static_cast<double>(i1 + 1) * dx1;
    const double value = bump(10.0 * (xi1 - 0.5));
    for (Index i2 = 0; i2 < n2; ++i2) {
      u0(i1 * n2 + i2) = value;
    }
  }

  auto op = [stiffness, N](double mu) {
    SparseRealMatrix A(2 * N, 2 * N);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(stiffness->nonZeros()) +
                  static_cast<std::size_t>(N));
    const double mu2 = mu * mu;
    for (Index col = 0; col < N; ++col) {
      for (SparseRealMatrix::InnerIterator it(*stiffness, col); it; ++it) {
        trips.emplace_back(it.row(), col, mu2 * it.value());
      }
    }
    for (Index i = 0; i < N; ++i) {
      trips.emplace_back(N + i, N + i, 1.0);
    }
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
  };
  auto init = [u0, N](double) {
    RealVector x0 = RealVector::Zero(2 * N);
    x0.head(N) = u0;
    return x0;
  };
  auto t_end = [](double mu) { return 2.0 / mu; };

  return LinearHamiltonianSystem(N, op, init, 0.0, t_end);
}

double hamiltonian(const LinearHamiltonianSystem& sys,
                   const Eigen::Ref<const RealVector>& x, double mu) {
  if (x.size() != sys.dim()) {
    throw ValidationError("hamiltonian: state dimension mismatch");
  }
  const SparseRealMatrix A = sys.operator_matrix(mu);
  return 0.5 * x.dot(A * x);
}

namespace {

// J A for block-partitioned rows: (J A)(i,:) = A(i+N,:), (J A)(i+N,:) = -A(i,:).
SparseRealMatrix poisson_times(const SparseRealMatrix& A) {
  const Index n2 = A.rows();
  const Index N = n2 / 2;
  SparseRealMatrix JA(n2, n2);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (Index col = 0; col < A.outerSize(); ++col) {
    for (SparseRealMatrix::InnerIterator it(A, col); it; ++it) {
      if (it.row() >= N) {
        trips.emplace_back(it.row() - N, col, it.value());
      } else {
        trips.emplace_back(it.row() + N, col, -it.value());
      }
    }
  }
  JA.setFromTriplets(trips.begin(), trips.end());
  JA.makeCompressed();
  return JA;
}

}  // namespace

RealMatrix midpoint_steps(const SparseRealMatrix& A,
                          const Eigen::Ref<const RealVector>& x0, double dt,
                          Index n_t) {
  if (A.rows() != A.cols() || A.rows() % 2 != 0 || A.rows() == 0) {
    throw ValidationError("midpoint_steps: operator must be square with even dimension");
  }
  if (x0.size() != A.rows()) {
    throw ValidationError("midpoint_steps: state dimension mismatch");
  }
  if (n_t < 1) {
    throw ValidationError("midpoint_steps: n_t must be at least 1");
  }

  const Index dim = A.rows();
  const SparseRealMatrix JA = poisson_times(A);
  SparseRealMatrix identity(dim, dim);
  identity.setIdentity();
  const SparseRealMatrix minus = identity - (0.5 * dt) * JA;
  const SparseRealMatrix plus = identity + (0.5 * dt) * JA;

  Eigen::SparseLU<SparseRealMatrix> lu(minus);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("midpoint_steps: step operator factorization failed");
  }

  RealMatrix states(dim, n_t + 1);
  states.col(0) = x0;
  RealVector x = x0;
  for (Index i = 0; i < n_t; ++i) {
    const RealVector rhs = plus * x;
    RealVector next = lu.solve(rhs);
    const double rhs_norm = rhs.norm();
    double resid = (minus * next - rhs).norm();
    if (resid > 1e-12 * std::max(rhs_norm, 1e-300)) {
      next += lu.solve(rhs - minus * next);
      resid = (minus * next - rhs).norm();
      if (resid > 1e-12 * std::max(rhs_norm, 1e-300)) {
        throw NumericalError("midpoint_steps: linear-solve residual above tolerance");
      }
    }
    if (!next.allFinite()) {
      throw NumericalError("midpoint_steps: NaN/Inf in trajectory");
    }
    x = std::move(next);
    states.col(i + 1) = x;
  }
  return states;
}

Trajectory integrate_midpoint(const LinearHamiltonianSystem& sys, double mu,
                              Index n_t) {
  if (n_t < 1) {
    throw ValidationError("integrate_midpoint: n_t must be at least 1");
  }
  const double t0 = sys.t_begin();
  const double t1 = sys.t_end(mu);
  const double dt = (t1 - t0) / static_cast<double>(n_t);

  Trajectory traj;
  traj.mu = mu;
  traj.states = midpoint_steps(sys.operator_matrix(mu), sys.initial_state(mu),
                               dt, n_t);
  traj.times = RealVector::LinSpaced(n_t + 1, t0, t1);
  return traj;
}

SnapshotMatrix collect_snapshots(const LinearHamiltonianSystem& sys,
                                 const std::vector<double>& training_mus,
                                 Index n_t) {
  if (training_mus.empty()) {
    throw ValidationError("collect_snapshots: parameter list is empty");
  }
  const Index n_s = static_cast<Index>(training_mus.size()) * n_t;
  SnapshotMatrix snaps;
  snaps.columns = RealMatrix(sys.dim(), n_s);
  snaps.provenance.reserve(static_cast<std::size_t>(n_s));
  Index col = 0;
  for (const double mu : training_mus) {
    const Trajectory traj = integrate_midpoint(sys, mu, n_t);
    snaps.columns.middleCols(col, n_t) = traj.states.rightCols(n_t);
    for (Index i = 1; i <= n_t; ++i) {
      snaps.provenance.emplace_back(mu, i);
    }
    col += n_t;
  }
  return snaps;
}

void export_trajectory_csv(const Trajectory& traj,
                           const std::function<double(const RealVector&)>& energy,
                           const std::string& path, bool include_states) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("export_trajectory_csv: cannot open " + path);
  }
  out << "t,H";
  if (include_states) {
    for (Index i = 0; i < traj.states.rows(); ++i) out << ",x" << i;
  }
  out << "\n";
  char buf[32];
  for (Index j = 0; j < traj.states.cols(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.times(j));
    out << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", energy(traj.states.col(j)));
    out << ',' << buf;
    if (include_states) {
      for (Index i = 0; i < traj.states.rows(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", traj.states(i, j));
        out << ',' << buf;
      }
    }
    out << "\n";
  }
}

}  // namespace sympmor::hamsys
