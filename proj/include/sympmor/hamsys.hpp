#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "sympmor/types.hpp"

namespace sympmor::hamsys {

using SparseRealMatrix = Eigen::SparseMatrix<double>;

/// Tensor grid of interior points on (0, L1) x (0, L2) with homogeneous
/// Dirichlet boundary; spacing includes the distance to the boundary,
/// i.e. dx1 = L1 / (n_x1 + 1).
struct GridConfig {
  Index n_x1 = 100;
  Index n_x2 = 10;
  double length_x1 = 1.0;
  double length_x2 = 0.2;

  Index point_count() const { return n_x1 * n_x2; }
  double dx1() const { return length_x1 / static_cast<double>(n_x1 + 1); }
  double dx2() const { return length_x2 / static_cast<double>(n_x2 + 1); }
};

/// Parametric linear canonical Hamiltonian system
///   x'(t) = J_2N A(mu) x(t),  x(t0) = x0(mu),  H(x; mu) = x^T A(mu) x / 2
/// with A(mu) symmetric positive semidefinite.
class LinearHamiltonianSystem {
 public:
  using OperatorFn = std::function<SparseRealMatrix(double)>;
  using InitialFn = std::function<RealVector(double)>;
  using TimeEndFn = std::function<double(double)>;

  LinearHamiltonianSystem(Index half_dim, OperatorFn op, InitialFn init,
                          double t_begin, TimeEndFn t_end)
      : half_dim_(half_dim),
        op_(std::move(op)),
        init_(std::move(init)),
        t_begin_(t_begin),
        t_end_(std::move(t_end)) {
    if (half_dim_ < 1) {
      throw ValidationError("LinearHamiltonianSystem: half_dim must be positive");
    }
  }

  Index half_dim() const { return half_dim_; }
  Index dim() const { return 2 * half_dim_; }
  SparseRealMatrix operator_matrix(double mu) const { return op_(mu); }
  RealVector initial_state(double mu) const { return init_(mu); }
  double t_begin() const { return t_begin_; }
  double t_end(double mu) const { return t_end_(mu); }

 private:
  Index half_dim_;
  OperatorFn op_;
  InitialFn init_;
  double t_begin_;
  TimeEndFn t_end_;
};

/// Time-stepping result; states has one column per time point (n_t + 1 in
/// total, the initial state included).
struct Trajectory {
  RealMatrix states;
  RealVector times;
  double mu = 0.0;

  Index step_count() const { return states.cols() - 1; }
};

struct SnapshotMatrix {
  RealMatrix columns;                                 // 2N x n_s
  std::vector<std::pair<double, Index>> provenance;   // (mu, time index)

  Index snapshot_count() const { return columns.cols(); }
};

/// Piecewise-cubic bump: 1 at s = 0, support |s| <= 2.
double bump(double s);

/// Central finite differences for the 2D wave equation u_tt = mu^2 Lap(u) on
/// the grid, with A(mu) = [mu^2 (D11 + D22), 0; 0, I], x0 = [u0; 0] from the
/// bump profile u0(xi) = bump(10 (xi_1 - 1/2)), and t in [0, 2/mu].
LinearHamiltonianSystem discretize_wave(const GridConfig& grid);

/// H(x; mu) = x^T A(mu) x / 2.
double hamiltonian(const LinearHamiltonianSystem& sys,
                   const Eigen::Ref<const RealVector>& x, double mu);

/// Implicit midpoint steps for x' = J A x with fixed step dt (dt may be
/// negative for time-reversed integration). The step operator
/// I - dt/2 J A is factorized once and reused; per-step linear-solve
/// residuals are kept below 1e-12 relative.
RealMatrix midpoint_steps(const SparseRealMatrix& A,
                          const Eigen::Ref<const RealVector>& x0, double dt,
                          Index n_t);

/// Integrates the full model over [t0, t_end(mu)] with n_t midpoint steps.
Trajectory integrate_midpoint(const LinearHamiltonianSystem& sys, double mu,
                              Index n_t);

/// Runs the integrator for every training parameter and stacks the states of
/// steps 1..n_t (the initial state is excluded) in parameter order, so that
/// n_s = |training_mus| * n_t.
SnapshotMatrix collect_snapshots(const LinearHamiltonianSystem& sys,
                                 const std::vector<double>& training_mus,
                                 Index n_t);

/// Debug export: one row per time point with columns t, H(x_t) and optionally
/// the state entries.
void export_trajectory_csv(const Trajectory& traj,
                           const std::function<double(const RealVector&)>& energy,
                           const std::string& path, bool include_states = false);

}  // namespace sympmor::hamsys
