#include "sympmor/reduce.hpp"

#include <cmath>
#include <utility>

#include <Eigen/Dense>

namespace sympmor::reduce {

ReducedSystem::ReducedSystem(
    hamsys::LinearHamiltonianSystem full,
    std::shared_ptr<const sympbasis::SymplecticBasis> basis)
    : full_(std::move(full)), basis_(std::move(basis)) {
  if (basis_ == nullptr) {
    throw ValidationError("ReducedSystem: basis is null");
  }
  if (basis_->matrix().rows() != full_.dim()) {
    throw ValidationError("ReducedSystem: basis rows do not match system dimension");
  }
}

RealMatrix ReducedSystem::reduced_operator(double mu) const {
  const RealMatrix& V = basis_->matrix();
  const hamsys::SparseRealMatrix A = full_.operator_matrix(mu);
  return V.transpose() * (A * V);
}

RealVector ReducedSystem::reduced_initial(double mu) const {
  return basis_->symplectic_inverse() * full_.initial_state(mu);
}

double ReducedSystem::reduced_hamiltonian(
    const Eigen::Ref<const RealVector>& x_r, double mu) const {
  if (x_r.size() != 2 * basis_->half_rank()) {
    throw ValidationError("reduced_hamiltonian: state dimension mismatch");
  }
  const RealMatrix A_r = reduced_operator(mu);
  return 0.5 * x_r.dot(A_r * x_r);
}

double ReducedSystem::galerkin_consistency_defect(double mu) const {
  const RealMatrix& V = basis_->matrix();
  const hamsys::SparseRealMatrix A = full_.operator_matrix(mu);
  const matkit::PoissonStructure JN{full_.half_dim()};
  const matkit::PoissonStructure Jk{basis_->half_rank()};
  const RealMatrix galerkin =
      basis_->symplectic_inverse() * matkit::poisson_apply(JN, A * V);
  const RealMatrix canonical =
      matkit::poisson_apply(Jk, RealMatrix(V.transpose() * (A * V)));
  return (galerkin - canonical).norm();
}

ReducedSystem reduce_system(
    const hamsys::LinearHamiltonianSystem& sys,
    std::shared_ptr<const sympbasis::SymplecticBasis> basis) {
  return ReducedSystem(sys, std::move(basis));
}

RealMatrix midpoint_steps_dense(const Eigen::Ref<const RealMatrix>& B,
                                const Eigen::Ref<const RealVector>& x0,
                                double dt, Index n_t) {
  if (B.rows() != B.cols() || B.rows() == 0) {
    throw ValidationError("midpoint_steps_dense: operator must be square");
  }
  if (x0.size() != B.rows()) {
    throw ValidationError("midpoint_steps_dense: state dimension mismatch");
  }
  if (n_t < 1) {
    throw ValidationError("midpoint_steps_dense: n_t must be at least 1");
  }
  const Index dim = B.rows();
  const RealMatrix identity = RealMatrix::Identity(dim, dim);
  const RealMatrix minus = identity - (0.5 * dt) * B;
  const RealMatrix plus = identity + (0.5 * dt) * B;
  Eigen::PartialPivLU<RealMatrix> lu(minus);

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
        throw NumericalError("midpoint_steps_dense: residual above tolerance");
      }
    }
    if (!next.allFinite()) {
      throw NumericalError("midpoint_steps_dense: NaN/Inf in trajectory");
    }
    x = std::move(next);
    states.col(i + 1) = x;
  }
  return states;
}

hamsys::Trajectory integrate_reduced(const ReducedSystem& rsys, double mu,
                                     Index n_t) {
  if (n_t < 1) {
    throw ValidationError("integrate_reduced: n_t must be at least 1");
  }
  const RealMatrix A_r = rsys.reduced_operator(mu);
  const RealMatrix B = matkit::poisson_apply(rsys.poisson(), A_r);
  const double t0 = rsys.t_begin();
  const double t1 = rsys.t_end(mu);
  const double dt = (t1 - t0) / static_cast<double>(n_t);

  hamsys::Trajectory traj;
  traj.mu = mu;
  traj.states = midpoint_steps_dense(B, rsys.reduced_initial(mu), dt, n_t);
  traj.times = RealVector::LinSpaced(n_t + 1, t0, t1);
  return traj;
}

double relative_error(const hamsys::Trajectory& full,
                      const sympbasis::SymplecticBasis& basis,
                      const hamsys::Trajectory& reduced) {
  if (full.states.cols() != reduced.states.cols()) {
    throw ValidationError("relative_error: trajectories have different lengths");
  }
  if (basis.matrix().rows() != full.states.rows() ||
      basis.matrix().cols() != reduced.states.rows()) {
    throw ValidationError("relative_error: basis dimensions do not match");
  }
  const double denom = full.states.norm();
  if (denom == 0.0) {
    throw ValidationError("relative_error: full trajectory is identically zero");
  }
  return (full.states - basis.matrix() * reduced.states).norm() / denom;
}

hamsys::Trajectory reconstruct(const sympbasis::SymplecticBasis& basis,
                               const hamsys::Trajectory& reduced) {
  if (basis.matrix().cols() != reduced.states.rows()) {
    throw ValidationError("reconstruct: basis columns do not match reduced dimension");
  }
  hamsys::Trajectory out;
  out.states = basis.matrix() * reduced.states;
  out.times = reduced.times;
  out.mu = reduced.mu;
  return out;
}

double hamiltonian_drift(const hamsys::Trajectory& traj,
                         const std::function<double(const RealVector&)>& energy) {
  if (traj.states.cols() < 1) {
    throw ValidationError("hamiltonian_drift: empty trajectory");
  }
  const double h0 = energy(traj.states.col(0));
  double drift = 0.0;
  for (Index j = 1; j < traj.states.cols(); ++j) {
    drift = std::max(drift, std::abs(energy(traj.states.col(j)) - h0));
  }
  return drift;
}

}  // namespace sympmor::reduce
