#pragma once

#include <functional>
#include <memory>

#include "sympmor/hamsys.hpp"
#include "sympmor/sympbasis.hpp"

namespace sympmor::reduce {

/// Symplectic Galerkin reduction of a linear Hamiltonian system:
/// A_r(mu) = V^T A(mu) V, x_r0(mu) = V+ x0(mu), dynamics x_r' = J_2k A_r x_r
/// with H_r(x_r) = x_r^T A_r x_r / 2.
class ReducedSystem {
 public:
  ReducedSystem(hamsys::LinearHamiltonianSystem full,
                std::shared_ptr<const sympbasis::SymplecticBasis> basis);

  RealMatrix reduced_operator(double mu) const;
  RealVector reduced_initial(double mu) const;
  matkit::PoissonStructure poisson() const { return {basis_->half_rank()}; }
  const sympbasis::SymplecticBasis& basis() const { return *basis_; }
  const hamsys::LinearHamiltonianSystem& full_system() const { return full_; }
  double t_begin() const { return full_.t_begin(); }
  double t_end(double mu) const { return full_.t_end(mu); }

  /// H_r(x_r; mu) = x_r^T A_r(mu) x_r / 2.
  double reduced_hamiltonian(const Eigen::Ref<const RealVector>& x_r,
                             double mu) const;

  /// ||V+ J A(mu) V - J_2k V^T A(mu) V||_F, the defect between the Galerkin
  /// operator and its canonical Hamiltonian form.
  double galerkin_consistency_defect(double mu) const;

 private:
  hamsys::LinearHamiltonianSystem full_;
  std::shared_ptr<const sympbasis::SymplecticBasis> basis_;
};

ReducedSystem reduce_system(
    const hamsys::LinearHamiltonianSystem& sys,
    std::shared_ptr<const sympbasis::SymplecticBasis> basis);

/// Implicit midpoint steps for a general dense linear system x' = B x;
/// dt may be negative. Same solver contract as hamsys::midpoint_steps.
RealMatrix midpoint_steps_dense(const Eigen::Ref<const RealMatrix>& B,
                                const Eigen::Ref<const RealVector>& x0,
                                double dt, Index n_t);

/// Integrates the reduced model over [t0, t_end(mu)] with n_t midpoint steps;
/// the 2k x 2k step operator is factorized once per call.
hamsys::Trajectory integrate_reduced(const ReducedSystem& rsys, double mu,
                                     Index n_t);

/// Relative reduction error: the quotient of root-sum-square state norms
/// over all n_t + 1 time points (initial states included).
double relative_error(const hamsys::Trajectory& full,
                      const sympbasis::SymplecticBasis& basis,
                      const hamsys::Trajectory& reduced);

/// Lifts a reduced trajectory: states V x_r.
hamsys::Trajectory reconstruct(const sympbasis::SymplecticBasis& basis,
                               const hamsys::Trajectory& reduced);

/// max_i |H(x_i) - H(x_0)| over the trajectory.
double hamiltonian_drift(const hamsys::Trajectory& traj,
                         const std::function<double(const RealVector&)>& energy);

/// One benchmark record for a (method, basis size) evaluation.
struct ErrorReport {
  double relerr = 0.0;
  double hamiltonian_drift_full = 0.0;
  double hamiltonian_drift_reduced = 0.0;
  Index basis_size = 0;
  double basis_gen_seconds = 0.0;
  double rom_solve_seconds = 0.0;
};

}  // namespace sympmor::reduce
