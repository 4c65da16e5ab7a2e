#pragma once

#include <map>
#include <optional>

#include "ocfem/fem.hpp"

namespace ocfem {

// Problem data on one mesh: boundary value b on Gamma1, desired state z_d,
// control cost weights m1 (distributed) and m2 (boundary), and the Robin
// penalty alpha for the penalized variant.
struct ProblemSpec {
  double b = 1.0;
  FeFunction z_d;
  double m1 = 1.0;
  double m2 = 1.0;
  std::optional<double> alpha;

  void validate() const;
};

// Assembled forms plus the index bookkeeping shared by every solve on a
// fixed mesh. The Robin matrix a + alpha * (Gamma1 boundary form) is cached
// per alpha.
class Discretization {
 public:
  explicit Discretization(MeshPtr mesh);

  const MeshPtr& mesh() const { return mesh_; }
  const Forms& forms() const { return forms_; }
  const std::vector<int>& gamma1_nodes() const { return gamma1_nodes_; }
  const std::vector<int>& gamma2_nodes() const { return gamma2_nodes_; }
  const std::vector<int>& free_nodes() const { return free_nodes_; }
  const SparseSymMatrix& stiffness_ff() const { return stiffness_ff_; }
  const SparseSymMatrix& vnorm_ff() const { return vnorm_ff_; }
  const SparseSymMatrix& q_mass() const { return q_mass_; }
  const SparseSymMatrix& robin_matrix(double alpha) const;

  int num_vertices() const { return mesh_->num_vertices(); }

  std::vector<double> restrict_free(const std::vector<double>& full) const;
  std::vector<double> extend_free(const std::vector<double>& free_values,
                                  double gamma1_value) const;

 private:
  MeshPtr mesh_;
  Forms forms_;
  std::vector<int> gamma1_nodes_;
  std::vector<int> gamma2_nodes_;
  std::vector<int> free_nodes_;
  SparseSymMatrix stiffness_ff_;  // stiffness on free nodes
  SparseSymMatrix vnorm_ff_;      // mass + stiffness on free nodes
  SparseSymMatrix q_mass_;        // Gamma2 boundary mass on Gamma2 nodes
  mutable std::map<double, SparseSymMatrix> robin_cache_;
};

// Load vector of the state equation, (g, v) - (q, v) on Gamma2.
std::vector<double> state_load(const Discretization& d, const ControlPair& ctrl);

// State with u = b on Gamma1 imposed by elimination: u = b + u0 with u0 in
// V0h. The constant lift is in the kernel of the stiffness form, so the
// eliminated system keeps the plain load.
FeFunction solve_state_dirichlet(const Discretization& d, const ProblemSpec& spec,
                                 const ControlPair& ctrl, LinearSolveReport* report = nullptr,
                                 const FeFunction* warm = nullptr);

// Robin-penalized state in Vh: (a + alpha b1) u = load + alpha * b * b1 * 1.
FeFunction solve_state_robin(const Discretization& d, const ProblemSpec& spec,
                             const ControlPair& ctrl, LinearSolveReport* report = nullptr,
                             const FeFunction* warm = nullptr);

// Adjoints driven by the tracking misfit state - z_d.
FeFunction solve_adjoint_dirichlet(const Discretization& d, const ProblemSpec& spec,
                                   const FeFunction& state, LinearSolveReport* report = nullptr,
                                   const FeFunction* warm = nullptr);
FeFunction solve_adjoint_robin(const Discretization& d, const ProblemSpec& spec,
                               const FeFunction& state, LinearSolveReport* report = nullptr,
                               const FeFunction* warm = nullptr);

// Homogeneous solves for control increments (zero lift, zero misfit offset);
// these realize the linear part of the control-to-state and state-to-adjoint
// maps and are shared by the optimizer internals.
FeFunction state_response_dirichlet(const Discretization& d, const ControlPair& dc,
                                    LinearSolveReport* report = nullptr);
FeFunction state_response_robin(const Discretization& d, double alpha, const ControlPair& dc,
                                LinearSolveReport* report = nullptr);
FeFunction adjoint_response_dirichlet(const Discretization& d, const FeFunction& du,
                                      LinearSolveReport* report = nullptr);
FeFunction adjoint_response_robin(const Discretization& d, double alpha, const FeFunction& du,
                                  LinearSolveReport* report = nullptr);

}  // namespace ocfem
