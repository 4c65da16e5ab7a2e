#include "ocfem/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "ocfem/errors.hpp"

namespace ocfem {

namespace {

void check_same_mesh(const Discretization& d, const MeshPtr& other, const char* what) {
  if (d.mesh() != other)
    throw ValidationError(std::string(what) + ": mesh differs from the discretization");
}

double require_alpha(const ProblemSpec& spec) {
  if (!spec.alpha)
    throw ValidationError("robin solve: spec.alpha is not set");
  return *spec.alpha;
}

}  // namespace

void ProblemSpec::validate() const {
  if (!(b > 0.0)) throw ValidationError("problem spec: b must be positive");
  if (!(m1 > 0.0) || !(m2 > 0.0))
    throw ValidationError("problem spec: control weights must be positive");
  if (alpha && !(*alpha > 0.0))
    throw ValidationError("problem spec: alpha must be positive");
  if (!z_d.mesh()) throw ValidationError("problem spec: z_d has no mesh");
}

Discretization::Discretization(MeshPtr mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw ValidationError("discretization: null mesh");
  forms_ = assemble_forms(mesh_);
  gamma1_nodes_ = mesh_->vertices_on(BoundaryLabel::gamma1);
  gamma2_nodes_ = mesh_->vertices_on(BoundaryLabel::gamma2);

  std::vector<char> on_gamma1(mesh_->num_vertices(), 0);
  for (int v : gamma1_nodes_) on_gamma1[v] = 1;
  free_nodes_.reserve(mesh_->num_vertices() - gamma1_nodes_.size());
  for (int v = 0; v < mesh_->num_vertices(); ++v)
    if (!on_gamma1[v]) free_nodes_.push_back(v);

  stiffness_ff_ = forms_.stiffness.restricted(free_nodes_, free_nodes_);
  vnorm_ff_ = add(forms_.mass, forms_.stiffness).restricted(free_nodes_, free_nodes_);
  q_mass_ = forms_.boundary_mass_g2.restricted(gamma2_nodes_, gamma2_nodes_);
}

const SparseSymMatrix& Discretization::robin_matrix(double alpha) const {
  auto it = robin_cache_.find(alpha);
  if (it == robin_cache_.end())
    it = robin_cache_.emplace(alpha, add(forms_.stiffness, forms_.boundary_mass_g1, alpha))
             .first;
  return it->second;
}

std::vector<double> Discretization::restrict_free(const std::vector<double>& full) const {
  std::vector<double> out(free_nodes_.size());
  for (size_t k = 0; k < free_nodes_.size(); ++k) out[k] = full[free_nodes_[k]];
  return out;
}

std::vector<double> Discretization::extend_free(const std::vector<double>& free_values,
                                                double gamma1_value) const {
  std::vector<double> out(mesh_->num_vertices(), gamma1_value);
  for (size_t k = 0; k < free_nodes_.size(); ++k) out[free_nodes_[k]] = free_values[k];
  return out;
}

std::vector<double> state_load(const Discretization& d, const ControlPair& ctrl) {
  check_same_mesh(d, ctrl.g.mesh(), "state_load");
  check_same_mesh(d, ctrl.q.mesh(), "state_load");
  std::vector<double> load = d.forms().mass.apply(ctrl.g.values());
  const std::vector<double> qext = extend_trace(*d.mesh(), ctrl.q);
  const std::vector<double> bq = d.forms().boundary_mass_g2.apply(qext);
  for (size_t i = 0; i < load.size(); ++i) load[i] -= bq[i];
  return load;
}

FeFunction solve_state_dirichlet(const Discretization& d, const ProblemSpec& spec,
                                 const ControlPair& ctrl, LinearSolveReport* report,
                                 const FeFunction* warm) {
  spec.validate();
  const std::vector<double> load = state_load(d, ctrl);
  std::vector<double> rhs = d.restrict_free(load);
  std::vector<double> x0;
  if (warm) {
    x0 = d.restrict_free(warm->values());
    for (double& v : x0) v -= spec.b;
  }
  std::vector<double> u0 =
      spd_solve(d.stiffness_ff(), rhs, report, {}, warm ? &x0 : nullptr);
  for (double& v : u0) v += spec.b;
  return FeFunction(d.mesh(), d.extend_free(u0, spec.b), SpaceTag::kh, spec.b);
}

FeFunction solve_state_robin(const Discretization& d, const ProblemSpec& spec,
                             const ControlPair& ctrl, LinearSolveReport* report,
                             const FeFunction* warm) {
  spec.validate();
  const double alpha = require_alpha(spec);
  std::vector<double> rhs = state_load(d, ctrl);
  const std::vector<double> ones(d.num_vertices(), 1.0);
  const std::vector<double> g1_load = d.forms().boundary_mass_g1.apply(ones);
  for (size_t i = 0; i < rhs.size(); ++i) rhs[i] += alpha * spec.b * g1_load[i];
  std::vector<double> u = spd_solve(d.robin_matrix(alpha), rhs, report, {},
                                    warm ? &warm->values() : nullptr);
  return FeFunction(d.mesh(), std::move(u));
}

namespace {

FeFunction adjoint_common(const Discretization& d, const std::vector<double>& misfit,
                          bool robin, double alpha, LinearSolveReport* report,
                          const FeFunction* warm) {
  std::vector<double> rhs = d.forms().mass.apply(misfit);
  if (robin) {
    std::vector<double> p = spd_solve(d.robin_matrix(alpha), rhs, report, {},
                                      warm ? &warm->values() : nullptr);
    return FeFunction(d.mesh(), std::move(p));
  }
  std::vector<double> rhs_f = d.restrict_free(rhs);
  std::vector<double> x0;
  if (warm) x0 = d.restrict_free(warm->values());
  std::vector<double> p0 =
      spd_solve(d.stiffness_ff(), rhs_f, report, {}, warm ? &x0 : nullptr);
  return FeFunction(d.mesh(), d.extend_free(p0, 0.0), SpaceTag::v0h);
}

}  // namespace

FeFunction solve_adjoint_dirichlet(const Discretization& d, const ProblemSpec& spec,
                                   const FeFunction& state, LinearSolveReport* report,
                                   const FeFunction* warm) {
  spec.validate();
  check_same_mesh(d, state.mesh(), "solve_adjoint_dirichlet");
  std::vector<double> misfit = state.values();
  for (size_t i = 0; i < misfit.size(); ++i) misfit[i] -= spec.z_d.values()[i];
  return adjoint_common(d, misfit, false, 0.0, report, warm);
}

FeFunction solve_adjoint_robin(const Discretization& d, const ProblemSpec& spec,
                               const FeFunction& state, LinearSolveReport* report,
                               const FeFunction* warm) {
  spec.validate();
  check_same_mesh(d, state.mesh(), "solve_adjoint_robin");
  const double alpha = require_alpha(spec);
  std::vector<double> misfit = state.values();
  for (size_t i = 0; i < misfit.size(); ++i) misfit[i] -= spec.z_d.values()[i];
  return adjoint_common(d, misfit, true, alpha, report, warm);
}

FeFunction state_response_dirichlet(const Discretization& d, const ControlPair& dc,
                                    LinearSolveReport* report) {
  std::vector<double> rhs = d.restrict_free(state_load(d, dc));
  std::vector<double> u0 = spd_solve(d.stiffness_ff(), rhs, report);
  return FeFunction(d.mesh(), d.extend_free(u0, 0.0), SpaceTag::v0h);
}

FeFunction state_response_robin(const Discretization& d, double alpha, const ControlPair& dc,
                                LinearSolveReport* report) {
  std::vector<double> rhs = state_load(d, dc);
  std::vector<double> u = spd_solve(d.robin_matrix(alpha), rhs, report);
  return FeFunction(d.mesh(), std::move(u));
}

FeFunction adjoint_response_dirichlet(const Discretization& d, const FeFunction& du,
                                      LinearSolveReport* report) {
  return adjoint_common(d, du.values(), false, 0.0, report, nullptr);
}

FeFunction adjoint_response_robin(const Discretization& d, double alpha, const FeFunction& du,
                                  LinearSolveReport* report) {
  return adjoint_common(d, du.values(), true, alpha, report, nullptr);
}

}  // namespace ocfem
