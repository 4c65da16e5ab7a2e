#include "ocfem/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ocfem/errors.hpp"

namespace ocfem {

namespace {

double require_alpha(const ProblemSpec& spec) {
  if (!spec.alpha) throw ValidationError("robin variant: spec.alpha is not set");
  return *spec.alpha;
}

FeFunction solve_state(const Discretization& d, const ProblemSpec& spec,
                       const ControlPair& ctrl, Variant variant,
                       const FeFunction* warm = nullptr) {
  return variant == Variant::dirichlet ? solve_state_dirichlet(d, spec, ctrl, nullptr, warm)
                                       : solve_state_robin(d, spec, ctrl, nullptr, warm);
}

FeFunction solve_adjoint(const Discretization& d, const ProblemSpec& spec,
                         const FeFunction& state, Variant variant,
                         const FeFunction* warm = nullptr) {
  return variant == Variant::dirichlet
             ? solve_adjoint_dirichlet(d, spec, state, nullptr, warm)
             : solve_adjoint_robin(d, spec, state, nullptr, warm);
}

BoundaryTrace trace_of(const Discretization& d, const FeFunction& p) {
  return restrict_trace(d.mesh(), p.values());
}

// (p + m1 g, m2 q - trace p) from an already computed adjoint.
ControlPair gradient_from_adjoint(const Discretization& d, const ProblemSpec& spec,
                                  const ControlPair& ctrl, const FeFunction& p) {
  std::vector<double> gg = p.values();
  for (size_t i = 0; i < gg.size(); ++i) gg[i] += spec.m1 * ctrl.g.values()[i];
  BoundaryTrace qq = trace_of(d, p);
  for (size_t k = 0; k < qq.values().size(); ++k)
    qq.values()[k] = spec.m2 * ctrl.q.values()[k] - qq.values()[k];
  return {FeFunction(d.mesh(), std::move(gg)), std::move(qq)};
}

// W(g, q) = (-p/m1, trace p / m2) from an already computed adjoint.
ControlPair map_from_adjoint(const Discretization& d, const ProblemSpec& spec,
                             const FeFunction& p, Variant variant) {
  std::vector<double> gg = p.values();
  for (double& v : gg) v = -v / spec.m1;
  BoundaryTrace qq = trace_of(d, p);
  for (double& v : qq.values()) v /= spec.m2;
  const SpaceTag tag = variant == Variant::dirichlet ? SpaceTag::v0h : SpaceTag::vh;
  return {FeFunction(d.mesh(), std::move(gg), tag), std::move(qq)};
}

}  // namespace

ControlPair zero_control(const Discretization& d, Variant variant) {
  const SpaceTag tag = variant == Variant::dirichlet ? SpaceTag::v0h : SpaceTag::vh;
  return {FeFunction::zero(d.mesh(), tag), BoundaryTrace::zero(d.mesh())};
}

ControlPair control_axpy(double a, const ControlPair& x, const ControlPair& y) {
  if (x.g.mesh() != y.g.mesh())
    throw ValidationError("control_axpy: controls live on different meshes");
  std::vector<double> gg = y.g.values();
  for (size_t i = 0; i < gg.size(); ++i) gg[i] += a * x.g.values()[i];
  std::vector<double> qq = y.q.values();
  for (size_t k = 0; k < qq.size(); ++k) qq[k] += a * x.q.values()[k];
  const SpaceTag tag = (x.g.tag() == SpaceTag::v0h && y.g.tag() == SpaceTag::v0h)
                           ? SpaceTag::v0h
                           : SpaceTag::vh;
  return {FeFunction(y.g.mesh(), std::move(gg), tag), BoundaryTrace(y.q.mesh(), std::move(qq))};
}

double control_inner(const Discretization& d, const ControlPair& a, const ControlPair& b) {
  return d.forms().mass.inner(a.g.values(), b.g.values()) +
         d.q_mass().inner(a.q.values(), b.q.values());
}

double control_norm(const Discretization& d, const ControlPair& c) {
  return std::sqrt(std::max(0.0, control_inner(d, c, c)));
}

double control_distance(const Discretization& d, const ControlPair& a, const ControlPair& b) {
  return control_norm(d, control_axpy(-1.0, b, a));
}

double cost_given_state(const Discretization& d, const ProblemSpec& spec,
                        const ControlPair& ctrl, const FeFunction& state) {
  std::vector<double> misfit = state.values();
  for (size_t i = 0; i < misfit.size(); ++i) misfit[i] -= spec.z_d.values()[i];
  const double track = d.forms().mass.inner(misfit, misfit);
  const double gg = d.forms().mass.inner(ctrl.g.values(), ctrl.g.values());
  const double qq = d.q_mass().inner(ctrl.q.values(), ctrl.q.values());
  return 0.5 * track + 0.5 * spec.m1 * gg + 0.5 * spec.m2 * qq;
}

double cost(const Discretization& d, const ProblemSpec& spec, const ControlPair& ctrl,
            Variant variant) {
  return cost_given_state(d, spec, ctrl, solve_state(d, spec, ctrl, variant));
}

ControlPair gradient(const Discretization& d, const ProblemSpec& spec, const ControlPair& ctrl,
                     Variant variant) {
  const FeFunction u = solve_state(d, spec, ctrl, variant);
  const FeFunction p = solve_adjoint(d, spec, u, variant);
  return gradient_from_adjoint(d, spec, ctrl, p);
}

ControlPair fixed_point_map(const Discretization& d, const ProblemSpec& spec,
                            const ControlPair& ctrl, Variant variant) {
  const FeFunction u = solve_state(d, spec, ctrl, variant);
  const FeFunction p = solve_adjoint(d, spec, u, variant);
  return map_from_adjoint(d, spec, p, variant);
}

Optimum solve_optimal_fixed_point(const Discretization& d, const ProblemSpec& spec,
                                  Variant variant, FixedPointOptions opts) {
  spec.validate();
  if (variant == Variant::robin) require_alpha(spec);
  if (!(opts.tol > 0.0) || opts.max_iter < 1)
    throw ValidationError("fixed point: invalid tolerance or iteration cap");

  const bool warn = opts.c0 && *opts.c0 >= 1.0;

  ControlPair c = zero_control(d, variant);
  std::optional<FeFunction> u, p;
  std::vector<double> ratios;
  double prev_inc = -1.0, inc = 0.0, grad_norm = 0.0;
  int done = 0;

  for (int it = 1; it <= opts.max_iter; ++it) {
    FeFunction unew = solve_state(d, spec, c, variant, u ? &*u : nullptr);
    FeFunction pnew = solve_adjoint(d, spec, unew, variant, p ? &*p : nullptr);
    u = std::move(unew);
    p = std::move(pnew);

    ControlPair w = map_from_adjoint(d, spec, *p, variant);
    const ControlPair step = control_axpy(-1.0, c, w);
    inc = control_norm(d, step);
    // Gradient of the pre-update iterate, no extra solves:
    // (m1 (g - w_g), m2 (q - w_q)) = (p + m1 g, m2 q - trace p).
    {
      ControlPair gr = step;
      for (double& v : gr.g.values()) v *= -spec.m1;
      for (double& v : gr.q.values()) v *= -spec.m2;
      grad_norm = control_norm(d, gr);
    }
    if (prev_inc > 0.0) ratios.push_back(inc / prev_inc);
    prev_inc = inc;
    c = std::move(w);
    if (inc <= opts.tol && grad_norm <= 0.9 * opts.tol) {
      done = it;
      break;
    }
  }

  // Final state, adjoint, and residual from fresh solves at the accepted control.
  FeFunction uf = solve_state(d, spec, c, variant, u ? &*u : nullptr);
  FeFunction pf = solve_adjoint(d, spec, uf, variant, p ? &*p : nullptr);
  Optimum out{c,
              uf,
              pf,
              cost_given_state(d, spec, c, uf),
              done > 0 ? done : opts.max_iter,
              inc,
              control_norm(d, gradient_from_adjoint(d, spec, c, pf)),
              warn,
              ratios};

  if (done == 0) {
    const double ratio = ratios.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : ratios.back();
    throw FixedPointError("fixed point: no convergence within " +
                              std::to_string(opts.max_iter) + " iterations (last ratio " +
                              std::to_string(ratio) + ")",
                          std::move(out), ratio);
  }
  return out;
}

Optimum solve_optimal_kkt(const Discretization& d, const ProblemSpec& spec, Variant variant,
                          double tol) {
  spec.validate();
  const double alpha = variant == Variant::robin ? require_alpha(spec) : 0.0;
  const int unknowns = d.num_vertices() + static_cast<int>(d.gamma2_nodes().size());
  if (unknowns > 20000)
    throw ValidationError("kkt oracle: " + std::to_string(unknowns) +
                          " unknowns exceed the cap of 20000");

  auto apply_op = [&](const ControlPair& dc) -> ControlPair {
    const FeFunction du = variant == Variant::dirichlet
                              ? state_response_dirichlet(d, dc)
                              : state_response_robin(d, alpha, dc);
    const FeFunction dp = variant == Variant::dirichlet
                              ? adjoint_response_dirichlet(d, du)
                              : adjoint_response_robin(d, alpha, du);
    std::vector<double> gg = dp.values();
    for (size_t i = 0; i < gg.size(); ++i) gg[i] += spec.m1 * dc.g.values()[i];
    BoundaryTrace qq = trace_of(d, dp);
    for (size_t k = 0; k < qq.values().size(); ++k)
      qq.values()[k] = spec.m2 * dc.q.values()[k] - qq.values()[k];
    return {FeFunction(d.mesh(), std::move(gg)), std::move(qq)};
  };

  // gradient(c) = op(c) + r0; solve op(c) = -r0 by CG in the H x Q metric.
  const ControlPair r0 = gradient(d, spec, zero_control(d, variant), variant);

  ControlPair x = zero_control(d, variant);
  ControlPair r = control_axpy(-1.0, r0, zero_control(d, variant));
  double rr = control_inner(d, r, r);
  const double rhs_norm = std::sqrt(rr);
  int iterations = 0;
  if (rhs_norm > 0.0) {
    ControlPair pdir = r;
    const int cap = 1000;
    bool converged = false;
    for (int it = 1; it <= cap; ++it) {
      const ControlPair op = apply_op(pdir);
      const double pap = control_inner(d, pdir, op);
      if (!(pap > 0.0))
        throw NumericsError("kkt oracle: reduced operator lost positive definiteness");
      const double step = rr / pap;
      x = control_axpy(step, pdir, x);
      r = control_axpy(-step, op, r);
      const double rr_new = control_inner(d, r, r);
      iterations = it;
      if (std::sqrt(rr_new) <= tol * rhs_norm) {
        converged = true;
        break;
      }
      pdir = control_axpy(rr_new / rr, pdir, r);
      rr = rr_new;
    }
    if (!converged)
      throw NumericsError("kkt oracle: cg did not reach the requested tolerance");
  }

  const FeFunction u = solve_state(d, spec, x, variant);
  const FeFunction p = solve_adjoint(d, spec, u, variant);
  const double residual = control_norm(d, gradient_from_adjoint(d, spec, x, p));
  const double scale = 1.0 + control_norm(d, x);
  if (residual > 1e-10 * scale)
    throw NumericsError("kkt oracle: optimality residual above 1e-10");
  return {x,      u, p, cost_given_state(d, spec, x, u), iterations, 0.0,
          residual, false, {}};
}

}  // namespace ocfem
