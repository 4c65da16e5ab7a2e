#include "ocfem/verify.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ocfem/analysis.hpp"
#include "ocfem/control.hpp"
#include "ocfem/study.hpp"

namespace ocfem {

namespace {

double max_abs_diff(const std::vector<double>& v, double ref) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x - ref));
  return m;
}

ControlPair random_control(const Discretization& d, Variant variant, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> g(d.num_vertices());
  for (double& v : g) v = dist(rng);
  if (variant == Variant::dirichlet)
    for (int i : d.gamma1_nodes()) g[i] = 0.0;
  std::vector<double> q(d.gamma2_nodes().size());
  for (double& v : q) v = dist(rng);
  SpaceTag tag = variant == Variant::dirichlet ? SpaceTag::v0h : SpaceTag::vh;
  return {FeFunction(d.mesh(), std::move(g), tag), BoundaryTrace(d.mesh(), std::move(q))};
}

FeFunction solve_state(const Discretization& d, const ProblemSpec& spec, const ControlPair& c,
                       Variant variant) {
  return variant == Variant::robin ? solve_state_robin(d, spec, c)
                                   : solve_state_dirichlet(d, spec, c);
}

FeFunction solve_adjoint(const Discretization& d, const ProblemSpec& spec, const FeFunction& u,
                         Variant variant) {
  return variant == Variant::robin ? solve_adjoint_robin(d, spec, u)
                                   : solve_adjoint_dirichlet(d, spec, u);
}

// a(p, w) for the variant's bilinear form.
double form_inner(const Discretization& d, std::optional<double> alpha, const FeFunction& p,
                  const std::vector<double>& w) {
  if (alpha) return d.robin_matrix(*alpha).inner(p.values(), w);
  return d.forms().stiffness.inner(p.values(), w);
}

double q_pair(const Discretization& d, const BoundaryTrace& q, const FeFunction& p) {
  std::vector<double> qe = extend_trace(*d.mesh(), q);
  return d.forms().boundary_mass_g2.inner(qe, p.values());
}

double h_pair(const Discretization& d, const FeFunction& f, const FeFunction& p) {
  return d.forms().mass.inner(f.values(), p.values());
}

}  // namespace

bool run_verify(const StudyConfig& cfg, std::ostream& out) {
  cfg.validate();
  bool all_ok = true;
  auto check = [&](const std::string& name, const std::function<bool()>& fn) {
    bool ok = false;
    std::string detail;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      detail = e.what();
      ok = false;
    }
    out << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) out << " (" << detail << ")";
    out << "\n";
    all_ok = all_ok && ok;
  };

  MeshPtr mesh = build_unit_square(8, cfg.gamma1_sides);
  Discretization d(mesh);
  ProblemSpec spec = make_spec(cfg, d);
  std::mt19937 rng(20240817u);

  check("unit square mesh counts", [&] {
    MeshPtr m4 = build_unit_square(4, cfg.gamma1_sides);
    return m4->num_vertices() == 25 && static_cast<int>(m4->triangles().size()) == 32 &&
           static_cast<int>(m4->boundary_edges().size()) == 16 &&
           std::abs(m4->h() - std::sqrt(2.0) / 4.0) <= 1e-15;
  });

  check("stiffness annihilates constants", [&] {
    std::vector<double> ones(d.num_vertices(), 1.0);
    std::vector<double> y(d.num_vertices(), 0.0);
    d.forms().stiffness.apply(ones, y);
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m <= 1e-13;
  });

  check("mass forms integrate the measures", [&] {
    std::vector<double> ones(d.num_vertices(), 1.0);
    double area = d.forms().mass.inner(ones, ones);
    double per = d.forms().boundary_mass_g1.inner(ones, ones) +
                 d.forms().boundary_mass_g2.inner(ones, ones);
    return std::abs(area - 1.0) <= 1e-13 && std::abs(per - 4.0) <= 1e-13;
  });

  check("zero-control states equal the boundary value", [&] {
    FeFunction ud = solve_state_dirichlet(d, spec, zero_control(d, Variant::dirichlet));
    ProblemSpec spec_a = spec;
    spec_a.alpha = 7.5;
    FeFunction ur = solve_state_robin(d, spec_a, zero_control(d, Variant::robin));
    double scale = std::max(1.0, cfg.b);
    return max_abs_diff(ud.values(), cfg.b) <= 1e-12 * scale &&
           max_abs_diff(ur.values(), cfg.b) <= 1e-8 * scale;
  });

  check("gradient matches finite differences", [&] {
    for (Variant variant : {Variant::dirichlet, Variant::robin}) {
      ProblemSpec sp = spec;
      if (variant == Variant::robin) sp.alpha = 10.0;
      ControlPair c = random_control(d, variant, rng);
      ControlPair dir = random_control(d, variant, rng);
      ControlPair grad = gradient(d, sp, c, variant);
      double pairing = control_inner(d, grad, dir);
      double eps = 1e-5;
      double jp = cost(d, sp, control_axpy(eps, dir, c), variant);
      double jm = cost(d, sp, control_axpy(-eps, dir, c), variant);
      double fd = (jp - jm) / (2.0 * eps);
      if (std::abs(fd - pairing) > 1e-6 * (1.0 + std::abs(pairing))) return false;
    }
    return true;
  });

  check("fixed point agrees with the kkt oracle", [&] {
    // penalties of 100 put the contraction bound C0 below one for any
    // boundary split, so the Banach iteration is guaranteed to converge
    for (Variant variant : {Variant::dirichlet, Variant::robin}) {
      ProblemSpec sp = spec;
      sp.m1 = 100.0;
      sp.m2 = 100.0;
      if (variant == Variant::robin) sp.alpha = 10.0;
      Optimum fp = solve_optimal_fixed_point(d, sp, variant,
                                             {cfg.fp_tol, cfg.fp_max_iter, std::nullopt});
      Optimum kkt = solve_optimal_kkt(d, sp, variant);
      if (control_distance(d, fp.control, kkt.control) > 1e-8) return false;
    }
    return true;
  });

  check("adjoint duality identity", [&] {
    for (Variant variant : {Variant::dirichlet, Variant::robin}) {
      ProblemSpec sp = spec;
      if (variant == Variant::robin) sp.alpha = 10.0;
      ControlPair c = random_control(d, variant, rng);
      ControlPair feta = random_control(d, variant, rng);
      FeFunction u = solve_state(d, sp, c, variant);
      FeFunction p = solve_adjoint(d, sp, u, variant);
      FeFunction u_feta = solve_state(d, sp, feta, variant);
      FeFunction u00 = solve_state(d, sp, zero_control(d, variant), variant);
      std::vector<double> w = u_feta.values();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= u00.values()[i];
      double lhs = form_inner(d, sp.alpha, p, w);
      double rhs = h_pair(d, feta.g, p) - q_pair(d, feta.q, p);
      if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(rhs))) return false;
    }
    return true;
  });

  check("uniform bounds hold", [&] {
    MeshPtr ma = build_unit_square(cfg.audit_n, cfg.gamma1_sides);
    Discretization da(ma);
    ProblemSpec sa = make_spec(cfg, da);
    BoundAudit audit =
        audit_uniform_bounds(da, sa, cfg.audit_alphas.front(), {cfg.fp_tol, cfg.fp_max_iter, {}});
    return audit.all_satisfied;
  });

  check("contraction constant formula", [&] {
    return std::abs(c0_formula(0.5, 2.0, 100.0, 100.0) - 0.37947331922020554) <= 1e-12;
  });

  check("rate fit recovers exact slopes", [&] {
    std::vector<double> hs = {0.4, 0.2, 0.1};
    std::vector<double> errs;
    for (double h : hs) errs.push_back(3.7 * h * h);
    RateFit fit = fit_rate(hs, errs);
    return std::abs(fit.slope - 2.0) <= 1e-10 && fit.r2 >= 1.0 - 1e-12;
  });

  out << (all_ok ? "verify: all checks passed\n" : "verify: FAILURES\n");
  return all_ok;
}

}  // namespace ocfem
