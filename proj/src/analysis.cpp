#include "ocfem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "ocfem/errors.hpp"

namespace ocfem {

namespace {

double b_normalize(const SparseSymMatrix& b, std::vector<double>& x) {
  double s = b.inner(x, x);
  if (!(s > 0.0)) throw NumericsError("eigen iteration collapsed to the null vector");
  double r = 1.0 / std::sqrt(s);
  for (double& v : x) v *= r;
  return s;
}

// Smallest eigenvalue of k x = mu b x by inverse iteration (solves with k).
double smallest_generalized(const SparseSymMatrix& k, const SparseSymMatrix& b,
                            const EigenOptions& opts) {
  std::size_t n = k.rows();
  std::vector<double> x(n, 1.0);
  b_normalize(b, x);
  double mu = k.inner(x, x);
  std::vector<double> x0(n, 0.0);
  for (int it = 0; it < opts.max_iter; ++it) {
    std::vector<double> rhs(n, 0.0);
    b.apply(x, rhs);
    for (std::size_t i = 0; i < n; ++i) x0[i] = x[i] / mu;
    std::vector<double> y = spd_solve(k, rhs, nullptr, {}, &x0);
    b_normalize(b, y);
    double mu_new = k.inner(y, y);
    x = y;
    if (std::abs(mu_new - mu) <= opts.tol * std::abs(mu_new)) return mu_new;
    mu = mu_new;
  }
  throw NumericsError("generalized eigenvalue iteration did not converge");
}

// Largest eigenvalue of k x = mu b x by power iteration on b^{-1} k.
double largest_generalized(const SparseSymMatrix& k, const SparseSymMatrix& b,
                           const EigenOptions& opts) {
  std::size_t n = k.rows();
  std::vector<double> x(n, 1.0);
  b_normalize(b, x);
  double mu = k.inner(x, x);
  std::vector<double> x0(n, 0.0);
  for (int it = 0; it < opts.max_iter; ++it) {
    std::vector<double> rhs(n, 0.0);
    k.apply(x, rhs);
    for (std::size_t i = 0; i < n; ++i) x0[i] = x[i] * mu;
    std::vector<double> y = spd_solve(b, rhs, nullptr, {}, &x0);
    b_normalize(b, y);
    double mu_new = k.inner(y, y);
    x = y;
    if (std::abs(mu_new - mu) <= opts.tol * std::abs(mu_new)) return mu_new;
    mu = mu_new;
  }
  throw NumericsError("generalized eigenvalue iteration did not converge");
}

double boundary_gap_sq(const Discretization& d, const FeFunction& v, double b) {
  std::vector<double> w = v.values();
  for (double& x : w) x -= b;
  return d.forms().boundary_mass_g1.inner(w, w);
}

}  // namespace

double estimate_lambda(const Discretization& d, EigenOptions opts) {
  return smallest_generalized(d.stiffness_ff(), d.vnorm_ff(), opts);
}

double estimate_lambda1(const Discretization& d, EigenOptions opts) {
  const Forms& f = d.forms();
  SparseSymMatrix k = add(f.stiffness, f.boundary_mass_g1);
  SparseSymMatrix b = add(f.mass, f.stiffness);
  return smallest_generalized(k, b, opts);
}

double estimate_trace_norm(const Discretization& d, EigenOptions opts) {
  const Forms& f = d.forms();
  SparseSymMatrix k = add(f.boundary_mass_g1, f.boundary_mass_g2);
  SparseSymMatrix b = add(f.mass, f.stiffness);
  return std::sqrt(largest_generalized(k, b, opts));
}

double c0_formula(double lambda, double gamma_norm, double m1, double m2) {
  double root = std::sqrt(1.0 / (m1 * m1) + gamma_norm * gamma_norm / (m2 * m2));
  return std::sqrt(2.0) / (lambda * lambda) * root * (1.0 + gamma_norm);
}

ConstantsReport contraction_constants(const Discretization& d, double m1, double m2,
                                      std::optional<double> alpha, EigenOptions opts) {
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw ValidationError("control weights must be positive");
  ConstantsReport r;
  r.lambda = estimate_lambda(d, opts);
  r.lambda1 = estimate_lambda1(d, opts);
  r.gamma_norm = estimate_trace_norm(d, opts);
  r.c0 = c0_formula(r.lambda, r.gamma_norm, m1, m2);
  if (alpha) {
    r.lambda_alpha = r.lambda1 * std::min(1.0, *alpha);
    r.c0_alpha = c0_formula(r.lambda_alpha, r.gamma_norm, m1, m2);
  }
  r.m = std::min(m1, m2);
  r.big_m = std::max(m1, m2);
  return r;
}

RateFit fit_rate(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size()) throw ValidationError("rate fit needs matching h and err lengths");
  if (h.size() < 2) throw ValidationError("rate fit needs at least two points");
  std::size_t n = h.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(err[i] > 0.0))
      throw ValidationError("rate fit needs strictly positive data");
    lx[i] = std::log(h[i]);
    ly[i] = std::log(err[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("rate fit needs distinct mesh sizes");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = syy - sxy * sxy / sxx;
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

BoundAudit audit_uniform_bounds(const Discretization& d, const ProblemSpec& spec, double alpha,
                                const FixedPointOptions& fp) {
  if (!(alpha >= 1.0)) throw ValidationError("bound audit requires alpha >= 1");
  ProblemSpec spec_a = spec;
  spec_a.alpha = alpha;
  spec_a.validate();

  double lambda = estimate_lambda(d);
  double lambda1 = estimate_lambda1(d);
  double gamma = estimate_trace_norm(d);
  double zd = norm(d.forms(), spec.z_d, NormKind::h);
  double area = 0.0;
  for (std::size_t t = 0; t < d.mesh()->triangles().size(); ++t)
    area += d.mesh()->triangle_area(static_cast<int>(t));
  double root_m = std::sqrt(std::min(spec.m1, spec.m2));
  double s2 = std::sqrt(2.0);

  double c1 = spec.b * std::sqrt(area);
  double c2 = (1.0 + 1.0 / lambda1) * c1;
  double c3 = c1 * c1 / lambda1;
  double c4 = (c2 + zd) / root_m;
  double c5 = c2 + 2.0 * zd;
  double c6 = (c1 + zd) / root_m;
  double c7 = s2 * (1.0 + gamma) * c6 + c1;
  double c8 = s2 * (1.0 + gamma) * c4 + (1.0 + 1.0 / lambda1) * c7;
  double c9 = (s2 * (1.0 + gamma) * c4 + c7) * (s2 * (1.0 + gamma) * c4 + c7) / lambda1;
  double c10 = (c7 + zd) / lambda;
  double c11 = (c8 + zd) / lambda1 + (1.0 + 1.0 / lambda1) * c10;
  double c12 = (c5 + zd + c10) * (c5 + zd + c10) / lambda1;

  FeFunction u00 = solve_state_dirichlet(d, spec_a, zero_control(d, Variant::dirichlet));
  FeFunction ua00 = solve_state_robin(d, spec_a, zero_control(d, Variant::robin));
  Optimum dir = solve_optimal_fixed_point(d, spec_a, Variant::dirichlet, fp);
  Optimum rob = solve_optimal_fixed_point(d, spec_a, Variant::robin, fp);

  const Forms& f = d.forms();
  BoundAudit audit;
  audit.alpha = alpha;
  auto push = [&audit](const std::string& name, double measured, double bound) {
    BoundCheck c;
    c.name = name;
    c.measured = measured;
    c.bound = bound;
    c.satisfied = measured <= bound * (1.0 + 1e-10);
    audit.checks.push_back(c);
  };
  push("c1", norm(f, u00, NormKind::v), c1);
  push("c2", norm(f, ua00, NormKind::v), c2);
  push("c3", (alpha - 1.0) * boundary_gap_sq(d, ua00, spec.b), c3);
  push("c4", control_norm(d, rob.control), c4);
  push("c5", norm(f, rob.state, NormKind::h), c5);
  push("c6", control_norm(d, dir.control), c6);
  push("c7", norm(f, dir.state, NormKind::v), c7);
  push("c8", norm(f, rob.state, NormKind::v), c8);
  push("c9", (alpha - 1.0) * boundary_gap_sq(d, rob.state, spec.b), c9);
  push("c10", norm(f, dir.adjoint, NormKind::v), c10);
  push("c11", norm(f, rob.adjoint, NormKind::v), c11);
  push("c12", (alpha - 1.0) * boundary_gap_sq(d, rob.adjoint, spec.b), c12);
  audit.all_satisfied = true;
  for (const BoundCheck& c : audit.checks) audit.all_satisfied = audit.all_satisfied && c.satisfied;
  return audit;
}

}  // namespace ocfem
