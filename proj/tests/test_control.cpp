#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "ocfem/control.hpp"
#include "ocfem/errors.hpp"
#include "ocfem/solvers.hpp"

using namespace ocfem;

namespace {

const std::set<Side> bottom_only = {Side::bottom};
// three clamped sides keep the fixed-point map contractive at M1 = M2 = 1
const std::set<Side> three_sides = {Side::bottom, Side::left, Side::right};
const double pi = std::acos(-1.0);

ProblemSpec tracking_spec(const MeshPtr& mesh, std::optional<double> alpha = std::nullopt) {
  FeFunction zd = interpolate(
      mesh, [](double x, double y) { return 0.5 + std::sin(pi * x) * std::sin(pi * y); });
  return ProblemSpec{1.0, zd, 1.0, 1.0, alpha};
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

}  // namespace

TEST_CASE("control space algebra") {
  MeshPtr mesh = build_unit_square(4, bottom_only);
  Discretization d(mesh);
  ControlPair zero = zero_control(d, Variant::robin);
  CHECK(control_norm(d, zero) == 0.0);

  ControlPair ones{FeFunction::constant(mesh, 1.0), BoundaryTrace(mesh, std::vector<double>(d.gamma2_nodes().size(), 1.0))};
  // |Omega| = 1 and |Gamma2| = 3: norm^2 = 1 + 3
  CHECK(control_norm(d, ones) == Catch::Approx(2.0).epsilon(1e-13));
  CHECK(control_inner(d, ones, ones) == Catch::Approx(4.0).epsilon(1e-13));

  ControlPair sum = control_axpy(2.0, ones, ones);
  CHECK(control_norm(d, sum) == Catch::Approx(6.0).epsilon(1e-13));
  CHECK(control_distance(d, sum, ones) == Catch::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("finite differences confirm the gradient") {
  MeshPtr mesh = build_unit_square(8, bottom_only);
  Discretization d(mesh);
  std::mt19937 rng(41u);
  const double eps = 1e-5;

  for (Variant variant : {Variant::dirichlet, Variant::robin}) {
    ProblemSpec spec = tracking_spec(mesh, variant == Variant::robin
                                               ? std::optional<double>(10.0)
                                               : std::nullopt);
    ControlPair c = random_control(d, variant, rng);
    ControlPair grad = gradient(d, spec, c, variant);
    for (int k = 0; k < 3; ++k) {
      ControlPair dir = random_control(d, variant, rng);
      double pairing = control_inner(d, grad, dir);
      double jp = cost(d, spec, control_axpy(eps, dir, c), variant);
      double jm = cost(d, spec, control_axpy(-eps, dir, c), variant);
      double fd = (jp - jm) / (2.0 * eps);
      CHECK(std::abs(pairing - fd) <= 1e-6 * (1.0 + std::abs(pairing)));
    }
  }
}

TEST_CASE("quadratic cost identities") {
  MeshPtr mesh = build_unit_square(8, bottom_only);
  Discretization d(mesh);
  std::mt19937 rng(43u);
  const double t = 0.3;

  for (Variant variant : {Variant::dirichlet, Variant::robin}) {
    ProblemSpec spec = tracking_spec(mesh, variant == Variant::robin
                                               ? std::optional<double>(5.0)
                                               : std::nullopt);
    auto solve = [&](const ControlPair& c) {
      return variant == Variant::robin ? solve_state_robin(d, spec, c)
                                       : solve_state_dirichlet(d, spec, c);
    };
    ControlPair c1 = random_control(d, variant, rng);
    ControlPair c2 = random_control(d, variant, rng);
    FeFunction u1 = solve(c1), u2 = solve(c2);

    std::vector<double> du = u2.values();
    for (std::size_t i = 0; i < du.size(); ++i) du[i] -= u1.values()[i];
    ControlPair dc = control_axpy(-1.0, c1, c2);
    double du_h2 = d.forms().mass.inner(du, du);
    double quad = du_h2 + spec.m1 * d.forms().mass.inner(dc.g.values(), dc.g.values()) +
                  spec.m2 * norm_q(d.forms(), dc.q) * norm_q(d.forms(), dc.q);

    // strict convexity along segments
    ControlPair mid = control_axpy(t, control_axpy(-1.0, c2, c1), c2);
    double lhs = (1.0 - t) * cost(d, spec, c2, variant) + t * cost(d, spec, c1, variant) -
                 cost(d, spec, mid, variant);
    double rhs = 0.5 * t * (1.0 - t) * quad;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));

    // strong monotonicity of the derivative
    ControlPair g1 = gradient(d, spec, c1, variant);
    ControlPair g2 = gradient(d, spec, c2, variant);
    double mono = control_inner(d, control_axpy(-1.0, g1, g2), dc);
    CHECK(std::abs(mono - quad) <= 1e-10 * (1.0 + quad));
  }
}

TEST_CASE("perfectly trackable target gives the zero control") {
  MeshPtr mesh = build_unit_square(8, bottom_only);
  Discretization d(mesh);
  ProblemSpec spec{2.0, FeFunction::zero(mesh), 1.0, 1.0, std::nullopt};
  spec.z_d = solve_state_dirichlet(d, spec, zero_control(d, Variant::dirichlet));

  Optimum opt = solve_optimal_fixed_point(d, spec, Variant::dirichlet);
  CHECK(opt.iterations <= 1);
  CHECK(control_norm(d, opt.control) == 0.0);
  CHECK(opt.cost <= 1e-24);
  CHECK(opt.final_increment == 0.0);
  CHECK_FALSE(opt.contraction_warning);
}

TEST_CASE("fixed point satisfies the optimality conditions") {
  MeshPtr mesh = build_unit_square(8, three_sides);
  Discretization d(mesh);

  for (Variant variant : {Variant::dirichlet, Variant::robin}) {
    ProblemSpec spec = tracking_spec(mesh, variant == Variant::robin
                                               ? std::optional<double>(10.0)
                                               : std::nullopt);
    Optimum opt = solve_optimal_fixed_point(d, spec, variant);
    CHECK(opt.gradient_residual <= 1e-8);
    CHECK(opt.final_increment <= 1e-10);
    for (double r : opt.step_ratios) CHECK(r < 1.0);

    ControlPair mapped = fixed_point_map(d, spec, opt.control, variant);
    CHECK(control_distance(d, mapped, opt.control) <= 1e-8);

    double j_opt = opt.cost;
    CHECK(std::abs(cost_given_state(d, spec, opt.control, opt.state) - j_opt) <=
          1e-13 * (1.0 + std::abs(j_opt)));

    // any perturbed control costs more
    std::mt19937 rng(47u);
    for (int k = 0; k < 3; ++k) {
      ControlPair dir = random_control(d, variant, rng);
      CHECK(cost(d, spec, control_axpy(1e-3, dir, opt.control), variant) >= j_opt);
    }
  }
}

TEST_CASE("fixed point and kkt oracle agree") {
  MeshPtr mesh = build_unit_square(8, three_sides);
  Discretization d(mesh);

  for (Variant variant : {Variant::dirichlet, Variant::robin}) {
    ProblemSpec spec = tracking_spec(mesh, variant == Variant::robin
                                               ? std::optional<double>(10.0)
                                               : std::nullopt);
    Optimum fp = solve_optimal_fixed_point(d, spec, variant);
    Optimum kkt = solve_optimal_kkt(d, spec, variant);
    CHECK(control_distance(d, fp.control, kkt.control) <= 1e-8);
    CHECK(std::abs(fp.cost - kkt.cost) <= 1e-10 * (1.0 + std::abs(fp.cost)));
    CHECK(kkt.gradient_residual <= 1e-8);
  }
}

TEST_CASE("iteration cap raises with the last iterate attached") {
  MeshPtr mesh = build_unit_square(4, bottom_only);
  Discretization d(mesh);
  ProblemSpec spec = tracking_spec(mesh);
  FixedPointOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-14;
  try {
    solve_optimal_fixed_point(d, spec, Variant::dirichlet, opts);
    FAIL("expected FixedPointError");
  } catch (const FixedPointError& e) {
    CHECK(e.last.iterations == 1);
    CHECK(e.last.final_increment > 0.0);
  }
}

TEST_CASE("contraction warning mirrors the supplied bound") {
  MeshPtr mesh = build_unit_square(4, bottom_only);
  Discretization d(mesh);
  ProblemSpec spec = tracking_spec(mesh);

  FixedPointOptions good;
  good.c0 = 0.9;
  CHECK_FALSE(solve_optimal_fixed_point(d, spec, Variant::dirichlet, good).contraction_warning);

  FixedPointOptions bad;
  bad.c0 = 1.5;
  CHECK(solve_optimal_fixed_point(d, spec, Variant::dirichlet, bad).contraction_warning);
}

TEST_CASE("penalized optima approach the constrained one") {
  MeshPtr mesh = build_unit_square(8, three_sides);
  Discretization d(mesh);
  ProblemSpec spec = tracking_spec(mesh);
  Optimum ref = solve_optimal_fixed_point(d, spec, Variant::dirichlet);

  double prev = 1e300;
  for (double alpha : {1.0, 100.0, 1e4, 1e6}) {
    ProblemSpec sa = spec;
    sa.alpha = alpha;
    Optimum opt = solve_optimal_fixed_point(d, sa, Variant::robin);
    double dist = control_distance(d, opt.control, ref.control);
    CHECK(dist < prev);
    prev = dist;
  }
  CHECK(prev <= 1e-3);
}
