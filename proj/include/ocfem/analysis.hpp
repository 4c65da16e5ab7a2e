#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ocfem/control.hpp"
#include "ocfem/solvers.hpp"

namespace ocfem {

struct EigenOptions {
  double tol = 1e-8;   // relative change of the Rayleigh quotient
  int max_iter = 5000;
};

// Smallest eigenvalue of the energy form against the V norm on V0h:
// a(v, v) >= lambda |v|_V^2 for all v in V0h.
double estimate_lambda(const Discretization& d, EigenOptions opts = {});

// Same for the alpha = 1 Robin form a(v, v) + (v, v) on Gamma1 over all of Vh.
double estimate_lambda1(const Discretization& d, EigenOptions opts = {});

// Norm of the boundary trace Vh -> L2 of the whole boundary: square root of
// the largest eigenvalue of the boundary mass form against the V norm.
double estimate_trace_norm(const Discretization& d, EigenOptions opts = {});

struct ConstantsReport {
  double lambda = 0.0;
  double lambda1 = 0.0;
  double lambda_alpha = 0.0;  // lambda1 * min(1, alpha); 0 when alpha unset
  double gamma_norm = 0.0;
  double c0 = 0.0;            // Dirichlet fixed-point contraction bound
  double c0_alpha = 0.0;      // Robin analogue; 0 when alpha unset
  double m = 0.0;             // min(m1, m2)
  double big_m = 0.0;         // max(m1, m2)
};

double c0_formula(double lambda, double gamma_norm, double m1, double m2);

ConstantsReport contraction_constants(const Discretization& d, double m1, double m2,
                                      std::optional<double> alpha, EigenOptions opts = {});

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares of log(err) against log(h).
RateFit fit_rate(const std::vector<double>& h, const std::vector<double>& err);

struct BoundCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

struct BoundAudit {
  double alpha = 0.0;
  std::vector<BoundCheck> checks;
  bool all_satisfied = false;
};

// Evaluates the twelve a-priori bounds on zero-control states, optimal
// controls, optimal states, and adjoints at the given alpha, with every
// constant computed from its defining formula.
BoundAudit audit_uniform_bounds(const Discretization& d, const ProblemSpec& spec, double alpha,
                                const FixedPointOptions& fp = {});

}  // namespace ocfem
