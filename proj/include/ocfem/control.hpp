#pragma once

#include <optional>
#include <vector>

#include "ocfem/solvers.hpp"

namespace ocfem {

enum class Variant { dirichlet, robin };

ControlPair zero_control(const Discretization& d, Variant variant);

// Algebra in the control space H x Q.
ControlPair control_axpy(double a, const ControlPair& x, const ControlPair& y);
double control_inner(const Discretization& d, const ControlPair& a, const ControlPair& b);
double control_norm(const Discretization& d, const ControlPair& c);
double control_distance(const Discretization& d, const ControlPair& a, const ControlPair& b);

// Tracking cost 1/2 |u - z_d|^2 + m1/2 |g|^2 + m2/2 |q|^2 with the state
// solved for the given variant.
double cost(const Discretization& d, const ProblemSpec& spec, const ControlPair& ctrl,
            Variant variant);
double cost_given_state(const Discretization& d, const ProblemSpec& spec,
                        const ControlPair& ctrl, const FeFunction& state);

// Riesz representative of the cost derivative in H x Q:
// (p + m1 g, m2 q - trace p).
ControlPair gradient(const Discretization& d, const ProblemSpec& spec, const ControlPair& ctrl,
                     Variant variant);

// W(g, q) = (-p/m1, trace p / m2); its fixed point is the optimum.
ControlPair fixed_point_map(const Discretization& d, const ProblemSpec& spec,
                            const ControlPair& ctrl, Variant variant);

struct Optimum {
  ControlPair control;
  FeFunction state;
  FeFunction adjoint;
  double cost = 0.0;
  int iterations = 0;
  double final_increment = 0.0;
  double gradient_residual = 0.0;       // recomputed from fresh solves
  bool contraction_warning = false;     // set when a supplied C0 bound is >= 1
  std::vector<double> step_ratios;      // successive increment ratios
};

struct FixedPointOptions {
  double tol = 1e-10;              // on the H x Q increment
  int max_iter = 200;
  std::optional<double> c0;        // contraction bound, only for the warning
};

struct FixedPointError : NumericsError {
  FixedPointError(const std::string& msg, Optimum last_iterate, double measured_ratio)
      : NumericsError(msg), last(std::move(last_iterate)), ratio(measured_ratio) {}
  Optimum last;
  double ratio;
};

// Banach iteration c <- W(c) from (0, 0), warm-starting the inner solves.
Optimum solve_optimal_fixed_point(const Discretization& d, const ProblemSpec& spec,
                                  Variant variant, FixedPointOptions opts = {});

// Independent oracle: conjugate gradients on the reduced optimality system
// in the H x Q inner product (the control-to-gradient map is symmetric
// positive definite there). Guarded to small problems.
Optimum solve_optimal_kkt(const Discretization& d, const ProblemSpec& spec, Variant variant,
                          double tol = 1e-12);

}  // namespace ocfem
