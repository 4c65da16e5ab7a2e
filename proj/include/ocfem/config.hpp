#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "ocfem/solvers.hpp"

namespace ocfem {

// Experiment design for the study runners. Parsed from flat `key = value`
// text with dotted keys and `#` comments.
struct StudyConfig {
  std::vector<int> levels;                 // mesh.levels, strictly increasing
  std::set<Side> gamma1_sides;             // mesh.gamma1
  double b = 1.0;                          // problem.b
  double m1 = 1.0;                         // problem.M1
  double m2 = 1.0;                         // problem.M2
  std::string zd_kind;                     // constant | field | zero_control_state
  double zd_value = 0.0;                   // zd.value, for kind constant
  std::string zd_field;                    // zd.field, for kind field
  std::vector<double> alphas;              // alpha.list, all >= 1
  int n_ref = 0;                           // reference.n
  std::string output_dir;                  // output.dir
  int alpha_n = 0;                         // alpha.n; 0 meaning max(levels)
  std::vector<double> audit_alphas = {10.0};  // audit.alpha
  int audit_n = 8;                         // audit.n
  int diagonal_count = 3;                  // diagonal.count
  double fp_tol = 1e-10;                   // fp.tol
  int fp_max_iter = 200;                   // fp.max_iter

  void validate() const;
};

StudyConfig default_config();
StudyConfig parse_config(std::istream& in);
StudyConfig load_config(const std::string& path);

// Builtin desired-state fields: xy, sinsin, gauss.
ScalarField builtin_field(const std::string& name);

// Desired state on a given discretization; kind zero_control_state solves the
// state at g = q = 0.
FeFunction make_zd(const StudyConfig& cfg, const Discretization& d);

ProblemSpec make_spec(const StudyConfig& cfg, const Discretization& d);

}  // namespace ocfem
