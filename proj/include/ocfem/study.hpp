#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ocfem/analysis.hpp"
#include "ocfem/config.hpp"
#include "ocfem/control.hpp"
#include "ocfem/csv.hpp"

namespace ocfem {

// One (h, alpha) case; alpha unset marks the Dirichlet variant.
struct StudyRecord {
  double h = 0.0;
  std::optional<double> alpha;
  double err_control = 0.0;  // H x Q distance of the optimal pair
  double err_state = 0.0;    // V distance of the optimal state
  double err_adjoint = 0.0;  // V distance of the optimal adjoint
  double cost = 0.0;
  int iterations = 0;
  std::string note;          // set when the case failed; errors are then 0
};

// The reference optimum on the fine mesh standing in for the continuous one.
struct Surrogate {
  std::shared_ptr<Discretization> d;
  ProblemSpec spec;
  Variant variant = Variant::dirichlet;
  Optimum opt;
};

Surrogate make_surrogate(const StudyConfig& cfg, std::optional<double> alpha);

// Error columns for a coarse optimum measured on the surrogate mesh after
// nodal interpolation.
void measure_against(const Surrogate& s, const Discretization& coarse, const Optimum& opt,
                     StudyRecord& rec);

// Solve the discrete optimum for one case.
Optimum solve_case(const StudyConfig& cfg, const Discretization& d,
                   std::optional<double> alpha);

struct SeriesFits {
  std::string alpha;  // "inf" for the Dirichlet series
  RateFit control, state, adjoint;
  bool low_r2 = false;  // any fit with r^2 < 0.98
};

struct HStudyResult {
  std::vector<StudyRecord> records;
  std::vector<SeriesFits> fits;
};

HStudyResult study_h(const StudyConfig& cfg);

struct AlphaRecord {
  double h = 0.0;
  double alpha = 0.0;
  double err_control = 0.0;  // Robin optimum vs Dirichlet optimum, same mesh
  double err_state = 0.0;
  double err_adjoint = 0.0;
  double fix_state = 0.0;    // fixed-control state gap at the Dirichlet optimal pair
  double fix_adjoint = 0.0;
  double cost = 0.0;
  int iterations = 0;
  std::string note;
};

std::vector<AlphaRecord> study_alpha(const StudyConfig& cfg);

struct DiagonalRecord {
  int k = 0;
  int n = 0;
  double h = 0.0;
  double alpha = 0.0;
  double err_control = 0.0;  // Robin optimum vs fine-mesh Dirichlet surrogate
  double err_state = 0.0;
  double err_adjoint = 0.0;
  int iterations = 0;
  std::string note;
};

std::vector<DiagonalRecord> study_diagonal(const StudyConfig& cfg);

// Cost gaps between the fine-mesh surrogate optimum and a coarse optimum.
// The fine cost plays the continuous one; coarse functions are interpolated
// up, the surrogate pair is interpolated down.
struct CostGapRecord {
  double h = 0.0;
  std::optional<double> alpha;
  double j_fine_opt = 0.0;        // fine cost at the surrogate optimum
  double j_fine_at_coarse = 0.0;  // fine cost at the lifted coarse optimum
  double j_coarse_opt = 0.0;      // coarse cost at the coarse optimum
  double j_coarse_at_fine = 0.0;  // coarse cost at the restricted surrogate pair
  double gap_fine = 0.0;          // j_fine_at_coarse - j_fine_opt, expected >= 0, O(h^2)
  double gap_coarse = 0.0;        // j_coarse_at_fine - j_coarse_opt, expected >= 0, O(h^2)
  double gap_cross = 0.0;         // j_fine_opt - j_coarse_opt, expected O(h)
  std::string note;
};

struct CostGapResult {
  std::vector<CostGapRecord> records;
  std::vector<SeriesFits> fits;  // control = gap_fine, state = gap_coarse slopes
};

CostGapResult study_cost_gaps(const StudyConfig& cfg);

CsvTable table_study_h(const std::vector<StudyRecord>& records);
CsvTable table_study_alpha(const std::vector<AlphaRecord>& records);
CsvTable table_study_diagonal(const std::vector<DiagonalRecord>& records);
CsvTable table_cost_gaps(const std::vector<CostGapRecord>& records);
CsvTable table_constants(const StudyConfig& cfg);
CsvTable table_bound_audit(const StudyConfig& cfg);

}  // namespace ocfem
