#include "ocfem/study.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "ocfem/errors.hpp"

namespace ocfem {

namespace {

double v_distance(const Forms& forms, const FeFunction& a, const FeFunction& b) {
  std::vector<double> diff = a.values();
  const std::vector<double>& bv = b.values();
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= bv[i];
  return norm(forms, FeFunction(forms.mesh, std::move(diff)), NormKind::v);
}

std::string alpha_label(const std::optional<double>& alpha) {
  return alpha ? format_full(*alpha) : "inf";
}

bool fits_possible(const std::vector<double>& errs) {
  for (double e : errs)
    if (!(e > 0.0)) return false;
  return errs.size() >= 2;
}

void maybe_push_fits(std::vector<SeriesFits>& fits, const std::string& alpha,
                     const std::vector<double>& h, const std::vector<double>& ec,
                     const std::vector<double>& es, const std::vector<double>& ea) {
  if (!fits_possible(ec) || !fits_possible(es) || !fits_possible(ea)) return;
  SeriesFits f;
  f.alpha = alpha;
  f.control = fit_rate(h, ec);
  f.state = fit_rate(h, es);
  f.adjoint = fit_rate(h, ea);
  f.low_r2 = f.control.r2 < 0.98 || f.state.r2 < 0.98 || f.adjoint.r2 < 0.98;
  fits.push_back(f);
}

}  // namespace

Surrogate make_surrogate(const StudyConfig& cfg, std::optional<double> alpha) {
  MeshPtr mesh = build_unit_square(cfg.n_ref, cfg.gamma1_sides);
  auto d = std::make_shared<Discretization>(mesh);
  ProblemSpec spec = make_spec(cfg, *d);
  spec.alpha = alpha;
  Variant variant = alpha ? Variant::robin : Variant::dirichlet;
  FixedPointOptions opts{cfg.fp_tol, cfg.fp_max_iter, std::nullopt};
  Optimum opt = solve_optimal_fixed_point(*d, spec, variant, opts);
  return Surrogate{d, std::move(spec), variant, std::move(opt)};
}

Optimum solve_case(const StudyConfig& cfg, const Discretization& d,
                   std::optional<double> alpha) {
  ProblemSpec spec = make_spec(cfg, d);
  spec.alpha = alpha;
  Variant variant = alpha ? Variant::robin : Variant::dirichlet;
  FixedPointOptions opts{cfg.fp_tol, cfg.fp_max_iter, std::nullopt};
  return solve_optimal_fixed_point(d, spec, variant, opts);
}

void measure_against(const Surrogate& s, const Discretization& coarse, const Optimum& opt,
                     StudyRecord& rec) {
  const MeshPtr& fine = s.d->mesh();
  ControlPair lifted{interpolate_onto(opt.control.g, fine), transfer_gamma2(opt.control.q, fine)};
  rec.err_control = control_norm(*s.d, control_axpy(-1.0, lifted, s.opt.control));
  FeFunction u_f = interpolate_onto(opt.state, fine);
  FeFunction p_f = interpolate_onto(opt.adjoint, fine);
  rec.err_state = v_distance(s.d->forms(), s.opt.state, u_f);
  rec.err_adjoint = v_distance(s.d->forms(), s.opt.adjoint, p_f);
  (void)coarse;
}

HStudyResult study_h(const StudyConfig& cfg) {
  cfg.validate();
  HStudyResult result;
  std::vector<std::optional<double>> cases;
  cases.push_back(std::nullopt);
  for (double a : cfg.alphas) cases.push_back(a);

  for (const std::optional<double>& alpha : cases) {
    Surrogate s = make_surrogate(cfg, alpha);
    std::vector<double> hs, ec, es, ea;
    for (int n : cfg.levels) {
      MeshPtr mesh = build_unit_square(n, cfg.gamma1_sides);
      Discretization d(mesh);
      StudyRecord rec;
      rec.h = mesh->h();
      rec.alpha = alpha;
      try {
        Optimum opt = solve_case(cfg, d, alpha);
        rec.cost = opt.cost;
        rec.iterations = opt.iterations;
        measure_against(s, d, opt, rec);
        hs.push_back(rec.h);
        ec.push_back(rec.err_control);
        es.push_back(rec.err_state);
        ea.push_back(rec.err_adjoint);
      } catch (const std::exception& e) {
        rec.note = e.what();
      }
      result.records.push_back(std::move(rec));
    }
    if (hs.size() == cfg.levels.size())
      maybe_push_fits(result.fits, alpha_label(alpha), hs, ec, es, ea);
  }

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const StudyRecord& a, const StudyRecord& b) {
                     if (a.h != b.h) return a.h < b.h;
                     double aa = a.alpha ? *a.alpha : std::numeric_limits<double>::infinity();
                     double bb = b.alpha ? *b.alpha : std::numeric_limits<double>::infinity();
                     return aa < bb;
                   });
  return result;
}

std::vector<AlphaRecord> study_alpha(const StudyConfig& cfg) {
  cfg.validate();
  int n = cfg.alpha_n > 0 ? cfg.alpha_n : cfg.levels.back();
  MeshPtr mesh = build_unit_square(n, cfg.gamma1_sides);
  Discretization d(mesh);
  ProblemSpec spec = make_spec(cfg, d);
  FixedPointOptions opts{cfg.fp_tol, cfg.fp_max_iter, std::nullopt};
  Optimum dir = solve_optimal_fixed_point(d, spec, Variant::dirichlet, opts);

  std::vector<AlphaRecord> records;
  for (double alpha : cfg.alphas) {
    AlphaRecord rec;
    rec.h = mesh->h();
    rec.alpha = alpha;
    ProblemSpec spec_a = spec;
    spec_a.alpha = alpha;
    try {
      Optimum rob = solve_optimal_fixed_point(d, spec_a, Variant::robin, opts);
      rec.err_control = control_distance(d, rob.control, dir.control);
      rec.err_state = v_distance(d.forms(), rob.state, dir.state);
      rec.err_adjoint = v_distance(d.forms(), rob.adjoint, dir.adjoint);
      FeFunction u_fix = solve_state_robin(d, spec_a, dir.control, nullptr, &rob.state);
      FeFunction p_fix = solve_adjoint_robin(d, spec_a, u_fix, nullptr, &rob.adjoint);
      rec.fix_state = v_distance(d.forms(), u_fix, dir.state);
      rec.fix_adjoint = v_distance(d.forms(), p_fix, dir.adjoint);
      rec.cost = rob.cost;
      rec.iterations = rob.iterations;
    } catch (const std::exception& e) {
      rec.note = e.what();
    }
    records.push_back(std::move(rec));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const AlphaRecord& a, const AlphaRecord& b) { return a.alpha < b.alpha; });
  return records;
}

std::vector<DiagonalRecord> study_diagonal(const StudyConfig& cfg) {
  cfg.validate();
  int n_max = 8 << (cfg.diagonal_count - 1);
  if (cfg.n_ref < 4 * n_max)
    throw ValidationError("reference.n must be at least 4 times the finest diagonal level");
  Surrogate s = make_surrogate(cfg, std::nullopt);

  std::vector<DiagonalRecord> records;
  for (int k = 0; k < cfg.diagonal_count; ++k) {
    DiagonalRecord rec;
    rec.k = k;
    rec.n = 8 << k;
    rec.alpha = std::pow(10.0, k + 1);
    MeshPtr mesh = build_unit_square(rec.n, cfg.gamma1_sides);
    Discretization d(mesh);
    rec.h = mesh->h();
    try {
      Optimum rob = solve_case(cfg, d, rec.alpha);
      StudyRecord tmp;
      measure_against(s, d, rob, tmp);
      rec.err_control = tmp.err_control;
      rec.err_state = tmp.err_state;
      rec.err_adjoint = tmp.err_adjoint;
      rec.iterations = rob.iterations;
    } catch (const std::exception& e) {
      rec.note = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

CostGapResult study_cost_gaps(const StudyConfig& cfg) {
  cfg.validate();
  CostGapResult result;
  std::vector<std::optional<double>> cases;
  cases.push_back(std::nullopt);
  for (double a : cfg.alphas) cases.push_back(a);

  for (const std::optional<double>& alpha : cases) {
    Surrogate s = make_surrogate(cfg, alpha);
    std::vector<double> hs, gf, gc;
    for (int n : cfg.levels) {
      MeshPtr mesh = build_unit_square(n, cfg.gamma1_sides);
      Discretization d(mesh);
      CostGapRecord rec;
      rec.h = mesh->h();
      rec.alpha = alpha;
      try {
        ProblemSpec spec = make_spec(cfg, d);
        spec.alpha = alpha;
        Variant variant = alpha ? Variant::robin : Variant::dirichlet;
        FixedPointOptions opts{cfg.fp_tol, cfg.fp_max_iter, std::nullopt};
        Optimum opt = solve_optimal_fixed_point(d, spec, variant, opts);

        ControlPair lifted{interpolate_onto(opt.control.g, s.d->mesh()),
                           transfer_gamma2(opt.control.q, s.d->mesh())};
        FeFunction u_lift = variant == Variant::robin
                                ? solve_state_robin(*s.d, s.spec, lifted, nullptr, &s.opt.state)
                                : solve_state_dirichlet(*s.d, s.spec, lifted, nullptr, &s.opt.state);
        ControlPair restricted{interpolate_onto(s.opt.control.g, mesh),
                               transfer_gamma2(s.opt.control.q, mesh)};
        FeFunction u_restr = variant == Variant::robin
                                 ? solve_state_robin(d, spec, restricted, nullptr, &opt.state)
                                 : solve_state_dirichlet(d, spec, restricted, nullptr, &opt.state);

        rec.j_fine_opt = s.opt.cost;
        rec.j_fine_at_coarse = cost_given_state(*s.d, s.spec, lifted, u_lift);
        rec.j_coarse_opt = opt.cost;
        rec.j_coarse_at_fine = cost_given_state(d, spec, restricted, u_restr);
        rec.gap_fine = rec.j_fine_at_coarse - rec.j_fine_opt;
        rec.gap_coarse = rec.j_coarse_at_fine - rec.j_coarse_opt;
        rec.gap_cross = rec.j_fine_opt - rec.j_coarse_opt;
        hs.push_back(rec.h);
        gf.push_back(rec.gap_fine);
        gc.push_back(rec.gap_coarse);
      } catch (const std::exception& e) {
        rec.note = e.what();
      }
      result.records.push_back(std::move(rec));
    }
    if (hs.size() == cfg.levels.size() && fits_possible(gf) && fits_possible(gc)) {
      SeriesFits f;
      f.alpha = alpha_label(alpha);
      f.control = fit_rate(hs, gf);
      f.state = fit_rate(hs, gc);
      f.adjoint = RateFit{};
      f.low_r2 = f.control.r2 < 0.98 || f.state.r2 < 0.98;
      result.fits.push_back(f);
    }
  }

  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const CostGapRecord& a, const CostGapRecord& b) {
                     if (a.h != b.h) return a.h < b.h;
                     double aa = a.alpha ? *a.alpha : std::numeric_limits<double>::infinity();
                     double bb = b.alpha ? *b.alpha : std::numeric_limits<double>::infinity();
                     return aa < bb;
                   });
  return result;
}

namespace {

std::string num_cell(double v) { return format_full(v); }

std::string note_or(const std::string& note, double v) {
  return note.empty() ? num_cell(v) : "nan";
}

}  // namespace

CsvTable table_study_h(const std::vector<StudyRecord>& records) {
  CsvTable t;
  t.header = {"h", "alpha", "err_control", "err_state", "err_adjoint", "J", "iters"};
  for (const StudyRecord& r : records)
    t.rows.push_back({num_cell(r.h), alpha_label(r.alpha), note_or(r.note, r.err_control),
                      note_or(r.note, r.err_state), note_or(r.note, r.err_adjoint),
                      note_or(r.note, r.cost), std::to_string(r.iterations)});
  return t;
}

CsvTable table_study_alpha(const std::vector<AlphaRecord>& records) {
  CsvTable t;
  t.header = {"h", "alpha", "err_control", "err_state", "err_adjoint",
              "fix_state", "fix_adjoint", "J", "iters"};
  for (const AlphaRecord& r : records)
    t.rows.push_back({num_cell(r.h), num_cell(r.alpha), note_or(r.note, r.err_control),
                      note_or(r.note, r.err_state), note_or(r.note, r.err_adjoint),
                      note_or(r.note, r.fix_state), note_or(r.note, r.fix_adjoint),
                      note_or(r.note, r.cost), std::to_string(r.iterations)});
  return t;
}

CsvTable table_study_diagonal(const std::vector<DiagonalRecord>& records) {
  CsvTable t;
  t.header = {"k", "n", "h", "alpha", "err_control", "err_state", "err_adjoint", "iters"};
  for (const DiagonalRecord& r : records)
    t.rows.push_back({std::to_string(r.k), std::to_string(r.n), num_cell(r.h), num_cell(r.alpha),
                      note_or(r.note, r.err_control), note_or(r.note, r.err_state),
                      note_or(r.note, r.err_adjoint), std::to_string(r.iterations)});
  return t;
}

CsvTable table_cost_gaps(const std::vector<CostGapRecord>& records) {
  CsvTable t;
  t.header = {"h", "alpha", "j_fine_opt", "j_fine_at_coarse", "j_coarse_opt",
              "j_coarse_at_fine", "gap_fine", "gap_coarse", "gap_cross"};
  for (const CostGapRecord& r : records)
    t.rows.push_back({num_cell(r.h), alpha_label(r.alpha), note_or(r.note, r.j_fine_opt),
                      note_or(r.note, r.j_fine_at_coarse), note_or(r.note, r.j_coarse_opt),
                      note_or(r.note, r.j_coarse_at_fine), note_or(r.note, r.gap_fine),
                      note_or(r.note, r.gap_coarse), note_or(r.note, r.gap_cross)});
  return t;
}

CsvTable table_constants(const StudyConfig& cfg) {
  cfg.validate();
  CsvTable t;
  t.header = {"h", "alpha", "lambda", "lambda1", "lambda_alpha",
              "gamma_norm", "c0", "c0_alpha", "m_min", "m_max"};
  for (int n : cfg.levels) {
    MeshPtr mesh = build_unit_square(n, cfg.gamma1_sides);
    Discretization d(mesh);
    ConstantsReport base = contraction_constants(d, cfg.m1, cfg.m2, std::nullopt);
    for (double alpha : cfg.alphas) {
      double lambda_alpha = base.lambda1 * std::min(1.0, alpha);
      double c0_alpha = c0_formula(lambda_alpha, base.gamma_norm, cfg.m1, cfg.m2);
      t.rows.push_back({num_cell(mesh->h()), num_cell(alpha), num_cell(base.lambda),
                        num_cell(base.lambda1), num_cell(lambda_alpha), num_cell(base.gamma_norm),
                        num_cell(base.c0), num_cell(c0_alpha), num_cell(base.m),
                        num_cell(base.big_m)});
    }
  }
  return t;
}

CsvTable table_bound_audit(const StudyConfig& cfg) {
  cfg.validate();
  CsvTable t;
  t.header = {"alpha", "name", "measured", "bound", "satisfied"};
  MeshPtr mesh = build_unit_square(cfg.audit_n, cfg.gamma1_sides);
  Discretization d(mesh);
  ProblemSpec spec = make_spec(cfg, d);
  FixedPointOptions opts{cfg.fp_tol, cfg.fp_max_iter, std::nullopt};
  for (double alpha : cfg.audit_alphas) {
    BoundAudit audit = audit_uniform_bounds(d, spec, alpha, opts);
    for (const BoundCheck& c : audit.checks)
      t.rows.push_back({num_cell(alpha), c.name, num_cell(c.measured), num_cell(c.bound),
                        c.satisfied ? "1" : "0"});
  }
  return t;
}

}  // namespace ocfem
