#include "ocfem/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ocfem/study.hpp"
#include "ocfem/verify.hpp"

namespace ocfem {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void print_fit_line(std::ostream& out, const std::string& what, const SeriesFits& f,
                    bool cost_gaps) {
  char buf[256];
  if (cost_gaps) {
    std::snprintf(buf, sizeof buf, "%s alpha=%s: gap_fine slope %.3f (r2 %.4f), gap_coarse slope %.3f (r2 %.4f)%s",
                  what.c_str(), f.alpha.c_str(), f.control.slope, f.control.r2, f.state.slope,
                  f.state.r2, f.low_r2 ? "  [low r2]" : "");
  } else {
    std::snprintf(buf, sizeof buf,
                  "%s alpha=%s: control slope %.3f (r2 %.4f), state slope %.3f (r2 %.4f), adjoint slope %.3f (r2 %.4f)%s",
                  what.c_str(), f.alpha.c_str(), f.control.slope, f.control.r2, f.state.slope,
                  f.state.r2, f.adjoint.slope, f.adjoint.r2, f.low_r2 ? "  [low r2]" : "");
  }
  out << buf << "\n";
}

void report_csv(std::ostream& out, const std::string& path, std::size_t rows) {
  out << "wrote " << path << " (" << rows << " rows)\n";
}

ControlPair cli_control(const Discretization& d, const std::string& g_field, double g_const,
                        const std::string& q_field, double q_const) {
  FeFunction g = g_field.empty() ? FeFunction::constant(d.mesh(), g_const)
                                 : interpolate(d.mesh(), builtin_field(g_field));
  BoundaryTrace q = BoundaryTrace::zero(d.mesh());
  if (!q_field.empty()) {
    q = project_gamma2(d.mesh(), builtin_field(q_field));
  } else {
    for (double& v : q.values()) v = q_const;
  }
  return {std::move(g), std::move(q)};
}

void write_solution_csv(const std::string& path, const Mesh& mesh, const FeFunction& u) {
  CsvTable t;
  t.header = {"x", "y", "u"};
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Vec2& p = mesh.vertices()[i];
    t.rows.push_back({format_full(p.x), format_full(p.y), format_full(u.values()[i])});
  }
  write_csv(path, t);
}

void write_optimum_csv(const std::string& dir, const Discretization& d, const Optimum& opt) {
  CsvTable t;
  t.header = {"x", "y", "g", "u", "p"};
  const Mesh& mesh = *d.mesh();
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Vec2& p = mesh.vertices()[i];
    t.rows.push_back({format_full(p.x), format_full(p.y), format_full(opt.control.g.values()[i]),
                      format_full(opt.state.values()[i]), format_full(opt.adjoint.values()[i])});
  }
  write_csv(join_path(dir, "optimum.csv"), t);
  CsvTable tq;
  tq.header = {"x", "y", "q"};
  for (std::size_t k = 0; k < opt.control.q.nodes().size(); ++k) {
    const Vec2& p = mesh.vertices()[opt.control.q.nodes()[k]];
    tq.rows.push_back({format_full(p.x), format_full(p.y), format_full(opt.control.q.values()[k])});
  }
  write_csv(join_path(dir, "optimum_q.csv"), tq);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"P1 finite element studies for simultaneous distributed-boundary optimal control"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "key = value config file (defaults built in)");

  int opt_n = 0;
  double opt_alpha = 0.0;
  std::string g_field, q_field, mesh_out, solution_out;
  double g_const = 0.0, q_const = 0.0;

  CLI::App* solve = app.add_subcommand("solve", "solve one state equation, write nodal solution");
  solve->add_option("--n", opt_n, "mesh subdivisions (default: first config level)");
  solve->add_option("--alpha", opt_alpha, "Robin penalty; omit for the Dirichlet variant");
  solve->add_option("--g-field", g_field, "distributed control as builtin field (xy|sinsin|gauss)");
  solve->add_option("--g-const", g_const, "distributed control as a constant");
  solve->add_option("--q-field", q_field, "boundary control as builtin field");
  solve->add_option("--q-const", q_const, "boundary control as a constant");
  solve->add_option("--out", solution_out, "solution csv path (default <output.dir>/solution.csv)");
  solve->add_option("--mesh-out", mesh_out, "also dump the mesh as text");

  CLI::App* optimize = app.add_subcommand("optimize", "run the fixed-point optimizer");
  optimize->add_option("--n", opt_n, "mesh subdivisions (default: last config level)");
  optimize->add_option("--alpha", opt_alpha, "Robin penalty; omit for the Dirichlet variant");

  app.add_subcommand("constants", "estimate coercivity and contraction constants");
  app.add_subcommand("study-h", "h-convergence study against a fine-mesh surrogate");
  app.add_subcommand("study-alpha", "Robin-to-Dirichlet convergence at fixed h");
  app.add_subcommand("study-diagonal", "simultaneous (h, alpha) diagonal study");
  app.add_subcommand("cost-gaps", "optimal-value gap study");
  app.add_subcommand("audit-bounds", "audit the twelve uniform bounds");
  app.add_subcommand("verify", "run the full property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    StudyConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    cfg.validate();

    if (solve->parsed()) {
      int n = opt_n > 0 ? opt_n : cfg.levels.front();
      MeshPtr mesh = build_unit_square(n, cfg.gamma1_sides);
      Discretization d(mesh);
      ProblemSpec spec = make_spec(cfg, d);
      ControlPair ctrl = cli_control(d, g_field, g_const, q_field, q_const);
      FeFunction u = FeFunction::zero(mesh);
      if (solve->count("--alpha")) {
        spec.alpha = opt_alpha;
        u = solve_state_robin(d, spec, ctrl);
      } else {
        u = solve_state_dirichlet(d, spec, ctrl);
      }
      std::string out_path =
          solution_out.empty() ? join_path(cfg.output_dir, "solution.csv") : solution_out;
      write_solution_csv(out_path, *mesh, u);
      report_csv(std::cout, out_path, static_cast<std::size_t>(mesh->num_vertices()));
      if (!mesh_out.empty()) {
        std::ofstream mf(mesh_out);
        if (!mf) throw ValidationError("cannot open output file: " + mesh_out);
        write_mesh(mf, *mesh);
        std::cout << "wrote " << mesh_out << "\n";
      }
      return 0;
    }

    if (optimize->parsed()) {
      int n = opt_n > 0 ? opt_n : cfg.levels.back();
      MeshPtr mesh = build_unit_square(n, cfg.gamma1_sides);
      Discretization d(mesh);
      ProblemSpec spec = make_spec(cfg, d);
      Variant variant = Variant::dirichlet;
      if (optimize->count("--alpha")) {
        spec.alpha = opt_alpha;
        variant = Variant::robin;
      }
      Optimum opt = solve_optimal_fixed_point(d, spec, variant,
                                              {cfg.fp_tol, cfg.fp_max_iter, std::nullopt});
      char buf[256];
      std::snprintf(buf, sizeof buf, "J=%.17g iterations=%d increment=%.3e gradient_residual=%.3e",
                    opt.cost, opt.iterations, opt.final_increment, opt.gradient_residual);
      std::cout << buf << "\n";
      write_optimum_csv(cfg.output_dir, d, opt);
      std::cout << "wrote " << join_path(cfg.output_dir, "optimum.csv") << " and "
                << join_path(cfg.output_dir, "optimum_q.csv") << "\n";
      return 0;
    }

    if (app.get_subcommand("constants")->parsed()) {
      CsvTable t = table_constants(cfg);
      std::string path = join_path(cfg.output_dir, "constants.csv");
      write_csv(path, t);
      report_csv(std::cout, path, t.rows.size());
      return 0;
    }

    if (app.get_subcommand("study-h")->parsed()) {
      HStudyResult r = study_h(cfg);
      CsvTable t = table_study_h(r.records);
      std::string path = join_path(cfg.output_dir, "study_h.csv");
      write_csv(path, t);
      report_csv(std::cout, path, t.rows.size());
      for (const SeriesFits& f : r.fits) print_fit_line(std::cout, "rates", f, false);
      return 0;
    }

    if (app.get_subcommand("study-alpha")->parsed()) {
      std::vector<AlphaRecord> r = study_alpha(cfg);
      CsvTable t = table_study_alpha(r);
      std::string path = join_path(cfg.output_dir, "study_alpha.csv");
      write_csv(path, t);
      report_csv(std::cout, path, t.rows.size());
      return 0;
    }

    if (app.get_subcommand("study-diagonal")->parsed()) {
      std::vector<DiagonalRecord> r = study_diagonal(cfg);
      CsvTable t = table_study_diagonal(r);
      std::string path = join_path(cfg.output_dir, "study_diagonal.csv");
      write_csv(path, t);
      report_csv(std::cout, path, t.rows.size());
      return 0;
    }

    if (app.get_subcommand("cost-gaps")->parsed()) {
      CostGapResult r = study_cost_gaps(cfg);
      CsvTable t = table_cost_gaps(r.records);
      std::string path = join_path(cfg.output_dir, "cost_gaps.csv");
      write_csv(path, t);
      report_csv(std::cout, path, t.rows.size());
      for (const SeriesFits& f : r.fits) print_fit_line(std::cout, "rates", f, true);
      return 0;
    }

    if (app.get_subcommand("audit-bounds")->parsed()) {
      CsvTable t = table_bound_audit(cfg);
      std::string path = join_path(cfg.output_dir, "bound_audit.csv");
      write_csv(path, t);
      report_csv(std::cout, path, t.rows.size());
      bool all = true;
      for (const auto& row : t.rows) all = all && row.back() == "1";
      if (!all) {
        std::cerr << "error: an audited bound is violated\n";
        return 2;
      }
      std::cout << "all audited bounds hold\n";
      return 0;
    }

    if (app.get_subcommand("verify")->parsed())
      return run_verify(cfg, std::cout) ? 0 : 2;

    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ocfem
