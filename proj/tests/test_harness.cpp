#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ocfem/cli.hpp"
#include "ocfem/config.hpp"
#include "ocfem/csv.hpp"
#include "ocfem/errors.hpp"
#include "ocfem/study.hpp"

using namespace ocfem;
namespace fs = std::filesystem;

namespace {

const char* tiny_config_text =
    "# smoke experiment: the target is exactly reachable\n"
    "mesh.levels = 2, 4\n"
    "mesh.gamma1 = bottom, left, right\n"
    "problem.b = 2\n"
    "problem.M1 = 1\n"
    "problem.M2 = 1\n"
    "zd.kind = zero_control_state\n"
    "alpha.list = 1, 10\n"
    "reference.n = 32\n"
    "diagonal.count = 1\n"
    "output.dir = OUTDIR\n";

StudyConfig tiny_config(const std::string& outdir) {
  std::string text = tiny_config_text;
  text.replace(text.find("OUTDIR"), 6, outdir);
  std::istringstream in(text);
  return parse_config(in);
}

fs::path temp_dir(const std::string& leaf) {
  fs::path p = fs::temp_directory_path() / "ocfem_tests" / leaf;
  fs::create_directories(p);
  return p;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"ocfem"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing round trip") {
  std::istringstream in(
      "mesh.levels = 8, 16, 32\n"
      "mesh.gamma1 = bottom, left\n"
      "\n"
      "problem.b = 1.5   # lift value\n"
      "problem.M1 = 2\n"
      "problem.M2 = 0.5\n"
      "zd.kind = field\n"
      "zd.field = sinsin\n"
      "alpha.list = 1, 10, 100\n"
      "reference.n = 128\n"
      "output.dir = out/run1\n"
      "alpha.n = 16\n"
      "audit.alpha = 10, 1000\n"
      "audit.n = 4\n"
      "diagonal.count = 2\n"
      "fp.tol = 1e-9\n"
      "fp.max_iter = 150\n");
  StudyConfig cfg = parse_config(in);
  CHECK(cfg.levels == std::vector<int>{8, 16, 32});
  CHECK(cfg.gamma1_sides == std::set<Side>{Side::bottom, Side::left});
  CHECK(cfg.b == 1.5);
  CHECK(cfg.m1 == 2.0);
  CHECK(cfg.m2 == 0.5);
  CHECK(cfg.zd_kind == "field");
  CHECK(cfg.zd_field == "sinsin");
  CHECK(cfg.alphas == std::vector<double>{1.0, 10.0, 100.0});
  CHECK(cfg.n_ref == 128);
  CHECK(cfg.output_dir == "out/run1");
  CHECK(cfg.alpha_n == 16);
  CHECK(cfg.audit_alphas == std::vector<double>{10.0, 1000.0});
  CHECK(cfg.audit_n == 4);
  CHECK(cfg.diagonal_count == 2);
  CHECK(cfg.fp_tol == 1e-9);
  CHECK(cfg.fp_max_iter == 150);
}

TEST_CASE("config parser rejects malformed input") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  std::string base = tiny_config_text;

  // a required key is missing
  std::string missing = base;
  missing.erase(missing.find("reference.n = 32\n"), 17);
  CHECK_THROWS_WITH(parse(missing), Catch::Matchers::ContainsSubstring("reference.n"));

  CHECK_THROWS_WITH(parse(base + "nosuch.key = 1\n"),
                    Catch::Matchers::ContainsSubstring("nosuch.key"));
  CHECK_THROWS_WITH(parse(base + "problem.b = 3\n"),
                    Catch::Matchers::ContainsSubstring("repeated"));
  CHECK_THROWS_AS(parse(base + "fp.tol = abc\n"), ValidationError);
  CHECK_THROWS_WITH(parse(base + "fp.tol\n"), Catch::Matchers::ContainsSubstring("line"));

  // kind-specific requirements
  std::string field_kind = base;
  field_kind.replace(field_kind.find("zero_control_state"), 18, "field");
  CHECK_THROWS_WITH(parse(field_kind), Catch::Matchers::ContainsSubstring("zd.field"));
}

TEST_CASE("config validation rules") {
  StudyConfig cfg = default_config();
  CHECK_NOTHROW(cfg.validate());

  StudyConfig bad = cfg;
  bad.levels = {8, 8};
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = cfg;
  bad.gamma1_sides = {Side::bottom, Side::top, Side::left, Side::right};
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = cfg;
  bad.gamma1_sides.clear();
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = cfg;
  bad.alphas = {0.5, 10.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = cfg;
  bad.alphas = {10.0, 10.0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = cfg;
  bad.n_ref = 4 * bad.levels.back() - 1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = cfg;
  bad.m2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = cfg;
  bad.zd_kind = "mystery";
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = cfg;
  bad.output_dir.clear();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("builtin fields and desired states") {
  CHECK(builtin_field("xy")(0.25, 0.5) == 0.125);
  CHECK(builtin_field("sinsin")(0.5, 0.5) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(builtin_field("nope"), ValidationError);

  StudyConfig cfg = tiny_config("unused");
  MeshPtr mesh = build_unit_square(4, cfg.gamma1_sides);
  Discretization d(mesh);
  FeFunction zd = make_zd(cfg, d);
  for (double v : zd.values()) CHECK(v == 2.0);

  StudyConfig cc = cfg;
  cc.zd_kind = "constant";
  cc.zd_value = -3.0;
  FeFunction zc = make_zd(cc, d);
  for (double v : zc.values()) CHECK(v == -3.0);
}

TEST_CASE("csv rendering is exact and deterministic") {
  CHECK(format_full(0.1) == "0.10000000000000001");
  CHECK(format_full(1.0) == "1");

  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"1", format_full(1.0 / 3.0)}, {"2", "nan"}};
  std::string r1 = render_csv(t);
  std::string r2 = render_csv(t);
  CHECK(r1 == r2);
  CHECK(r1 == "a,b\n1,0.33333333333333331\n2,nan\n");

  CsvTable bad = t;
  bad.rows.push_back({"only-one"});
  CHECK_THROWS_AS(render_csv(bad), ValidationError);

  fs::path dir = temp_dir("csv");
  fs::path nested = dir / "deep" / "table.csv";
  write_csv(nested.string(), t);
  CHECK(slurp(nested) == r1);
}

TEST_CASE("study on an exactly reachable target") {
  StudyConfig cfg = tiny_config(temp_dir("smoke").string());

  HStudyResult r = study_h(cfg);
  // two levels, three series: alpha 1, alpha 10, dirichlet
  REQUIRE(r.records.size() == 6);
  for (const StudyRecord& rec : r.records) {
    INFO("h " << rec.h << " alpha " << (rec.alpha ? *rec.alpha : -1.0));
    CHECK(rec.note.empty());
    CHECK(rec.err_control <= 1e-8);
    CHECK(rec.err_state <= 1e-8);
    CHECK(rec.err_adjoint <= 1e-8);
    CHECK(rec.cost <= 1e-18);
  }
  // rows come sorted by h, the dirichlet series last within a level
  for (std::size_t i = 1; i < r.records.size(); ++i)
    CHECK(r.records[i - 1].h <= r.records[i].h);
  CHECK(r.records[0].h == r.records[2].h);
  CHECK_FALSE(r.records[2].alpha.has_value());
  CHECK(r.records[0].alpha == 1.0);
  CHECK(r.records[1].alpha == 10.0);

  // determinism: a rerun renders to identical bytes
  HStudyResult r2 = study_h(cfg);
  CHECK(render_csv(table_study_h(r.records)) == render_csv(table_study_h(r2.records)));

  std::vector<AlphaRecord> ar = study_alpha(cfg);
  REQUIRE(ar.size() == 2);
  CHECK(ar[0].alpha == 1.0);
  CHECK(ar[1].alpha == 10.0);
  for (const AlphaRecord& rec : ar) {
    CHECK(rec.note.empty());
    CHECK(rec.err_control <= 1e-8);
    CHECK(rec.fix_state <= 1e-8);
    CHECK(rec.fix_adjoint <= 1e-8);
  }

  std::vector<DiagonalRecord> dr = study_diagonal(cfg);
  REQUIRE(dr.size() == 1);
  CHECK(dr[0].n == 8);
  CHECK(dr[0].alpha == 10.0);
  CHECK(dr[0].err_control <= 1e-8);

  CostGapResult cg = study_cost_gaps(cfg);
  REQUIRE(cg.records.size() == 6);
  for (const CostGapRecord& rec : cg.records) {
    CHECK(rec.note.empty());
    CHECK(std::abs(rec.gap_fine) <= 1e-16);
    CHECK(std::abs(rec.gap_coarse) <= 1e-16);
  }
}

TEST_CASE("study table headers") {
  CHECK(render_csv(table_study_h({})) == "h,alpha,err_control,err_state,err_adjoint,J,iters\n");
  CHECK(render_csv(table_study_alpha({})) ==
        "h,alpha,err_control,err_state,err_adjoint,fix_state,fix_adjoint,J,iters\n");
  CHECK(render_csv(table_study_diagonal({})) ==
        "k,n,h,alpha,err_control,err_state,err_adjoint,iters\n");
  CHECK(render_csv(table_cost_gaps({})) ==
        "h,alpha,j_fine_opt,j_fine_at_coarse,j_coarse_opt,j_coarse_at_fine,gap_fine,"
        "gap_coarse,gap_cross\n");

  StudyRecord rec;
  rec.h = 0.5;
  rec.alpha = std::nullopt;
  std::string rendered = render_csv(table_study_h({rec}));
  CHECK(rendered.find(",inf,") != std::string::npos);
}

TEST_CASE("cli entry point") {
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli({"no-such-command"}) == 1);
  CHECK(run_cli({"-c", "/no/such/file.cfg", "constants"}) == 1);

  fs::path dir = temp_dir("cli");
  fs::path cfg_path = dir / "study.cfg";
  {
    std::string text = tiny_config_text;
    text.replace(text.find("OUTDIR"), 6, (dir / "out").string());
    std::ofstream out(cfg_path);
    out << text;
  }

  CHECK(run_cli({"-c", cfg_path.string(), "study-h"}) == 0);
  fs::path csv = dir / "out" / "study_h.csv";
  REQUIRE(fs::exists(csv));
  std::string first = slurp(csv);
  CHECK(first.rfind("h,alpha,err_control,err_state,err_adjoint,J,iters\n", 0) == 0);

  // byte identical on a rerun
  CHECK(run_cli({"-c", cfg_path.string(), "study-h"}) == 0);
  CHECK(slurp(csv) == first);

  CHECK(run_cli({"-c", cfg_path.string(), "verify"}) == 0);
  CHECK(run_cli({"-c", cfg_path.string(), "audit-bounds"}) == 0);
  REQUIRE(fs::exists(dir / "out" / "bound_audit.csv"));
}
