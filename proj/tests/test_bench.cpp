#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "layerforge/bench.hpp"

using namespace layerforge;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LAYERFORGE_CLI) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "layerforge_unit";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count(const std::string& haystack, const std::string& needle) {
  int c = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++c;
  return c;
}

}  // namespace

TEST_CASE("preset table") {
  CHECK(exp_layer_count(1) == 2);
  CHECK(exp_layer_count(20) == 8);
  CHECK(exp_layer_count(25) == 8);
  CHECK(exp_layer_count(36) == 10);
  CHECK(exp_layer_count(100) == 16);

  const DiGraph g(36, {{0, 1}, {1, 2}, {2, 3}});
  const PresetParams e1 = preset_params(Preset::kExp1, g);
  CHECK(e1.y == 10);
  CHECK(e1.variant == Variant::kGlpW);
  CHECK(e1.weights.w_len == Rational(1));
  CHECK(e1.weights.w_rev == Rational(30));
  CHECK(e1.weights.w_wid == Rational(1));
  const PresetParams e2 = preset_params(Preset::kExp2, g);
  CHECK(e2.weights.w_wid == Rational(30 * 3 + 3 * 10 + 1));

  const PresetParams m = preset_params(Preset::kMs12, g);
  CHECK(m.y == 36);
  CHECK(m.variant == Variant::kGlpMsStar);
  CHECK(m.weights.w_rev == Rational(36 * 3));
  CHECK(m.weights.w_scl == Rational(36 * 3 * 3 + 3 * 36 + 1));
  CHECK(m.weights.r_w == Rational(1));
  CHECK(m.weights.r_h == Rational(2));
  const PresetParams m21 = preset_params(Preset::kMs21, g);
  CHECK(m21.weights.r_w == Rational(2));
  CHECK(m21.weights.r_h == Rational(1));

  for (Preset p : kAllPresets) CHECK(parse_preset(preset_name(p)) == p);
  CHECK_THROWS(parse_preset("exp3"));
  CHECK(parse_run_family("cgl") == RunFamily::kCgl);
  CHECK_THROWS(parse_run_family("lp"));
}

TEST_CASE("size buckets") {
  CHECK(size_bucket(20) == "|V|<=30");
  CHECK(size_bucket(31) == "31<=|V|<=45");
  CHECK(size_bucket(60) == "46<=|V|<=60");
  CHECK(size_bucket(61) == "|V|>60");
}

TEST_CASE("run records") {
  const DiGraph g = generate_random(GenSpec{8, Rational(3, 2), 3}).graph;
  RunOptions o;
  o.instance = "g8";
  o.preset = "exp1";
  const PresetParams p = preset_params(Preset::kExp1, g);
  o.config.variant = p.variant;
  o.config.weights = p.weights;
  o.config.y = p.y;
  o.config.time_limit = 30;

  for (RunFamily f : {RunFamily::kDirect, RunFamily::kQla, RunFamily::kCgl}) {
    o.family = f;
    const RunRecord a = run_instance(g, o);
    const RunRecord b = run_instance(g, o);
    CHECK(a.result.status == SolveStatus::kOptimal);
    CHECK(record_consistent(g, a));
    auto ja = record_to_json(a);
    auto jb = record_to_json(b);
    CHECK(ja.back().is_number());
    ja.erase("wall_time");
    jb.erase("wall_time");
    CHECK(ja.dump() == jb.dump());
    if (f != RunFamily::kDirect) {
      REQUIRE(a.model_check);
      CHECK(*a.model_check);
    }
    const std::string row = bench_csv_row(a);
    CHECK(count(row, ",") == count(bench_csv_header(), ","));
  }

  RunRecord bad = run_instance(g, o);
  bad.result.objective = *bad.result.objective + Rational(1);
  CHECK_FALSE(record_consistent(g, bad));

  o.family = RunFamily::kCgl;
  o.config.variant = Variant::kGlp;
  const RunRecord unsupported = run_instance(g, o);
  CHECK(unsupported.note.rfind("unsupported", 0) == 0);
  CHECK(bench_csv_row(unsupported).find(",unsupported,") != std::string::npos);
}

TEST_CASE("csv header") {
  CHECK(bench_csv_header() ==
        "instance,vertices,arcs,preset,family,variant,y,status,seconds,nodes,objective,lower_bound,"
        "model_vars,model_cons,model_check");
}

TEST_CASE("summary counts") {
  RunRecord a;
  a.vertices = 20;
  a.preset = "exp1";
  a.result.status = SolveStatus::kOptimal;
  RunRecord b = a;
  b.result.status = SolveStatus::kFeasible;
  RunRecord c = a;
  c.vertices = 50;
  const auto rows = summarize({a, b, c});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bucket == "46<=|V|<=60");
  CHECK(rows[0].runs == 1);
  CHECK(rows[1].runs == 2);
  CHECK(rows[1].solved == 1);
  CHECK(rows[1].timeouts == 1);
}

TEST_CASE("svg drawings") {
  std::ostringstream p3;
  render_svg(DiGraph(3, {{0, 1}, {1, 2}}), Layering{{1, 2, 3}, 3}, p3);
  CHECK(count(p3.str(), "class=\"layer\"") == 3);
  CHECK(count(p3.str(), "class=\"vertex\"") == 3);
  CHECK(count(p3.str(), "class=\"dummy\"") == 0);

  std::ostringstream span;
  render_svg(DiGraph(3, {{0, 1}, {1, 2}, {0, 2}}), Layering{{1, 2, 3}, 3}, span);
  CHECK(count(span.str(), "class=\"dummy\"") == 1);

  std::ostringstream rev;
  render_svg(DiGraph(2, {{0, 1}}), Layering{{2, 1}, 2}, rev);
  CHECK(count(rev.str(), "stroke-dasharray") == 1);
  CHECK(count(rev.str(), "arc reversed") == 1);

  std::ostringstream sink;
  CHECK_THROWS_AS(render_svg(DiGraph(2, {{0, 1}}), Layering{{1, 1}, 2}, sink), InfeasibleLayering);
}

TEST_CASE("command line exit codes") {
  const fs::path path = scratch("p3.txt");
  write_file(path, "n 3\n0 1\n1 2\n");
  const fs::path tri = scratch("tri.txt");
  write_file(tri, "0 1\n1 2\n0 2\n");
  const fs::path layering = scratch("p3.layers");
  write_file(layering, "0 1\n1 2\n2 3\n");
  const fs::path flat = scratch("flat.layers");
  write_file(flat, "0 1\n1 1\n2 2\n");

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") != 0);
  CHECK(run_cli("solve " + path.string() + " --variant GLP --ylayers 3 --wrev 1") == 0);
  CHECK(run_cli("solve " + tri.string() + " --variant GLP --ylayers 2") == 2);
  CHECK(run_cli("solve " + scratch("missing.txt").string() + " --preset exp1") == 1);
  CHECK(run_cli("solve " + path.string() + " --preset exp9") == 1);
  CHECK(run_cli("validate " + path.string() + " " + layering.string() + " --variant GLP --ylayers 3") == 0);
  CHECK(run_cli("validate " + path.string() + " " + flat.string() + " --variant GLP --ylayers 3") == 2);

  const fs::path svg = scratch("p3.svg");
  CHECK(run_cli("render " + path.string() + " " + layering.string() + " -o " + svg.string()) == 0);
  CHECK(slurp(svg).find("<svg") != std::string::npos);

  const fs::path out_dir = scratch("gen");
  fs::remove_all(out_dir);
  CHECK(run_cli("gen 10 3 --seed 7 -o " + out_dir.string()) == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(out_dir)) files += e.path().extension() == ".txt" ? 1 : 0;
  CHECK(files == 3);
  CHECK(fs::exists(out_dir / "manifest.json"));
}
