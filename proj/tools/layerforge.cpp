// layerforge command-line tool: instance generation, model export, solving,
// validation, benchmarking and rendering of graph layerings.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "layerforge/bench.hpp"
#include "layerforge/graph.hpp"
#include "layerforge/layering.hpp"
#include "layerforge/model.hpp"
#include "layerforge/solver.hpp"

namespace fs = std::filesystem;
using namespace layerforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTimeout = 3;

// Shared weight / layer / variant flags. Presets fill in everything first;
// explicit flags then override single fields.
struct WeightFlags {
  std::string preset;
  std::string variant;
  std::string wlen, wrev, wwid, wscl, rw, rh;
  int ylayers = 0;

  void attach(CLI::App* app) {
    app->add_option("--preset", preset, "exp1, exp2, ms_1_2, ms_1_1 or ms_2_1");
    app->add_option("--variant", variant, "DLP, DLP_W, GLP, GLP_W, GLP_MS, GLP_MS_STAR");
    app->add_option("--wlen", wlen, "length weight (rational)");
    app->add_option("--wrev", wrev, "reversal weight (rational)");
    app->add_option("--wwid", wwid, "width weight (rational)");
    app->add_option("--wscl", wscl, "scaling weight (rational)");
    app->add_option("--rw", rw, "target area width (rational)");
    app->add_option("--rh", rh, "target area height (rational)");
    app->add_option("--ylayers", ylayers, "layer bound Y");
  }

  // Returns (Y, variant, weights, preset label).
  std::tuple<int, Variant, WeightScheme, std::string> resolve(const DiGraph& g) const {
    int y = g.num_vertices() > 0 ? g.num_vertices() : 1;
    Variant v = Variant::kGlp;
    WeightScheme w;
    std::string label = "custom";
    if (!preset.empty()) {
      const Preset p = parse_preset(preset);
      const PresetParams params = preset_params(p, g);
      y = params.y;
      v = params.variant;
      w = params.weights;
      label = std::string(preset_name(p));
    }
    if (!variant.empty()) v = parse_variant(variant);
    if (!wlen.empty()) w.w_len = parse_rational(wlen);
    if (!wrev.empty()) w.w_rev = parse_rational(wrev);
    if (!wwid.empty()) w.w_wid = parse_rational(wwid);
    if (!wscl.empty()) w.w_scl = parse_rational(wscl);
    if (!rw.empty()) w.r_w = parse_rational(rw);
    if (!rh.empty()) w.r_h = parse_rational(rh);
    if (ylayers > 0) y = ylayers;
    w.validate();
    return {y, v, w, label};
  }
};

double default_time_limit() {
  if (const char* env = std::getenv("LAYERFORGE_TIME_LIMIT")) {
    try {
      double value = std::stod(env);
      if (value > 0) return value;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid LAYERFORGE_TIME_LIMIT='" << env << "'\n";
  }
  return 1800.0;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
    case SolveStatus::kFeasible: return kExitOk;
    case SolveStatus::kInfeasible: return kExitInfeasible;
    case SolveStatus::kTimeout: return kExitTimeout;
  }
  return kExitError;
}

Layering read_layering_file(const std::string& path, const DiGraph& g, int y) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_layering(in, g.num_vertices(), y);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layerforge: exact graph layering (GLP, GLP-W, GLP-MS*) and MIP model export"};
  app.require_subcommand(1);
  int exit_code = kExitOk;

  // gen ----------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate random acyclic instances");
  int gen_n = 20;
  int gen_count = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  std::string gen_density = "3/2";
  gen->add_option("n", gen_n, "vertices before isolated-vertex removal")->required();
  gen->add_option("count", gen_count, "number of instances")->required();
  gen->add_option("--seed", gen_seed, "base seed; instance i uses seed + i");
  gen->add_option("--out-dir,-o", gen_out, "output directory");
  gen->add_option("--density", gen_density, "arcs per vertex (rational)");
  gen->callback([&] {
    fs::create_directories(gen_out);
    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
    for (int i = 0; i < gen_count; ++i) {
      GenSpec spec{gen_n, parse_rational(gen_density), gen_seed + static_cast<std::uint64_t>(i)};
      GeneratedGraph gg = generate_random(spec);
      std::ostringstream name;
      name << "rand_n" << gen_n << '_' << std::setw(4) << std::setfill('0') << i << ".txt";
      auto out = open_out((fs::path(gen_out) / name.str()).string());
      out << "# generated: n_target " << gen_n << " density " << to_string(spec.density_factor) << " seed "
          << spec.seed << '\n';
      write_edge_list(gg.graph, out);
      manifest.push_back({{"file", name.str()},
                          {"seed", spec.seed},
                          {"n_target", gen_n},
                          {"density", to_string(spec.density_factor)},
                          {"vertices", gg.graph.num_vertices()},
                          {"arcs", gg.graph.num_arcs()}});
    }
    auto out = open_out((fs::path(gen_out) / "manifest.json").string());
    out << manifest.dump(2) << '\n';
    std::cout << "wrote " << gen_count << " instances to " << gen_out << '\n';
  });

  // build --------------------------------------------------------------------
  auto* build = app.add_subcommand("build", "write a QLA or CGL model in LP format");
  std::string build_graph;
  std::string build_family = "qla";
  std::string build_out;
  bool build_first_layer = false;
  WeightFlags build_w;
  build->add_option("graph", build_graph, "edge-list or DOT file")->required();
  build->add_option("--family", build_family, "qla or cgl");
  build->add_option("--out,-o", build_out, "LP file to write")->required();
  build->add_flag("--first-layer", build_first_layer, "CGL: require an occupied first layer");
  build_w.attach(build);
  build->callback([&] {
    const DiGraph g = read_graph_file(build_graph);
    auto [y, variant, weights, label] = build_w.resolve(g);
    const Family family = parse_family(build_family);
    ModelIR model;
    ModelCounts expected;
    if (family == Family::kQla) {
      model = build_qla(g, y, variant, weights).model;
      expected = qla_expected_counts(g.num_vertices(), g.num_arcs(), y, variant);
    } else {
      model = build_cgl(g, y, variant, weights, build_first_layer).model;
      expected = cgl_expected_counts(g.num_vertices(), g.num_arcs(), y, variant, build_first_layer);
    }
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
    auto out = open_out(build_out);
    write_lp(model, out);
    std::cout << family_name(family) << ' ' << variant_name(variant) << " Y=" << y << " |V|=" << g.num_vertices()
              << " |A|=" << g.num_arcs() << '\n'
              << "variables " << model.num_variables() << " (closed form " << expected.variables << ")\n"
              << "constraints " << model.num_constraints() << " (closed form " << expected.constraints << ")\n"
              << "fixings " << model.fixings().size() << '\n'
              << "objective scale " << lp_objective_scale(model) << '\n';
  });

  // solve --------------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "solve exactly and print a JSON run record");
  std::string solve_graph;
  std::string solve_family = "direct";
  std::string solve_order = "connected";
  double solve_limit = default_time_limit();
  WeightFlags solve_w;
  solve->add_option("graph", solve_graph, "edge-list or DOT file")->required();
  solve->add_option("--family", solve_family, "direct, qla or cgl (model families also verify the model)");
  solve->add_option("--branch-order", solve_order, "connected, id or degree_desc");
  solve->add_option("--time-limit", solve_limit, "seconds (default 1800 or $LAYERFORGE_TIME_LIMIT)");
  solve_w.attach(solve);
  solve->callback([&] {
    const DiGraph g = read_graph_file(solve_graph);
    auto [y, variant, weights, label] = solve_w.resolve(g);
    RunOptions o;
    o.instance = fs::path(solve_graph).filename().string();
    o.preset = label;
    o.family = parse_run_family(solve_family);
    o.config.y = y;
    o.config.variant = variant;
    o.config.weights = weights;
    o.config.time_limit = solve_limit;
    o.config.branch_order = parse_branch_order(solve_order);
    RunRecord r = run_instance(g, o);
    std::cout << record_to_json(r).dump(2) << '\n';
    exit_code = r.note.rfind("unsupported", 0) == 0 ? kExitError : exit_for(r.result.status);
  });

  // validate -----------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "check a layering and report its metrics");
  std::string val_graph;
  std::string val_layering;
  WeightFlags val_w;
  validate->add_option("graph", val_graph)->required();
  validate->add_option("layering", val_layering, "'vertex layer' lines")->required();
  val_w.attach(validate);
  validate->callback([&] {
    const DiGraph g = read_graph_file(val_graph);
    auto [y, variant, weights, label] = val_w.resolve(g);
    Layering l = read_layering_file(val_layering, g, val_w.ylayers > 0 ? y : 0);
    nlohmann::ordered_json j;
    j["variant"] = std::string(variant_name(variant));
    const bool feasible = check_feasible(g, l, variant);
    j["feasible"] = feasible;
    if (check_feasible(g, l, Variant::kGlp)) {
      Metrics m = evaluate(g, l, weights);
      auto mj = metrics_to_json(m);
      if (feasible) mj["objective"] = to_string(objective(m, weights, variant));
      j["metrics"] = std::move(mj);
    }
    std::cout << j.dump(2) << '\n';
    exit_code = feasible ? kExitOk : kExitInfeasible;
  });

  // check-solution -----------------------------------------------------------
  auto* check = app.add_subcommand("check-solution", "decode and verify an external solver's solution file");
  std::string chk_family;
  std::string chk_graph;
  std::string chk_solution;
  bool chk_first_layer = false;
  WeightFlags chk_w;
  check->add_option("family", chk_family, "qla or cgl")->required();
  check->add_option("graph", chk_graph)->required();
  check->add_option("solution", chk_solution, "'name value' lines")->required();
  check->add_flag("--first-layer", chk_first_layer, "CGL model was built with --first-layer");
  chk_w.attach(check);
  check->callback([&] {
    const DiGraph g = read_graph_file(chk_graph);
    auto [y, variant, weights, label] = chk_w.resolve(g);
    std::ifstream in(chk_solution);
    if (!in) throw std::runtime_error("cannot open " + chk_solution);
    nlohmann::ordered_json j;
    Layering l;
    Rational model_value;
    Rational canonical_value;
    std::vector<std::string> issues;
    auto verify = [&](const auto& built) {
      Assignment point = read_solution(in, built.model);
      issues = violations(point, built.model);
      l = decode_assignment(point, built.index);
      model_value = model_objective_at(point, built.model);
      Assignment canonical = encode_layering(g, l, built.index, weights);
      canonical_value = model_objective_at(canonical, built.model);
    };
    if (parse_family(chk_family) == Family::kQla) {
      verify(build_qla(g, y, variant, weights));
    } else {
      verify(build_cgl(g, y, variant, weights, chk_first_layer));
    }
    const Metrics m = evaluate(g, l, weights);
    const Rational evaluator_value = objective(m, weights, variant);
    j["layering"] = l.layer;
    j["point_violations"] = issues;
    j["model_objective"] = to_string(model_value);
    j["canonical_model_objective"] = to_string(canonical_value);
    j["evaluator_objective"] = to_string(evaluator_value);
    j["mismatch"] = to_string(model_value - evaluator_value);
    j["metrics"] = metrics_to_json(m);
    const bool ok = issues.empty() && canonical_value == evaluator_value && model_value == evaluator_value;
    j["verdict"] = ok ? "ok" : "mismatch";
    std::cout << j.dump(2) << '\n';
    exit_code = ok ? kExitOk : kExitInfeasible;
  });

  // bench --------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "run presets over a corpus and write CSV");
  std::string bench_dir;
  std::vector<std::string> bench_presets{"exp1", "exp2"};
  std::vector<std::string> bench_families{"direct"};
  double bench_limit = default_time_limit();
  std::string bench_out = "bench.csv";
  int bench_threads = 1;
  bench->add_option("corpus", bench_dir, "directory of edge-list / DOT files")->required();
  bench->add_option("--presets", bench_presets, "preset names")->delimiter(',');
  bench->add_option("--families", bench_families, "direct, qla, cgl")->delimiter(',');
  bench->add_option("--time-limit", bench_limit, "seconds per run");
  bench->add_option("--out,-o", bench_out, "CSV file");
  bench->add_option("--threads", bench_threads, "instance-parallel workers");
  bench->callback([&] {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(bench_dir)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".txt" || ext == ".el" || ext == ".dot" || ext == ".gv")) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    struct Job {
      std::size_t file;
      std::string preset;
      std::string family;
    };
    std::vector<Job> jobs;
    for (std::size_t f = 0; f < files.size(); ++f) {
      for (const auto& p : bench_presets) {
        for (const auto& fam : bench_families) jobs.push_back({f, p, fam});
      }
    }
    std::vector<RunRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;
    auto worker = [&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          const Job& job = jobs[i];
          const DiGraph g = read_graph_file(files[job.file].string());
          const PresetParams params = preset_params(parse_preset(job.preset), g);
          RunOptions o;
          o.instance = files[job.file].filename().string();
          o.preset = job.preset;
          o.family = parse_run_family(job.family);
          o.config.y = params.y;
          o.config.variant = params.variant;
          o.config.weights = params.weights;
          o.config.time_limit = bench_limit;
          records[i] = run_instance(g, o);
        } catch (const std::exception& e) {
          std::lock_guard lock(err_mutex);
          if (first_error.empty()) first_error = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::max(1, bench_threads); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);

    auto out = open_out(bench_out);
    out << bench_csv_header() << '\n';
    for (const auto& r : records) out << bench_csv_row(r) << '\n';
    std::cout << "bucket,preset,family,runs,solved,timeouts\n";
    for (const auto& row : summarize(records)) {
      std::cout << row.bucket << ',' << row.preset << ',' << row.family << ',' << row.runs << ',' << row.solved
                << ',' << row.timeouts << '\n';
    }
  });

  // render -------------------------------------------------------------------
  auto* render = app.add_subcommand("render", "draw a layering as SVG");
  std::string ren_graph;
  std::string ren_layering;
  std::string ren_out;
  render->add_option("graph", ren_graph)->required();
  render->add_option("layering", ren_layering)->required();
  render->add_option("--out,-o", ren_out, "SVG file")->required();
  render->callback([&] {
    const DiGraph g = read_graph_file(ren_graph);
    Layering l = read_layering_file(ren_layering, g, 0);
    auto out = open_out(ren_out);
    render_svg(g, l, out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const InfeasibleLayering& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return exit_code;
}
