// Acceptance runner: one PASS/FAIL line per criterion.
// Usage: acceptance [--only N] [--cli PATH]
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "layerforge/bench.hpp"
#include "oracle.hpp"

using namespace layerforge;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string cli_path;

DiGraph grid_graph(int n, int m) {
  std::vector<Arc> arcs;
  for (int i = 0; i < m; ++i) arcs.push_back({i % n, (i % n + 1 + i / n % (n - 1)) % n});
  return DiGraph(n, arcs);
}

// ---------------------------------------------------------------------------

Outcome model_sizes() {
  const auto start = Clock::now();
  int cases = 0;
  int qla_cons_bad = 0;
  int qla_vars_bad = 0;
  int cgl_bad = 0;
  std::string first_var_miss;
  for (int n : {3, 5, 8}) {
    for (int m : {2, 6, 12}) {
      for (int y : {3, 4, 6}) {
        ++cases;
        const DiGraph g = grid_graph(n, m);
        WeightScheme w;
        const QlaModel q = build_qla(g, y, Variant::kGlp, w);
        if (q.model.num_constraints() != 2 * m * y + n) ++qla_cons_bad;
        const long long stated_vars = static_cast<long long>(n) * y + static_cast<long long>(m) * (y - 1) * (y - 1);
        if (q.model.num_variables() != stated_vars) {
          ++qla_vars_bad;
          if (first_var_miss.empty()) {
            first_var_miss = "e.g. (|V|,|A|,Y)=(" + std::to_string(n) + "," + std::to_string(m) + "," +
                             std::to_string(y) + "): built " + std::to_string(q.model.num_variables()) +
                             ", formula " + std::to_string(stated_vars);
          }
        }
        const long long cgl_w = static_cast<long long>(4 * m + n + 1) * (y - 2) + 4 * m + 2;
        const CglModel cw = build_cgl(g, y, Variant::kGlpW, w);
        const CglModel cs = build_cgl(g, y, Variant::kGlpMsStar, w);
        if (cw.model.num_constraints() != cgl_w || cs.model.num_constraints() != cgl_w + n) ++cgl_bad;
      }
    }
  }
  const double t = since(start);
  Outcome o;
  o.pass = qla_cons_bad == 0 && qla_vars_bad == 0 && cgl_bad == 0 && t < 1.0;
  std::ostringstream d;
  d << cases << " grid points; QLA constraint mismatches " << qla_cons_bad << ", QLA variable mismatches "
    << qla_vars_bad << ", CGL mismatches " << cgl_bad << "; " << t << " s";
  if (!first_var_miss.empty()) {
    d << "; variable formula |V|Y+|A|(Y-1)^2 disagrees with the |A|Y(Y-1) off-diagonal products (" << first_var_miss
      << ")";
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  int infeasible = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int y = 1 + static_cast<int>(rng() % 4);
    const int m = n < 2 ? 0 : static_cast<int>(rng() % 10);
    const DiGraph g = rng() % 2 == 0 ? oracle::random_dag(rng, n, m) : oracle::random_graph(rng, n, m);
    const Preset preset = i % 2 == 0 ? Preset::kExp1 : Preset::kExp2;
    SolveConfig c;
    c.variant = kAllVariants[static_cast<std::size_t>(i / 2 % 6)];
    c.y = y;
    c.weights = preset_params(preset, g).weights;
    if (has_scale_term(c.variant)) {
      // The exp presets carry no scaling weight; borrow the MS one.
      c.weights.w_scl = preset_params(Preset::kMs12, g).weights.w_scl;
      c.weights.r_w = 1;
      c.weights.r_h = 2;
    }
    c.time_limit = 60;
    const SolveResult bf = brute_force(g, c);
    const SolveResult bb = branch_and_bound(g, c);
    const bool same = bf.objective.has_value() == bb.objective.has_value() &&
                      (!bf.objective || *bf.objective == *bb.objective) && bb.status != SolveStatus::kFeasible;
    if (!same) ++mismatches;
    if (!bf.objective) ++infeasible;
  }
  const double t = since(start);
  Outcome o;
  o.pass = mismatches == 0 && t < 300;
  o.detail = "200 instances, " + std::to_string(mismatches) + " mismatches (" + std::to_string(infeasible) +
             " infeasible), " + std::to_string(t) + " s";
  return o;
}

// ---------------------------------------------------------------------------

Outcome encode_agreement() {
  std::mt19937_64 rng(77);
  int failures = 0;
  int checks = 0;
  for (int i = 0; i < 500; ++i) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const int y = 3 + static_cast<int>(rng() % 3);
    const DiGraph g = oracle::random_graph(rng, n, static_cast<int>(rng() % 9));
    const int colours = oracle::chromatic_number(g);
    const int yy = std::max(y, colours);
    const Layering l{oracle::random_feasible_layering(rng, g, yy), yy};
    WeightScheme w{oracle::random_weight(rng), oracle::random_weight(rng), oracle::random_weight(rng),
                   oracle::random_weight(rng), oracle::random_positive(rng), oracle::random_positive(rng)};
    const Metrics metrics = evaluate(g, l, w);
    auto check = [&](const ModelIR& model, const Assignment& point, Variant v) {
      ++checks;
      const bool ok = violations(point, model).empty() && model_objective_at(point, model) == objective(metrics, w, v);
      if (!ok) ++failures;
    };
    for (Variant v : {Variant::kGlp, Variant::kGlpW, Variant::kGlpMsStar}) {
      const QlaModel q = build_qla(g, yy, v, w);
      check(q.model, encode_layering(g, l, q.index, w), v);
    }
    for (Variant v : {Variant::kGlpW, Variant::kGlpMsStar}) {
      const CglModel c = build_cgl(g, yy, v, w);
      check(c.model, encode_layering(g, l, c.index, w), v);
    }
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = "500 pairs, " + std::to_string(checks) + " model checks, " + std::to_string(failures) + " failures";
  return o;
}

// ---------------------------------------------------------------------------

// With x fixed, the linking rows of one arc form a transportation system whose
// matrix is totally unimodular, so the feasible p-set (inside [0,1]) is a
// single point exactly when it holds exactly one 0/1 point.
Outcome linearization() {
  const std::vector<DiGraph> graphs{DiGraph(2, {{0, 1}}), DiGraph(2, {{0, 1}, {1, 0}}),
                                    DiGraph(3, {{0, 1}, {1, 2}}), DiGraph(3, {{0, 1}, {1, 2}, {0, 2}}),
                                    DiGraph(3, {{0, 1}, {1, 2}, {2, 0}}), DiGraph(3, {{0, 1}, {0, 1}, {2, 1}})};
  const int y = 3;
  long long feasible_x = 0;
  long long bad = 0;
  long long clash = 0;
  for (const DiGraph& g : graphs) {
    const QlaModel q = build_qla(g, y, Variant::kGlp, WeightScheme{});
    const ModelIR& model = q.model;
    const int n = g.num_vertices();
    std::vector<int> link_rows;
    for (int r = 0; r < model.num_constraints(); ++r) {
      if (model.constraints()[static_cast<std::size_t>(r)].name.rfind("lin_", 0) == 0) link_rows.push_back(r);
    }
    const int bits = n * y;
    for (int mask = 0; mask < (1 << bits); ++mask) {
      std::vector<int> xval(static_cast<std::size_t>(bits));
      for (int b = 0; b < bits; ++b) xval[static_cast<std::size_t>(b)] = (mask >> b) & 1;
      auto x_at = [&](int v, int k) { return xval[static_cast<std::size_t>(v * y + k - 1)]; };
      bool one_hot = true;
      std::vector<int> layer(static_cast<std::size_t>(n), 0);
      for (int v = 0; v < n; ++v) {
        int ones = 0;
        for (int k = 1; k <= y; ++k) {
          if (x_at(v, k) == 1) {
            ++ones;
            layer[static_cast<std::size_t>(v)] = k;
          }
        }
        one_hot = one_hot && ones == 1;
      }
      if (!one_hot) continue;  // excluded by the assignment rows
      ++feasible_x;
      for (int a = 0; a < g.num_arcs(); ++a) {
        std::vector<std::pair<int, int>> cells;
        for (int k = 1; k <= y; ++k) {
          for (int l = 1; l <= y; ++l) {
            if (k != l) cells.push_back({k, l});
          }
        }
        Assignment point(static_cast<std::size_t>(model.num_variables()), Rational(0));
        for (int v = 0; v < n; ++v) {
          for (int k = 1; k <= y; ++k) point[static_cast<std::size_t>(q.index.x_var(v, k))] = Rational(x_at(v, k));
        }
        int solutions = 0;
        bool outer = false;
        for (int pm = 0; pm < (1 << cells.size()); ++pm) {
          for (std::size_t c = 0; c < cells.size(); ++c) {
            point[static_cast<std::size_t>(q.index.p_var(a, cells[c].first, cells[c].second))] =
                Rational((pm >> c) & 1);
          }
          bool ok = true;
          for (int r : link_rows) {
            const Constraint& row = model.constraints()[static_cast<std::size_t>(r)];
            bool touches = false;
            Rational lhs(0);
            for (const Term& t : row.terms) {
              lhs += t.coef * *point[static_cast<std::size_t>(t.var)];
              for (const auto& [k, l] : cells) touches = touches || t.var == q.index.p_var(a, k, l);
            }
            if (touches && lhs != row.rhs) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          ++solutions;
          outer = true;
          for (const auto& [k, l] : cells) {
            const int expected = x_at(g.arc(a).tail, k) * x_at(g.arc(a).head, l);
            outer = outer && *point[static_cast<std::size_t>(q.index.p_var(a, k, l))] == Rational(expected);
          }
        }
        const bool same_layer = layer[static_cast<std::size_t>(g.arc(a).tail)] ==
                                layer[static_cast<std::size_t>(g.arc(a).head)];
        if (same_layer) {
          // Only the undeclared diagonal product could link them.
          if (solutions != 0) ++bad;
          ++clash;
        } else if (solutions != 1 || !outer) {
          ++bad;
        }
      }
    }
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = std::to_string(graphs.size()) + " graphs, " + std::to_string(feasible_x) + " one-hot x, " +
             std::to_string(bad) + " arcs without a unique outer-product p (" + std::to_string(clash) +
             " same-layer arcs correctly left without any p)";
  return o;
}

// ---------------------------------------------------------------------------

Outcome scaling_identities() {
  int points = 0;
  int bad = 0;
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      const Rational rw(i, 1 + j % 3);
      const Rational rh(j * 2 + 1, 2 + i % 4);
      ++points;
      const long long width = 1 + (i * 7 + j) % 9;
      const long long height = 1 + (i + j * 5) % 11;
      const Rational s = scale_factor(width, height, rw, rh);
      const Rational sbar = inverse_scale_factor(width, height, rw, rh);
      const Rational s_def = std::min(rw / Rational(width), rh / Rational(height));
      const Rational sbar_def = std::max(Rational(width) / rw, Rational(height) / rh);
      const Area a = normalize_area(rw, rh);
      const bool ok = s == s_def && sbar == sbar_def && s * sbar == Rational(1) &&
                      std::min(a.r_w, a.r_h) == Rational(1) && a.r_w * rh == a.r_h * rw;
      if (!ok) ++bad;
    }
  }
  Outcome o;
  o.pass = bad == 0 && points == 100;
  o.detail = std::to_string(points) + " grid points, " + std::to_string(bad) + " violations";
  return o;
}

// ---------------------------------------------------------------------------

Outcome shape_pattern() {
  const double limit = 20.0;
  int pattern = 0;
  int proven = 0;
  std::ostringstream d;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DiGraph g = generate_random(GenSpec{20, Rational(3, 2), seed}).graph;
    std::vector<long long> width;
    std::vector<int> height;
    int seed_proven = 0;
    for (Preset p : {Preset::kMs12, Preset::kMs11, Preset::kMs21}) {
      const PresetParams params = preset_params(p, g);
      SolveConfig c;
      c.variant = params.variant;
      c.weights = params.weights;
      c.y = params.y;
      c.time_limit = limit;
      const SolveResult r = solve_with_restarts(g, c);
      if (!r.best) {
        width.push_back(-1);
        height.push_back(-1);
        continue;
      }
      if (r.status == SolveStatus::kOptimal) ++seed_proven;
      const Metrics m = evaluate(g, *r.best, c.weights);
      width.push_back(m.width);
      height.push_back(m.height);
    }
    const bool ok = width[0] > 0 && width[1] > 0 && width[2] > 0 && width[0] <= width[1] && width[1] <= width[2] &&
                    height[0] >= height[1] && height[1] >= height[2];
    pattern += ok ? 1 : 0;
    proven += seed_proven;
    d << " s" << seed << "=" << width[0] << "x" << height[0] << "/" << width[1] << "x" << height[1] << "/"
      << width[2] << "x" << height[2] << (ok ? "" : "!");
  }
  Outcome o;
  o.pass = pattern >= 8;
  o.detail = std::to_string(pattern) + "/10 seeds show the pattern (WxH for 1:2/1:1/2:1;" + d.str() + "); " +
             std::to_string(proven) + "/30 solves proven optimal within " + std::to_string(static_cast<int>(limit)) +
             " s each";
  return o;
}

// ---------------------------------------------------------------------------

Outcome generator() {
  int bad = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const GeneratedGraph gg = generate_random(GenSpec{20, Rational(3, 2), seed});
    if (gg.arcs_drawn != 30 || !is_acyclic(gg.graph) || gg.graph.num_arcs() != 30) ++bad;
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = "1000 seeds, " + std::to_string(bad) + " non-conforming";
  return o;
}

// ---------------------------------------------------------------------------

int run(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_json(const std::string& text) {
  auto j = nlohmann::ordered_json::parse(text);
  j.erase("wall_time");
  return j.dump();
}

std::string strip_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  int seconds_col = -1;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (seconds_col < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == "seconds") seconds_col = static_cast<int>(i);
      }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (static_cast<int>(i) != seconds_col) out += cells[i];
      out += ',';
    }
    out += '\n';
  }
  return out;
}

Outcome determinism() {
  Outcome o;
  if (cli_path.empty()) {
    o.detail = "no CLI path given";
    return o;
  }
  const fs::path dir = fs::temp_directory_path() / "layerforge_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir / "corpus_a");
  fs::create_directories(dir / "corpus_b");
  const std::string q = "\"";
  int failures = 0;
  int comparisons = 0;
  run(q + cli_path + q + " gen 12 3 --seed 5 -o " + (dir / "corpus_a").string() + " > /dev/null 2>&1");
  run(q + cli_path + q + " gen 12 3 --seed 5 -o " + (dir / "corpus_b").string() + " > /dev/null 2>&1");
  for (const auto& e : fs::directory_iterator(dir / "corpus_a")) {
    ++comparisons;
    if (slurp(e.path()) != slurp(dir / "corpus_b" / e.path().filename())) ++failures;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "corpus_a")) {
    if (e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    for (const std::string preset : {"exp1", "ms_1_1"}) {
      for (const std::string family : {"direct", "cgl"}) {
        std::string outs[2];
        for (int rep = 0; rep < 2; ++rep) {
          const fs::path out = dir / ("solve" + std::to_string(rep) + ".json");
          run(q + cli_path + q + " solve " + f.string() + " --preset " + preset + " --family " + family +
              " --time-limit 60 > " + out.string() + " 2>/dev/null");
          outs[rep] = slurp(out);
        }
        ++comparisons;
        try {
          if (outs[0].empty() || strip_json(outs[0]) != strip_json(outs[1])) ++failures;
        } catch (const std::exception&) {
          ++failures;
        }
      }
    }
  }
  std::string csv[2];
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path out = dir / ("bench" + std::to_string(rep) + ".csv");
    run(q + cli_path + q + " bench " + (dir / "corpus_a").string() +
        " --presets exp1 exp2 ms_2_1 --families direct qla cgl --time-limit 60 --threads 2 -o " + out.string() +
        " > /dev/null 2>&1");
    csv[rep] = slurp(out);
  }
  ++comparisons;
  if (csv[0].empty() || strip_csv(csv[0]) != strip_csv(csv[1])) ++failures;
  o.pass = failures == 0;
  o.detail = std::to_string(comparisons) + " comparisons (gen files, solve JSON, bench CSV), " +
             std::to_string(failures) + " differences";
  return o;
}

// ---------------------------------------------------------------------------

Outcome performance_floor() {
  const auto start = Clock::now();
  int optimal = 0;
  double slowest = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const DiGraph g = generate_random(GenSpec{20, Rational(3, 2), seed}).graph;
    const PresetParams params = preset_params(Preset::kExp1, g);
    SolveConfig c;
    c.variant = params.variant;
    c.weights = params.weights;
    c.y = params.y;
    c.time_limit = 1800;
    const SolveResult r = branch_and_bound(g, c, heuristic_layering(g, c));
    if (r.status == SolveStatus::kOptimal) ++optimal;
    slowest = std::max(slowest, r.wall_time);
  }
  Outcome o;
  o.pass = optimal * 10 >= 50 * 9;
  o.detail = std::to_string(optimal) + "/50 proven optimal, slowest " + std::to_string(slowest) + " s, total " +
             std::to_string(since(start)) + " s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg == "--cli" && i + 1 < argc) {
      cli_path = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only N] [--cli PATH]\n";
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"model size exactness", model_sizes},
      {"oracle equivalence", oracle_equivalence},
      {"encode/objective agreement", encode_agreement},
      {"linearization soundness", linearization},
      {"scaling-factor identities", scaling_identities},
      {"width/height pattern across ratios", shape_pattern},
      {"generator conformance", generator},
      {"determinism", determinism},
      {"performance floor", performance_floor}};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && only != id) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << o.detail
              << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
