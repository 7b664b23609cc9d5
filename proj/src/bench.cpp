#include "layerforge/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace layerforge {

std::string_view preset_name(Preset p) {
  switch (p) {
    case Preset::kExp1: return "exp1";
    case Preset::kExp2: return "exp2";
    case Preset::kMs12: return "ms_1_2";
    case Preset::kMs11: return "ms_1_1";
    case Preset::kMs21: return "ms_2_1";
  }
  return "?";
}

Preset parse_preset(std::string_view name) {
  for (Preset p : kAllPresets) {
    if (preset_name(p) == name) return p;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

int exp_layer_count(int n) {
  // Y >= 1.6 sqrt(n)  <=>  100 Y^2 >= 256 n
  long long y = 0;
  while (100 * y * y < 256LL * n) ++y;
  return static_cast<int>(y);
}

PresetParams preset_params(Preset p, const DiGraph& g) {
  const long long n = g.num_vertices();
  const long long m = g.num_arcs();
  PresetParams out;
  WeightScheme& w = out.weights;
  if (p == Preset::kExp1 || p == Preset::kExp2) {
    out.y = exp_layer_count(static_cast<int>(n));
    out.variant = Variant::kGlpW;
    w.w_len = 1;
    w.w_rev = Rational(out.y) * w.w_len * Rational(m);
    w.w_wid = p == Preset::kExp1 ? Rational(1) : w.w_rev * Rational(m) + Rational(m * out.y) + 1;
    w.w_scl = 0;
    return out;
  }
  out.y = static_cast<int>(n);
  out.variant = Variant::kGlpMsStar;
  w.w_len = 1;
  w.w_rev = Rational(out.y) * w.w_len * Rational(m);
  w.w_wid = 0;
  w.w_scl = w.w_rev * Rational(m) + Rational(m * out.y) + 1;
  Rational rw = p == Preset::kMs21 ? 2 : 1;
  Rational rh = p == Preset::kMs12 ? 2 : 1;
  const Area area = normalize_area(rw, rh);
  w.r_w = area.r_w;
  w.r_h = area.r_h;
  return out;
}

std::string_view run_family_name(RunFamily f) {
  switch (f) {
    case RunFamily::kDirect: return "direct";
    case RunFamily::kQla: return "qla";
    case RunFamily::kCgl: return "cgl";
  }
  return "?";
}

RunFamily parse_run_family(std::string_view name) {
  if (name == "direct") return RunFamily::kDirect;
  if (name == "qla") return RunFamily::kQla;
  if (name == "cgl") return RunFamily::kCgl;
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

namespace {

// Rough number of stored terms; QLA width rows grow like |A| Y^3.
long long qla_term_estimate(const DiGraph& g, int y) {
  const long long m = g.num_arcs();
  return m * y * y * 4 + m * y * y * static_cast<long long>(y);
}

template <typename BuiltModel>
void check_against_model(const DiGraph& g, const RunOptions& o, const BuiltModel& built, RunRecord& r) {
  const ModelIR& ir = built.model;
  r.model_counts = ModelCounts{ir.num_variables(), ir.num_constraints()};
  if (!r.result.best || !r.metrics_objective) return;
  try {
    Assignment point = encode_layering(g, *r.result.best, built.index, o.config.weights);
    const bool feasible = violations(point, ir).empty();
    r.model_check = feasible && model_objective_at(point, ir) == *r.metrics_objective;
  } catch (const InfeasibleLayering& e) {
    r.model_check = false;
    r.note = e.what();
  }
}

}  // namespace

RunRecord run_instance(const DiGraph& g, const RunOptions& o) {
  RunRecord r;
  r.instance = o.instance;
  r.preset = o.preset;
  r.family = o.family;
  r.variant = o.config.variant;
  r.y = o.config.y;
  r.weights = o.config.weights;
  r.vertices = g.num_vertices();
  r.arcs = g.num_arcs();

  if (o.family == RunFamily::kCgl &&
      ((o.config.variant != Variant::kGlpW && o.config.variant != Variant::kGlpMsStar) || o.config.y < 3)) {
    r.note = "unsupported: CGL needs GLP_W or GLP_MS_STAR and Y >= 3";
    r.result.status = SolveStatus::kInfeasible;
    return r;
  }
  if (o.family == RunFamily::kQla && o.config.variant == Variant::kGlpMs) {
    r.note = "unsupported: no QLA model for GLP_MS";
    r.result.status = SolveStatus::kInfeasible;
    return r;
  }

  r.result = solve_with_restarts(g, o.config);
  if (r.result.best && g.num_vertices() > 0) {
    r.metrics = evaluate(g, *r.result.best, o.config.weights);
    r.metrics_objective = objective(*r.metrics, o.config.weights, o.config.variant);
  }

  if (o.family == RunFamily::kQla) {
    if (qla_term_estimate(g, o.config.y) > 4'000'000) {
      const auto c = qla_expected_counts(g.num_vertices(), g.num_arcs(), o.config.y, o.config.variant);
      r.model_counts = c;
      r.note = "model not materialized (too large); counts from closed form";
    } else {
      check_against_model(g, o, build_qla(g, o.config.y, o.config.variant, o.config.weights), r);
    }
  } else if (o.family == RunFamily::kCgl) {
    check_against_model(g, o,
                        build_cgl(g, o.config.y, o.config.variant, o.config.weights, o.first_layer_constraint),
                        r);
  }
  return r;
}

namespace {

nlohmann::ordered_json optional_rational(const std::optional<Rational>& r) {
  if (!r) return nullptr;
  return to_string(*r);
}

}  // namespace

nlohmann::ordered_json record_to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["instance"] = r.instance;
  j["preset"] = r.preset;
  j["family"] = std::string(run_family_name(r.family));
  j["variant"] = std::string(variant_name(r.variant));
  j["vertices"] = r.vertices;
  j["arcs"] = r.arcs;
  j["y"] = r.y;
  j["weights"] = {{"w_len", to_string(r.weights.w_len)}, {"w_rev", to_string(r.weights.w_rev)},
                  {"w_wid", to_string(r.weights.w_wid)}, {"w_scl", to_string(r.weights.w_scl)},
                  {"r_w", to_string(r.weights.r_w)},     {"r_h", to_string(r.weights.r_h)}};
  j["status"] = std::string(status_name(r.result.status));
  j["objective"] = optional_rational(r.result.objective);
  j["lower_bound"] = optional_rational(r.result.lower_bound);
  j["nodes"] = r.result.nodes_explored;
  if (r.result.best) {
    j["layering"] = r.result.best->layer;
  } else {
    j["layering"] = nullptr;
  }
  if (r.metrics) {
    auto m = metrics_to_json(*r.metrics);
    m["objective"] = optional_rational(r.metrics_objective);
    j["metrics"] = std::move(m);
  } else {
    j["metrics"] = nullptr;
  }
  if (r.model_counts) {
    j["model"] = {{"variables", r.model_counts->variables}, {"constraints", r.model_counts->constraints}};
    j["model"]["check"] = r.model_check ? nlohmann::ordered_json(*r.model_check) : nlohmann::ordered_json(nullptr);
  }
  if (!r.note.empty()) j["note"] = r.note;
  j["wall_time"] = r.result.wall_time;
  return j;
}

bool record_consistent(const DiGraph& g, const RunRecord& r) {
  if (!r.result.best) return !r.result.objective.has_value();
  if (!r.result.objective) return false;
  SolveConfig cfg;
  cfg.variant = r.variant;
  cfg.weights = r.weights;
  cfg.y = r.y;
  auto value = layering_objective(g, *r.result.best, cfg);
  return value && *value == *r.result.objective;
}

std::string bench_csv_header() {
  return "instance,vertices,arcs,preset,family,variant,y,status,seconds,nodes,objective,lower_bound,"
         "model_vars,model_cons,model_check";
}

std::string bench_csv_row(const RunRecord& r) {
  std::ostringstream out;
  out << r.instance << ',' << r.vertices << ',' << r.arcs << ',' << r.preset << ','
      << run_family_name(r.family) << ',' << variant_name(r.variant) << ',' << r.y << ','
      << (r.note.rfind("unsupported", 0) == 0 ? "unsupported" : status_name(r.result.status)) << ','
      << std::fixed << std::setprecision(3) << r.result.wall_time << ',' << r.result.nodes_explored << ','
      << (r.result.objective ? to_string(*r.result.objective) : "") << ','
      << (r.result.lower_bound ? to_string(*r.result.lower_bound) : "") << ',';
  if (r.model_counts) out << r.model_counts->variables << ',' << r.model_counts->constraints;
  else out << ',';
  out << ',' << (r.model_check ? (*r.model_check ? "ok" : "mismatch") : "");
  return out.str();
}

std::string size_bucket(int n) {
  if (n <= 30) return "|V|<=30";
  if (n <= 45) return "31<=|V|<=45";
  if (n <= 60) return "46<=|V|<=60";
  return "|V|>60";
}

std::vector<BenchSummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::map<std::tuple<std::string, std::string, std::string>, BenchSummaryRow> rows;
  for (const RunRecord& r : records) {
    auto key = std::make_tuple(size_bucket(r.vertices), r.preset, std::string(run_family_name(r.family)));
    auto& row = rows[key];
    row.bucket = std::get<0>(key);
    row.preset = std::get<1>(key);
    row.family = std::get<2>(key);
    ++row.runs;
    if (r.result.status == SolveStatus::kOptimal || r.result.status == SolveStatus::kInfeasible) {
      if (r.note.rfind("unsupported", 0) != 0) ++row.solved;
    } else {
      ++row.timeouts;
    }
  }
  std::vector<BenchSummaryRow> out;
  for (auto& [key, row] : rows) out.push_back(row);
  return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr int kColumnGap = 70;
constexpr int kRowGap = 90;
constexpr int kMargin = 50;
constexpr int kRadius = 14;

struct Point2 {
  int x;
  int y;
};

}  // namespace

void render_svg(const DiGraph& g, const Layering& l, std::ostream& out) {
  if (l.size() != g.num_vertices()) throw std::invalid_argument("layering does not cover the graph");
  if (!check_feasible(g, l, Variant::kGlp)) throw InfeasibleLayering("layering is infeasible");
  int height = 0;
  for (int k : l.layer) height = std::max(height, k);

  // Row contents: vertices by id, then dummy slots by arc index.
  std::vector<std::vector<std::pair<int, int>>> rows(static_cast<std::size_t>(height) + 1);  // (kind, id)
  for (int v = 0; v < g.num_vertices(); ++v) rows[static_cast<std::size_t>(l[v])].push_back({0, v});
  for (int a = 0; a < g.num_arcs(); ++a) {
    const int lo = std::min(l[g.arc(a).tail], l[g.arc(a).head]);
    const int hi = std::max(l[g.arc(a).tail], l[g.arc(a).head]);
    for (int k = lo + 1; k < hi; ++k) rows[static_cast<std::size_t>(k)].push_back({1, a});
  }
  std::size_t widest = 1;
  for (const auto& row : rows) widest = std::max(widest, row.size());
  const int canvas_w = 2 * kMargin + static_cast<int>(widest - 1) * kColumnGap;
  const int canvas_h = 2 * kMargin + std::max(0, height - 1) * kRowGap;

  std::vector<Point2> vertex_pos(static_cast<std::size_t>(g.num_vertices()));
  std::map<std::pair<int, int>, Point2> dummy_pos;  // (arc, layer)
  for (int k = 1; k <= height; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    const int count = static_cast<int>(row.size());
    for (int i = 0; i < count; ++i) {
      // Evenly spread each row across the canvas width.
      const int x = count == 1 ? canvas_w / 2 : kMargin + i * (canvas_w - 2 * kMargin) / (count - 1);
      const int y = kMargin + (k - 1) * kRowGap;
      if (row[static_cast<std::size_t>(i)].first == 0) {
        vertex_pos[static_cast<std::size_t>(row[static_cast<std::size_t>(i)].second)] = {x, y};
      } else {
        dummy_pos[{row[static_cast<std::size_t>(i)].second, k}] = {x, y};
      }
    }
  }

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas_w << "\" height=\"" << canvas_h
      << "\" viewBox=\"0 0 " << canvas_w << ' ' << canvas_h << "\">\n";
  out << "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"7\" "
         "markerHeight=\"7\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\"/></marker></defs>\n";
  for (int k = 1; k <= height; ++k) {
    const int y = kMargin + (k - 1) * kRowGap;
    out << "  <line class=\"layer\" x1=\"0\" y1=\"" << y << "\" x2=\"" << canvas_w << "\" y2=\"" << y
        << "\" stroke=\"#eeeeee\"/>\n";
  }
  for (int a = 0; a < g.num_arcs(); ++a) {
    const Arc& arc = g.arc(a);
    const int lu = l[arc.tail];
    const int lv = l[arc.head];
    const bool reversed = lv < lu;
    std::vector<Point2> pts{vertex_pos[static_cast<std::size_t>(arc.tail)]};
    const int step = lu < lv ? 1 : -1;
    for (int k = lu + step; k != lv; k += step) pts.push_back(dummy_pos.at({a, k}));
    pts.push_back(vertex_pos[static_cast<std::size_t>(arc.head)]);
    // Stop short of the head circle so the arrowhead stays visible.
    Point2& last = pts.back();
    const Point2& prev = pts[pts.size() - 2];
    const double dx = last.x - prev.x;
    const double dy = last.y - prev.y;
    const double len = std::max(1.0, std::hypot(dx, dy));
    const int ex = static_cast<int>(std::lround(last.x - dx * kRadius / len));
    const int ey = static_cast<int>(std::lround(last.y - dy * kRadius / len));
    out << "  <polyline class=\"" << (reversed ? "arc reversed" : "arc") << "\" points=\"";
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) out << pts[i].x << ',' << pts[i].y << ' ';
    out << ex << ',' << ey << "\" fill=\"none\" stroke=\"black\"";
    if (reversed) out << " stroke-dasharray=\"8,3,2,3\"";
    out << " marker-end=\"url(#arrow)\"/>\n";
  }
  for (const auto& [key, p] : dummy_pos) {
    out << "  <rect class=\"dummy\" x=\"" << p.x - 3 << "\" y=\"" << p.y - 3
        << "\" width=\"6\" height=\"6\" fill=\"#888888\"/>\n";
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    const Point2& p = vertex_pos[static_cast<std::size_t>(v)];
    out << "  <circle class=\"vertex\" cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\"" << kRadius
        << "\" fill=\"white\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << p.x << "\" y=\"" << p.y + 4 << "\" text-anchor=\"middle\" font-size=\"12\">" << v
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace layerforge
