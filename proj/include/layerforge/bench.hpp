#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "layerforge/graph.hpp"
#include "layerforge/layering.hpp"
#include "layerforge/model.hpp"
#include "layerforge/solver.hpp"

namespace layerforge {

// Experiment presets. exp1/exp2 target GLP-W with Y = ceil(1.6 sqrt|V|);
// ms_A_B targets GLP-MS* with Y = |V| and r_W:r_H = A:B.
enum class Preset { kExp1, kExp2, kMs12, kMs11, kMs21 };

inline constexpr Preset kAllPresets[] = {Preset::kExp1, Preset::kExp2, Preset::kMs12, Preset::kMs11,
                                         Preset::kMs21};

std::string_view preset_name(Preset p);
Preset parse_preset(std::string_view name);

struct PresetParams {
  int y = 1;
  Variant variant = Variant::kGlp;
  WeightScheme weights;
};

// Smallest integer Y with Y >= 1.6 * sqrt(n), computed exactly.
int exp_layer_count(int num_vertices);

PresetParams preset_params(Preset p, const DiGraph& g);

enum class RunFamily { kDirect, kQla, kCgl };
std::string_view run_family_name(RunFamily f);
RunFamily parse_run_family(std::string_view name);

struct RunRecord {
  std::string instance;
  std::string preset;  // preset name or "custom"
  RunFamily family = RunFamily::kDirect;
  Variant variant = Variant::kGlp;
  int y = 1;
  WeightScheme weights;
  int vertices = 0;
  int arcs = 0;
  SolveResult result;
  std::optional<Metrics> metrics;
  std::optional<Rational> metrics_objective;
  // Model families only: size of the built model, and whether the solver's
  // optimum encodes to a feasible point with the same objective.
  std::optional<ModelCounts> model_counts;
  std::optional<bool> model_check;
  std::string note;
};

struct RunOptions {
  std::string instance;
  std::string preset = "custom";
  RunFamily family = RunFamily::kDirect;
  SolveConfig config;
  bool first_layer_constraint = false;
};

// Solves one instance with solve_with_restarts and fills in everything a
// record carries. For model families the optimum is pushed through the
// corresponding builder and encoder.
RunRecord run_instance(const DiGraph& g, const RunOptions& options);

// Keys in fixed order; rationals as "p/q" strings; wall_time last.
nlohmann::ordered_json record_to_json(const RunRecord& r);

// Recomputes the record's objective from its layering. True when it matches
// the stored objective exactly (or when there is no layering).
bool record_consistent(const DiGraph& g, const RunRecord& r);

std::string bench_csv_header();
std::string bench_csv_row(const RunRecord& r);

// Size buckets: up to 30, 31-45, 46-60, above 60.
std::string size_bucket(int num_vertices);

struct BenchSummaryRow {
  std::string bucket;
  std::string preset;
  std::string family;
  int runs = 0;
  int solved = 0;
  int timeouts = 0;
};
std::vector<BenchSummaryRow> summarize(const std::vector<RunRecord>& records);

// Layered drawing: layer 1 on top, vertices evenly spaced per row, dummy
// markers where arcs cross a layer, reversed arcs dash-dotted.
void render_svg(const DiGraph& g, const Layering& l, std::ostream& out);

}  // namespace layerforge
