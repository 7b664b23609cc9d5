#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "layerforge/graph.hpp"
#include "layerforge/rational.hpp"

namespace layerforge {

enum class Variant { kDlp, kDlpW, kGlp, kGlpW, kGlpMs, kGlpMsStar };

inline constexpr Variant kAllVariants[] = {Variant::kDlp, Variant::kDlpW,  Variant::kGlp,
                                           Variant::kGlpW, Variant::kGlpMs, Variant::kGlpMsStar};

std::string_view variant_name(Variant v);     // "DLP", "GLP_MS_STAR", ...
Variant parse_variant(std::string_view name);  // case-insensitive, '-' or '_', "GLP-MS*" accepted

bool is_directed(Variant v);  // DLP, DLP_W
bool has_width_term(Variant v);
bool has_scale_term(Variant v);

// L: vertex -> layer in 1..y_cap.
struct Layering {
  std::vector<int> layer;
  int y_cap = 0;

  int operator[](VertexId v) const { return layer[static_cast<std::size_t>(v)]; }
  int size() const { return static_cast<int>(layer.size()); }
  friend bool operator==(const Layering&, const Layering&) = default;
};

// Throws std::invalid_argument unless every layer lies in 1..y_cap.
void validate_layering(const Layering& l);

struct WeightScheme {
  Rational w_len{1};
  Rational w_rev{1};
  Rational w_wid{0};
  Rational w_scl{0};
  Rational r_w{1};
  Rational r_h{1};

  void validate() const;
};

struct Metrics {
  long long total_length = 0;
  long long reversed = 0;
  // dummies[k] for k in 2..Y-1.
  std::map<int, long long> dummies;
  long long width = 0;
  int height = 0;
  Rational scale{0};
  Rational inv_scale{0};

  long long total_dummies() const;
};

class InfeasibleLayering : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// GLP variants need L(u) != L(v) on every arc; DLP variants need L(v) > L(u).
// Throws std::invalid_argument if l does not cover g.
bool check_feasible(const DiGraph& g, const Layering& l, Variant v);

// Evaluates every aesthetic of a GLP-feasible layering. Width counts vertices
// plus dummies per layer; boundary layers 1 and Y can never carry dummies.
// Throws InfeasibleLayering when two adjacent vertices share a layer.
Metrics evaluate(const DiGraph& g, const Layering& l, const WeightScheme& scheme);

// Objective value of `variant` at `m`. Throws std::invalid_argument for DLP
// variants when arcs are reversed.
Rational objective(const Metrics& m, const WeightScheme& scheme, Variant variant);

// S = min(r_w/W, r_h/H) and its inverse.
Rational scale_factor(long long width, long long height, const Rational& r_w, const Rational& r_h);
Rational inverse_scale_factor(long long width, long long height, const Rational& r_w,
                              const Rational& r_h);

// Removes empty layers; the lowest occupied layer becomes 1. y_cap is kept.
Layering normalize_layering(const Layering& l);

struct Area {
  Rational r_w;
  Rational r_h;
};
// Divides both sides by their minimum.
Area normalize_area(const Rational& r_w, const Rational& r_h);

// Layering text: "vertex layer" per line, '#' comments. Every vertex of a graph
// with n vertices must be listed exactly once.
Layering parse_layering(std::istream& in, int num_vertices, int y_cap);
void write_layering(const Layering& l, std::ostream& out);

// Stable keys: total_length, reversed, dummies (object "k": count), width,
// height, scale, inv_scale (fractions as strings).
nlohmann::ordered_json metrics_to_json(const Metrics& m);

}  // namespace layerforge
