#include "layerforge/layering.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace layerforge {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kDlp: return "DLP";
    case Variant::kDlpW: return "DLP_W";
    case Variant::kGlp: return "GLP";
    case Variant::kGlpW: return "GLP_W";
    case Variant::kGlpMs: return "GLP_MS";
    case Variant::kGlpMsStar: return "GLP_MS_STAR";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-') c = '_';
    key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (key == "GLP_MS*" || key == "GLP_MSSTAR") key = "GLP_MS_STAR";
  for (Variant v : kAllVariants) {
    if (variant_name(v) == key) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

bool is_directed(Variant v) { return v == Variant::kDlp || v == Variant::kDlpW; }
bool has_width_term(Variant v) { return v == Variant::kDlpW || v == Variant::kGlpW; }
bool has_scale_term(Variant v) { return v == Variant::kGlpMs || v == Variant::kGlpMsStar; }

void validate_layering(const Layering& l) {
  if (l.y_cap < 1 && !l.layer.empty()) throw std::invalid_argument("layer cap must be positive");
  for (std::size_t v = 0; v < l.layer.size(); ++v) {
    if (l.layer[v] < 1 || l.layer[v] > l.y_cap) {
      throw std::invalid_argument("vertex " + std::to_string(v) + " on layer " +
                                  std::to_string(l.layer[v]) + " outside 1.." +
                                  std::to_string(l.y_cap));
    }
  }
}

void WeightScheme::validate() const {
  if (w_len < 0 || w_rev < 0 || w_wid < 0 || w_scl < 0) {
    throw std::invalid_argument("weights must be nonnegative");
  }
  if (r_w <= 0 || r_h <= 0) throw std::invalid_argument("target area must be positive");
}

long long Metrics::total_dummies() const {
  long long sum = 0;
  for (const auto& [k, count] : dummies) sum += count;
  return sum;
}

namespace {

void require_cover(const DiGraph& g, const Layering& l) {
  if (l.size() != g.num_vertices()) {
    throw std::invalid_argument("layering covers " + std::to_string(l.size()) + " of " +
                                std::to_string(g.num_vertices()) + " vertices");
  }
}

}  // namespace

bool check_feasible(const DiGraph& g, const Layering& l, Variant v) {
  require_cover(g, l);
  for (const Arc& a : g.arcs()) {
    const int lu = l[a.tail];
    const int lv = l[a.head];
    if (is_directed(v) ? lv - lu < 1 : lu == lv) return false;
  }
  return true;
}

Rational scale_factor(long long width, long long height, const Rational& r_w, const Rational& r_h) {
  if (width < 1 || height < 1) throw std::invalid_argument("scale factor needs W, H >= 1");
  return std::min(r_w / Rational(width), r_h / Rational(height));
}

Rational inverse_scale_factor(long long width, long long height, const Rational& r_w,
                              const Rational& r_h) {
  if (width < 1 || height < 1) throw std::invalid_argument("scale factor needs W, H >= 1");
  return std::max(Rational(width) / r_w, Rational(height) / r_h);
}

Metrics evaluate(const DiGraph& g, const Layering& l, const WeightScheme& scheme) {
  require_cover(g, l);
  validate_layering(l);
  const int y = l.y_cap;
  Metrics m;
  // Per-layer load: vertices, then dummies from spanning arcs via a
  // difference array over the open interval (lo, hi).
  std::vector<long long> load(static_cast<std::size_t>(y) + 2, 0);
  std::vector<long long> span(static_cast<std::size_t>(y) + 2, 0);
  for (int v = 0; v < g.num_vertices(); ++v) {
    ++load[static_cast<std::size_t>(l[v])];
    m.height = std::max(m.height, l[v]);
  }
  for (const Arc& a : g.arcs()) {
    const int lu = l[a.tail];
    const int lv = l[a.head];
    if (lu == lv) {
      throw InfeasibleLayering("arc " + std::to_string(a.tail) + "->" + std::to_string(a.head) +
                               " has both endpoints on layer " + std::to_string(lu));
    }
    const int lo = std::min(lu, lv);
    const int hi = std::max(lu, lv);
    m.total_length += hi - lo;
    if (lv < lu) ++m.reversed;
    ++span[static_cast<std::size_t>(lo) + 1];
    --span[static_cast<std::size_t>(hi)];
  }
  long long running = 0;
  for (int k = 1; k <= y; ++k) {
    running += span[static_cast<std::size_t>(k)];
    if (k >= 2 && k <= y - 1) m.dummies[k] = running;
    m.width = std::max(m.width, load[static_cast<std::size_t>(k)] + running);
  }
  if (m.width >= 1 && m.height >= 1) {
    m.scale = scale_factor(m.width, m.height, scheme.r_w, scheme.r_h);
    m.inv_scale = inverse_scale_factor(m.width, m.height, scheme.r_w, scheme.r_h);
  }
  return m;
}

Rational objective(const Metrics& m, const WeightScheme& s, Variant variant) {
  if (is_directed(variant) && m.reversed > 0) {
    throw std::invalid_argument(std::string(variant_name(variant)) +
                                " admits no reversed arcs, layering reverses " +
                                std::to_string(m.reversed));
  }
  Rational value = s.w_len * Rational(m.total_length);
  if (!is_directed(variant)) value += s.w_rev * Rational(m.reversed);
  if (has_width_term(variant)) value += s.w_wid * Rational(m.width);
  if (variant == Variant::kGlpMs) value -= s.w_scl * m.scale;
  if (variant == Variant::kGlpMsStar) value += s.w_scl * m.inv_scale;
  return value;
}

Layering normalize_layering(const Layering& l) {
  std::vector<int> occupied(l.layer);
  std::sort(occupied.begin(), occupied.end());
  occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());
  Layering out{l.layer, l.y_cap};
  for (int& k : out.layer) {
    k = static_cast<int>(std::lower_bound(occupied.begin(), occupied.end(), k) - occupied.begin()) + 1;
  }
  return out;
}

Area normalize_area(const Rational& r_w, const Rational& r_h) {
  if (r_w <= 0 || r_h <= 0) throw std::invalid_argument("target area must be positive");
  const Rational lo = std::min(r_w, r_h);
  return {r_w / lo, r_h / lo};
}

Layering parse_layering(std::istream& in, int num_vertices, int y_cap) {
  Layering l{std::vector<int>(static_cast<std::size_t>(num_vertices), 0), y_cap};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    long long v = 0;
    long long k = 0;
    std::string extra;
    if (!(fields >> v)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError(line_no, "malformed layering line");
    }
    if (!(fields >> k) || (fields >> extra)) throw ParseError(line_no, "expected 'vertex layer'");
    if (v < 0 || v >= num_vertices) throw ParseError(line_no, "unknown vertex " + std::to_string(v));
    if (k < 1) throw ParseError(line_no, "layer indices start at 1");
    if (l.layer[static_cast<std::size_t>(v)] != 0) {
      throw ParseError(line_no, "vertex " + std::to_string(v) + " listed twice");
    }
    l.layer[static_cast<std::size_t>(v)] = static_cast<int>(k);
  }
  for (int v = 0; v < num_vertices; ++v) {
    if (l[v] == 0) throw std::invalid_argument("layering is missing vertex " + std::to_string(v));
  }
  if (l.y_cap <= 0) l.y_cap = l.layer.empty() ? 1 : *std::max_element(l.layer.begin(), l.layer.end());
  validate_layering(l);
  return l;
}

void write_layering(const Layering& l, std::ostream& out) {
  for (int v = 0; v < l.size(); ++v) out << v << ' ' << l[v] << '\n';
}

nlohmann::ordered_json metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["total_length"] = m.total_length;
  j["reversed"] = m.reversed;
  nlohmann::ordered_json dummies = nlohmann::ordered_json::object();
  for (const auto& [k, count] : m.dummies) dummies[std::to_string(k)] = count;
  j["dummies"] = std::move(dummies);
  j["width"] = m.width;
  j["height"] = m.height;
  j["scale"] = to_string(m.scale);
  j["inv_scale"] = to_string(m.inv_scale);
  return j;
}

}  // namespace layerforge
