#include "layerforge/solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace layerforge {

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kTimeout: return "timeout";
  }
  return "?";
}

BranchOrder parse_branch_order(std::string_view name) {
  if (name == "id") return BranchOrder::kId;
  if (name == "degree_desc" || name == "degree") return BranchOrder::kDegreeDesc;
  if (name == "connected") return BranchOrder::kConnected;
  throw std::invalid_argument("unknown branch order '" + std::string(name) + "'");
}

void SolveConfig::validate() const {
  if (!(time_limit > 0)) throw std::invalid_argument("time limit must be positive");
  if (y < 1) throw std::invalid_argument("Y must be at least 1");
  weights.validate();
}

std::optional<Rational> layering_objective(const DiGraph& g, const Layering& l, const SolveConfig& cfg) {
  if (!check_feasible(g, l, cfg.variant)) return std::nullopt;
  return objective(evaluate(g, l, cfg.weights), cfg.weights, cfg.variant);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SolveResult trivial_empty(Clock::time_point start) {
  SolveResult r;
  r.status = SolveStatus::kOptimal;
  r.best = Layering{{}, 1};
  r.objective = Rational(0);
  r.lower_bound = Rational(0);
  r.wall_time = seconds_since(start);
  return r;
}

// Cheap exact screens: a cyclic graph or a too-long path rules out DLP; an
// uncolourable undirected graph rules out every variant.
bool provably_infeasible(const DiGraph& g, const SolveConfig& cfg) {
  if (is_directed(cfg.variant)) {
    if (!is_acyclic(g)) return true;
    const Layering lp = longest_path_layering(g);
    return !lp.layer.empty() && *std::max_element(lp.layer.begin(), lp.layer.end()) > cfg.y;
  }
  if (min_feasible_layers(g) <= cfg.y) return false;
  if (g.num_vertices() > 40) return false;
  return !is_colorable(g, cfg.y);
}

}  // namespace

// ---------------------------------------------------------------------------
// Brute force

SolveResult brute_force(const DiGraph& g, const SolveConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const int n = g.num_vertices();
  if (n == 0) return trivial_empty(start);
  {
    long double total = 1;
    for (int i = 0; i < n; ++i) total *= cfg.y;
    if (total > static_cast<long double>(cfg.enumeration_cap)) {
      throw std::length_error("brute force: Y^n exceeds the enumeration cap");
    }
  }
  SolveResult result;
  Layering l{std::vector<int>(static_cast<std::size_t>(n), 1), cfg.y};
  while (true) {
    ++result.nodes_explored;
    if (auto value = layering_objective(g, l, cfg); value && (!result.objective || *value < *result.objective)) {
      result.objective = value;
      result.best = l;
    }
    // Odometer with the last vertex fastest, so enumeration is lexicographic.
    int pos = n - 1;
    while (pos >= 0 && l.layer[static_cast<std::size_t>(pos)] == cfg.y) {
      l.layer[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++l.layer[static_cast<std::size_t>(pos)];
  }
  result.status = result.best ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
  result.lower_bound = result.objective;
  result.wall_time = seconds_since(start);
  return result;
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

constexpr std::int64_t kInfCost = std::numeric_limits<std::int64_t>::max() / 4;
constexpr std::uint64_t kDeadlinePollInterval = 4096;

std::int64_t integer_weight(const Rational& w, std::int64_t den) {
  return (w * Rational(den)).numerator();
}

class Search {
 public:
  // Caps restrict the search to W <= width_cap and H <= height_cap.
  Search(const DiGraph& g, const SolveConfig& cfg, long long width_cap = -1, int height_cap = -1)
      : g_(g), cfg_(cfg), n_(g.num_vertices()), y_(cfg.y), m_(g.num_arcs()), width_cap_(width_cap),
        height_cap_(height_cap < 0 ? cfg.y : std::min(height_cap, cfg.y)) {
    const WeightScheme& w = cfg.weights;
    directed_ = is_directed(cfg.variant);
    width_term_ = has_width_term(cfg.variant);
    den_ = std::lcm(std::lcm(w.w_len.denominator(), w.w_rev.denominator()), w.w_wid.denominator());
    wl_ = integer_weight(w.w_len, den_);
    wr_ = directed_ ? 0 : integer_weight(w.w_rev, den_);
    ww_ = width_term_ ? integer_weight(w.w_wid, den_) : 0;

    incident_.resize(static_cast<std::size_t>(n_));
    for (const Arc& a : g.arcs()) {
      incident_[static_cast<std::size_t>(a.tail)].push_back({a.head, true});
      incident_[static_cast<std::size_t>(a.head)].push_back({a.tail, false});
    }
    layer_.assign(static_cast<std::size_t>(n_), 0);
    stride_ = static_cast<std::size_t>(y_) + 2;
    cost_.assign(static_cast<std::size_t>(n_) * stride_, 0);
    forbid_.assign(static_cast<std::size_t>(n_) * stride_, 0);
    span_.assign(static_cast<std::size_t>(n_) * stride_, 0);
    load_.assign(stride_, 0);
    dummies_.assign(stride_, 0);
    by_h_.assign(stride_, 0);
    span_by_h_.assign(stride_, 0);
    free_arcs_ = g.num_arcs();
    for (VertexId v = 0; v < n_; ++v) {
      for (int k = height_cap_ + 1; k <= y_; ++k) forbid_[idx(v, k)] = 1;
    }
  }

  bool can_place(VertexId v, int k) const { return forbid_[idx(v, k)] == 0; }

  void assign(VertexId v, int a) {
    layer_[static_cast<std::size_t>(v)] = a;
    ++assigned_;
    ++load_[static_cast<std::size_t>(a)];
    for (const Incidence& e : incident_[static_cast<std::size_t>(v)]) {
      const int b = layer_[static_cast<std::size_t>(e.other)];
      if (b > 0) {
        const int lo = std::min(a, b);
        const int hi = std::max(a, b);
        length_ += hi - lo;
        dummy_total_ += hi - lo - 1;
        for (int k = lo + 1; k < hi; ++k) ++dummies_[static_cast<std::size_t>(k)];
        if (e.out ? b < a : a < b) ++reversed_;
      } else {
        --free_arcs_;
        update_neighbour(e, a, +1);
      }
    }
  }

  void unassign(VertexId v) {
    const int a = layer_[static_cast<std::size_t>(v)];
    layer_[static_cast<std::size_t>(v)] = 0;
    --assigned_;
    --load_[static_cast<std::size_t>(a)];
    for (const Incidence& e : incident_[static_cast<std::size_t>(v)]) {
      const int b = layer_[static_cast<std::size_t>(e.other)];
      if (b > 0) {
        const int lo = std::min(a, b);
        const int hi = std::max(a, b);
        length_ -= hi - lo;
        dummy_total_ -= hi - lo - 1;
        for (int k = lo + 1; k < hi; ++k) --dummies_[static_cast<std::size_t>(k)];
        if (e.out ? b < a : a < b) --reversed_;
      } else {
        ++free_arcs_;
        update_neighbour(e, a, -1);
      }
    }
  }

  // Decided arcs exactly; every undecided arc at its cheapest, with arcs into
  // the fixed part charged per free vertex at that vertex's best layer; width
  // and height by monotone load and forced-height arguments.
  std::optional<Rational> bound() const {
    std::int64_t acc = wl_ * length_ + wr_ * reversed_ + wl_ * free_arcs_;
    int height = top_layer();
    const bool by_height = width_term_ || has_scale_term(cfg_.variant) || width_cap_ >= 0;
    // by_height: per-height sums of each free vertex's cheapest layer at or
    // below that height, so the width and scale terms can be charged against
    // the height they force.
    if (by_height) {
      std::fill(by_h_.begin(), by_h_.end(), 0);
      std::fill(span_by_h_.begin(), span_by_h_.end(), 0);
    }
    for (VertexId u = 0; u < n_; ++u) {
      if (layer_[static_cast<std::size_t>(u)] > 0) continue;
      std::int64_t best = kInfCost;
      std::int64_t shortest = kInfCost;
      int lowest = 0;
      const std::size_t base = idx(u, 0);
      for (int k = 1; k <= y_; ++k) {
        const std::size_t at = base + static_cast<std::size_t>(k);
        if (forbid_[at] == 0) {
          if (lowest == 0) lowest = k;
          best = std::min(best, cost_[at]);
          shortest = std::min<std::int64_t>(shortest, span_[at]);
        }
        if (by_height) {
          auto& c = by_h_[static_cast<std::size_t>(k)];
          c = (best == kInfCost || c >= kInfCost) ? kInfCost : c + best;
          auto& d = span_by_h_[static_cast<std::size_t>(k)];
          d = (shortest == kInfCost || d >= kInfCost) ? kInfCost : d + shortest;
        }
      }
      if (lowest == 0) return std::nullopt;
      acc += best;
      height = std::max(height, lowest);
    }
    if (!by_height) return Rational(acc, den_);
    const std::int64_t fixed = wl_ * length_ + wr_ * reversed_ + wl_ * free_arcs_;
    const long long load = max_load();
    if (width_cap_ >= 0 && load > width_cap_) return std::nullopt;
    std::optional<Rational> out;
    for (int h = std::max(height, 1); h <= height_cap_; ++h) {
      const std::int64_t free_cost = by_h_[static_cast<std::size_t>(h)];
      if (free_cost >= kInfCost) continue;
      // Every arc of length d leaves d - 1 dummies, and everything sits on h
      // layers, so W >= (|V| + dummies) / h.
      const std::int64_t dummy_lb = length_ + free_arcs_ + span_by_h_[static_cast<std::size_t>(h)] - m_;
      const long long w = std::max<long long>(load, ceil_div(n_ + dummy_lb, h));
      if (width_cap_ >= 0 && w > width_cap_) continue;
      Rational value = Rational(fixed + free_cost + ww_ * w, den_) + scale_term(w, h);
      if (!out || value < *out) out = value;
    }
    return out;
  }

  // Objective of the complete assignment held in the state.
  Rational exact_objective() const {
    const long long width = max_load();
    std::int64_t acc = wl_ * length_ + wr_ * reversed_ + ww_ * width;
    return Rational(acc, den_) + scale_term(width, top_layer());
  }

  // Compaction never worsens a layering, so only nodes whose empty layers
  // below the top can still be filled by the free vertices need exploring.
  bool compactable() const {
    int empty = 0;
    for (int k = top_layer() - 1; k >= 1; --k) empty += load_[static_cast<std::size_t>(k)] == 0 ? 1 : 0;
    return empty <= n_ - assigned_;
  }

  Layering layering() const { return Layering{layer_, y_}; }
  int layer_of(VertexId v) const { return layer_[static_cast<std::size_t>(v)]; }

 private:
  struct Incidence {
    VertexId other;
    bool out;  // the owning vertex is the tail
  };

  std::size_t idx(VertexId v, int k) const {
    return static_cast<std::size_t>(v) * stride_ + static_cast<std::size_t>(k);
  }

  void update_neighbour(const Incidence& e, int a, int sign) {
    const std::size_t base = idx(e.other, 0);
    for (int k = 1; k <= y_; ++k) {
      std::int64_t c = wl_ * std::abs(k - a);
      // e.out: fixed vertex is the tail, so the arc reverses when the head
      // lands above it.
      const bool reversed = e.out ? k < a : a < k;
      if (reversed) c += wr_;
      cost_[base + static_cast<std::size_t>(k)] += sign * c;
      span_[base + static_cast<std::size_t>(k)] += sign * std::abs(k - a);
    }
    if (!directed_) {
      forbid_[base + static_cast<std::size_t>(a)] += sign;
    } else if (e.out) {
      for (int k = 1; k <= a; ++k) forbid_[base + static_cast<std::size_t>(k)] += sign;
    } else {
      for (int k = a; k <= y_; ++k) forbid_[base + static_cast<std::size_t>(k)] += sign;
    }
  }

  long long max_load() const {
    long long best = 0;
    for (int k = 1; k <= y_; ++k) {
      best = std::max<long long>(best, load_[static_cast<std::size_t>(k)] + dummies_[static_cast<std::size_t>(k)]);
    }
    return best;
  }

  int top_layer() const {
    for (int k = y_; k >= 1; --k) {
      if (load_[static_cast<std::size_t>(k)] > 0) return k;
    }
    return 0;
  }

  Rational scale_term(long long width, int height) const {
    const WeightScheme& w = cfg_.weights;
    if (cfg_.variant == Variant::kGlpMsStar) {
      return w.w_scl * std::max(Rational(width) / w.r_w, Rational(height) / w.r_h);
    }
    if (cfg_.variant == Variant::kGlpMs) {
      return -w.w_scl * std::min(w.r_w / Rational(std::max(width, 1LL)), w.r_h / Rational(std::max(height, 1)));
    }
    return Rational(0);
  }

  const DiGraph& g_;
  const SolveConfig& cfg_;
  int n_;
  int y_;
  std::int64_t m_ = 0;
  long long width_cap_ = -1;
  int height_cap_ = 0;
  bool directed_ = false;
  bool width_term_ = false;
  std::int64_t den_ = 1;
  std::int64_t wl_ = 0;
  std::int64_t wr_ = 0;
  std::int64_t ww_ = 0;
  std::size_t stride_ = 0;

  std::vector<std::vector<Incidence>> incident_;
  std::vector<int> layer_;
  std::vector<std::int64_t> cost_;
  std::vector<int> forbid_;
  std::vector<int> span_;  // length of the arcs into the fixed part
  std::vector<long long> load_;
  std::vector<long long> dummies_;
  long long length_ = 0;
  long long reversed_ = 0;
  long long dummy_total_ = 0;
  long long free_arcs_ = 0;
  int assigned_ = 0;
  mutable std::vector<std::int64_t> by_h_;
  mutable std::vector<std::int64_t> span_by_h_;
};

// Highest degree first, then always the vertex with the most arcs into the
// vertices already taken (ties: degree, then id).
std::vector<VertexId> connected_order(const DiGraph& g) {
  const int n = g.num_vertices();
  const auto deg = g.degrees();
  std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>(n));
  for (const Arc& a : g.arcs()) {
    adj[static_cast<std::size_t>(a.tail)].push_back(a.head);
    adj[static_cast<std::size_t>(a.head)].push_back(a.tail);
  }
  std::vector<int> links(static_cast<std::size_t>(n), 0);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  std::vector<VertexId> order;
  for (int step = 0; step < n; ++step) {
    VertexId pick = -1;
    for (VertexId v = 0; v < n; ++v) {
      if (taken[static_cast<std::size_t>(v)]) continue;
      if (pick < 0) {
        pick = v;
        continue;
      }
      const auto sv = static_cast<std::size_t>(v);
      const auto sp = static_cast<std::size_t>(pick);
      if (links[sv] > links[sp] || (links[sv] == links[sp] && deg[sv] > deg[sp])) pick = v;
    }
    taken[static_cast<std::size_t>(pick)] = true;
    order.push_back(pick);
    for (VertexId w : adj[static_cast<std::size_t>(pick)]) ++links[static_cast<std::size_t>(w)];
  }
  return order;
}

std::vector<VertexId> branching_order(const DiGraph& g, const SolveConfig& cfg) {
  std::vector<VertexId> order(static_cast<std::size_t>(g.num_vertices()));
  std::iota(order.begin(), order.end(), 0);
  if (cfg.branch_order == BranchOrder::kDegreeDesc) {
    if (cfg.seed) {
      std::mt19937_64 rng(*cfg.seed);
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
      }
    }
    const auto deg = g.degrees();
    std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
      return deg[static_cast<std::size_t>(a)] > deg[static_cast<std::size_t>(b)];
    });
  } else if (cfg.branch_order == BranchOrder::kConnected) {
    order = connected_order(g);
  }
  return order;
}

class BranchAndBound {
 public:
  BranchAndBound(const DiGraph& g, const SolveConfig& cfg, long long width_cap = -1, int height_cap = -1)
      : g_(g), cfg_(cfg), state_(g, cfg, width_cap, height_cap), order_(branching_order(g, cfg)) {
    const bool mirror_invariant = (cfg.variant == Variant::kGlp || cfg.variant == Variant::kGlpW) &&
                                  cfg.weights.w_rev == Rational(0);
    first_limit_ = mirror_invariant ? (cfg.y + 1) / 2 : cfg.y;
  }

  SolveResult run(const std::optional<Layering>& warm_start, double time_limit,
                  std::uint64_t node_limit = std::numeric_limits<std::uint64_t>::max()) {
    start_ = Clock::now();
    deadline_ = time_limit;
    node_limit_ = node_limit;
    SolveResult result;
    if (warm_start) {
      if (auto value = layering_objective(g_, *warm_start, cfg_)) {
        incumbent_ = value;
        best_ = *warm_start;
      }
    }
    auto root = state_.bound();
    if (root) dfs(0);
    result.nodes_explored = nodes_;
    result.best = best_;
    result.objective = incumbent_;
    if (!timed_out_) {
      result.status = best_ ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
      result.lower_bound = incumbent_;
    } else {
      std::optional<Rational> lb = open_min_;
      if (incumbent_ && (!lb || *incumbent_ < *lb)) lb = incumbent_;
      result.lower_bound = lb;
      if (best_) {
        result.status = (lb && *lb == *incumbent_) ? SolveStatus::kOptimal : SolveStatus::kFeasible;
      } else {
        result.status = lb ? SolveStatus::kTimeout : SolveStatus::kInfeasible;
      }
    }
    result.wall_time = seconds_since(start_);
    return result;
  }

 private:
  void note_open(const std::optional<Rational>& b) {
    if (b && (!open_min_ || *b < *open_min_)) open_min_ = b;
  }

  void dfs(int depth) {
    if (depth == static_cast<int>(order_.size())) {
      Rational value = state_.exact_objective();
      if (!incumbent_ || value < *incumbent_) {
        incumbent_ = value;
        best_ = state_.layering();
      }
      return;
    }
    const VertexId v = order_[static_cast<std::size_t>(depth)];
    const int limit = depth == 0 ? first_limit_ : cfg_.y;
    if (best_first_) {
      dfs_best_first(depth, v, limit);
      return;
    }
    for (int k = 1; k <= limit; ++k) {
      if (!state_.can_place(v, k)) continue;
      if (!timed_out_) {
        ++nodes_;
        if (nodes_ % kDeadlinePollInterval == 0 && seconds_since(start_) >= deadline_) timed_out_ = true;
        if (nodes_ >= node_limit_) timed_out_ = true;
      }
      state_.assign(v, k);
      if (!state_.compactable()) {
        state_.unassign(v);
        continue;
      }
      auto b = state_.bound();
      if (timed_out_) {
        // Unexplored subtree: only its bound is kept.
        note_open(b);
      } else if (b && (!incumbent_ || *b < *incumbent_)) {
        dfs(depth + 1);
      }
      state_.unassign(v);
    }
  }

  // Children by increasing bound, ties by layer.
  void dfs_best_first(int depth, VertexId v, int limit) {
    std::vector<std::pair<Rational, int>> children;
    for (int k = 1; k <= limit; ++k) {
      if (!state_.can_place(v, k)) continue;
      state_.assign(v, k);
      if (state_.compactable()) {
        if (auto b = state_.bound()) children.emplace_back(*b, k);
      }
      state_.unassign(v);
    }
    std::sort(children.begin(), children.end());
    for (const auto& [b, k] : children) {
      if (!timed_out_) {
        ++nodes_;
        if (nodes_ % kDeadlinePollInterval == 0 && seconds_since(start_) >= deadline_) timed_out_ = true;
        if (nodes_ >= node_limit_) timed_out_ = true;
      }
      if (timed_out_) {
        note_open(b);
        continue;
      }
      if (incumbent_ && !(b < *incumbent_)) break;
      state_.assign(v, k);
      dfs(depth + 1);
      state_.unassign(v);
    }
  }

 public:
  bool best_first_ = false;

 private:
  const DiGraph& g_;
  const SolveConfig& cfg_;
  Search state_;
  std::vector<VertexId> order_;
  int first_limit_ = 0;
  Clock::time_point start_;
  double deadline_ = 0;
  std::uint64_t node_limit_ = 0;
  bool timed_out_ = false;
  std::uint64_t nodes_ = 0;
  std::optional<Rational> incumbent_;
  std::optional<Layering> best_;
  std::optional<Rational> open_min_;
};

}  // namespace

SolveResult branch_and_bound(const DiGraph& g, const SolveConfig& cfg, const std::optional<Layering>& warm_start) {
  cfg.validate();
  const auto start = Clock::now();
  if (g.num_vertices() == 0) return trivial_empty(start);
  if (provably_infeasible(g, cfg)) {
    SolveResult r;
    r.status = SolveStatus::kInfeasible;
    r.wall_time = seconds_since(start);
    return r;
  }
  BranchAndBound search(g, cfg);
  return search.run(warm_start, cfg.time_limit);
}

namespace {

// Scale variants: the scale term depends on W and H only through
// s = max(W / r_W, H / r_H) and grows with s. Regions W <= s r_W, H <= s r_H
// are searched for increasing s until the best conceivable objective at the
// next s reaches the incumbent.
SolveResult scale_sweep(const DiGraph& g, const SolveConfig& cfg, const std::optional<Layering>& warm_start) {
  const auto start = Clock::now();
  const WeightScheme& w = cfg.weights;
  const int n = g.num_vertices();
  const long long max_width = n + static_cast<long long>(g.num_arcs()) * std::max(0, cfg.y - 2);
  std::vector<Rational> targets;
  for (long long wd = 1; wd <= max_width; ++wd) {
    for (int h = 1; h <= cfg.y; ++h) {
      if (wd * h < n) continue;
      targets.push_back(std::max(Rational(wd) / w.r_w, Rational(h) / w.r_h));
    }
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  Rational base = w.w_len * Rational(g.num_arcs());
  if (has_width_term(cfg.variant)) base += w.w_wid * Rational(ceil_div(n, cfg.y));
  auto floor_at = [&](std::size_t i) {
    const Rational s = targets[i];
    return base + (cfg.variant == Variant::kGlpMsStar ? w.w_scl * s : -w.w_scl / s);
  };

  SolveResult result;
  std::optional<Layering> best;
  std::optional<Rational> incumbent;
  if (warm_start) {
    if (auto value = layering_objective(g, *warm_start, cfg)) {
      best = warm_start;
      incumbent = value;
    }
  }
  // Rounds with a doubling node budget per box. Region i is the box
  // W <= s r_W, H <= s r_H; solving it settles every region below it. Boxes
  // with lower height caps inside a region are searched too, since loose
  // height caps make good layerings hard to reach.
  const std::size_t count = targets.size();
  std::vector<std::optional<Rational>> region_lb(count);
  std::set<std::pair<long long, int>> closed;
  std::size_t settled = 0;
  bool finished = false;
  std::optional<Rational> open_lb;
  for (std::uint64_t budget = 2000;; budget *= 2) {
    bool out_of_time = false;
    for (std::size_t i = settled; i < count && !out_of_time; ++i) {
      if (incumbent && floor_at(i) >= *incumbent) break;
      const Rational wc = targets[i] * w.r_w;
      const Rational hc = targets[i] * w.r_h;
      const long long width_cap = wc.numerator() / wc.denominator();
      const int height_cap = static_cast<int>(std::min<std::int64_t>(cfg.y, hc.numerator() / hc.denominator()));
      for (int h = static_cast<int>(ceil_div(n, width_cap)); h <= height_cap; ++h) {
        if (closed.count({width_cap, h}) != 0) continue;
        const double remaining = cfg.time_limit - seconds_since(start);
        if (remaining <= 0) {
          out_of_time = true;
          break;
        }
        BranchAndBound sub(g, cfg, width_cap, h);
        sub.best_first_ = true;
        SolveResult r = sub.run(best, remaining, budget);
        result.nodes_explored += r.nodes_explored;
        if (r.objective && (!incumbent || *r.objective < *incumbent)) {
          incumbent = r.objective;
          best = r.best;
        }
        const bool done = r.status == SolveStatus::kOptimal || r.status == SolveStatus::kInfeasible;
        if (done) closed.insert({width_cap, h});
        if (h == height_cap) {
          if (done) {
            settled = i + 1;
          } else {
            region_lb[i] = r.lower_bound;
          }
        }
      }
    }
    const bool open = settled < count && (!incumbent || floor_at(settled) < *incumbent);
    if (!open) {
      finished = true;
      break;
    }
    if (out_of_time || cfg.time_limit - seconds_since(start) <= 0) {
      // Each unsettled slice is bounded by its floor and its last search bound.
      for (std::size_t i = settled; i < count; ++i) {
        Rational lb = floor_at(i);
        if (incumbent && lb >= *incumbent) break;
        if (region_lb[i] && lb < *region_lb[i]) lb = *region_lb[i];
        if (!open_lb || lb < *open_lb) open_lb = lb;
      }
      break;
    }
  }
  result.best = best;
  result.objective = incumbent;
  if (finished) {
    result.status = best ? SolveStatus::kOptimal : SolveStatus::kInfeasible;
    result.lower_bound = incumbent;
  } else {
    std::optional<Rational> lb = open_lb;
    if (incumbent && (!lb || *incumbent < *lb)) lb = incumbent;
    result.lower_bound = lb;
    if (best) {
      result.status = (lb && *lb == *incumbent) ? SolveStatus::kOptimal : SolveStatus::kFeasible;
    } else {
      result.status = lb ? SolveStatus::kTimeout : SolveStatus::kInfeasible;
    }
  }
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace

std::optional<Rational> partial_lower_bound(const DiGraph& g, const SolveConfig& cfg, const std::vector<int>& partial) {
  cfg.validate();
  if (static_cast<int>(partial.size()) != g.num_vertices()) {
    throw std::invalid_argument("partial assignment does not cover the graph");
  }
  Search state(g, cfg);
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const int k = partial[static_cast<std::size_t>(v)];
    if (k == 0) continue;
    if (k < 1 || k > cfg.y) throw std::invalid_argument("partial layer out of range");
    if (!state.can_place(v, k)) return std::nullopt;
    state.assign(v, k);
  }
  return state.bound();
}

Layering longest_path_layering(const DiGraph& g) {
  auto order = topological_order(g);
  if (order.empty() && g.num_vertices() > 0) throw std::invalid_argument("longest-path layering needs a DAG");
  std::vector<std::vector<VertexId>> preds(static_cast<std::size_t>(g.num_vertices()));
  for (const Arc& a : g.arcs()) preds[static_cast<std::size_t>(a.head)].push_back(a.tail);
  Layering l{std::vector<int>(static_cast<std::size_t>(g.num_vertices()), 1), 1};
  for (VertexId v : order) {
    for (VertexId u : preds[static_cast<std::size_t>(v)]) {
      l.layer[static_cast<std::size_t>(v)] = std::max(l[v], l[u] + 1);
    }
    l.y_cap = std::max(l.y_cap, l[v]);
  }
  return l;
}

namespace {

// One greedy descent: each vertex in turn goes to the layer <= cap with the
// smallest bound (smallest layer on ties).
std::optional<Layering> greedy_dive(const DiGraph& g, const SolveConfig& cfg, const std::vector<VertexId>& order,
                                    int cap, long long width_cap = -1) {
  Search state(g, cfg, width_cap, cap);
  for (VertexId v : order) {
    std::optional<Rational> best;
    int best_k = 0;
    for (int k = 1; k <= cap; ++k) {
      if (!state.can_place(v, k)) continue;
      state.assign(v, k);
      auto b = state.bound();
      state.unassign(v);
      if (b && (!best || *b < *best)) {
        best = b;
        best_k = k;
      }
    }
    if (best_k == 0) return std::nullopt;
    state.assign(v, best_k);
  }
  return state.layering();
}

std::vector<VertexId> breadth_first_order(const DiGraph& g) {
  const int n = g.num_vertices();
  std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>(n));
  for (const Arc& a : g.arcs()) {
    adj[static_cast<std::size_t>(a.tail)].push_back(a.head);
    adj[static_cast<std::size_t>(a.head)].push_back(a.tail);
  }
  std::vector<VertexId> order;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (VertexId s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    seen[static_cast<std::size_t>(s)] = true;
    order.push_back(s);
    for (std::size_t i = order.size() - 1; i < order.size(); ++i) {
      for (VertexId w : adj[static_cast<std::size_t>(order[i])]) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = true;
          order.push_back(w);
        }
      }
    }
  }
  return order;
}

// First-improvement descent over single-vertex moves, exact objective.
void local_descent(const DiGraph& g, const SolveConfig& cfg, Layering& l, Rational& value, long long& budget) {
  const int n = g.num_vertices();
  bool improved = true;
  while (improved && budget > 0) {
    improved = false;
    for (VertexId v = 0; v < n && budget > 0; ++v) {
      const auto sv = static_cast<std::size_t>(v);
      const int old = l.layer[sv];
      for (int k = 1; k <= cfg.y && budget > 0; ++k) {
        if (k == old) continue;
        --budget;
        l.layer[sv] = k;
        auto candidate = layering_objective(g, l, cfg);
        if (candidate && *candidate < value) {
          value = *candidate;
          improved = true;
          break;
        }
        l.layer[sv] = old;
      }
    }
  }
}

}  // namespace

std::optional<Layering> heuristic_layering(const DiGraph& g, const SolveConfig& cfg) {
  cfg.validate();
  if (g.num_vertices() == 0) return std::nullopt;
  std::optional<Layering> best;
  std::optional<Rational> best_value;
  auto offer = [&](std::optional<Layering> l) {
    if (!l) return;
    auto value = layering_objective(g, *l, cfg);
    if (value && (!best_value || *value < *best_value)) {
      best_value = value;
      best = std::move(l);
    }
  };
  std::vector<std::vector<VertexId>> orders;
  if (is_acyclic(g)) {
    Layering lp = normalize_layering(longest_path_layering(g));
    if (*std::max_element(lp.layer.begin(), lp.layer.end()) <= cfg.y) {
      lp.y_cap = cfg.y;
      offer(lp);
    }
    orders.push_back(topological_order(g));
  }
  orders.push_back(breadth_first_order(g));
  // Every height up to 32, then 16 spread-out ones.
  std::vector<int> caps;
  if (cfg.y <= 32) {
    for (int h = 1; h <= cfg.y; ++h) caps.push_back(h);
  } else {
    for (int i = 1; i <= 16; ++i) caps.push_back(std::max(1, cfg.y * i / 16));
  }
  std::vector<Layering> pool;
  for (const auto& order : orders) {
    for (int cap : caps) {
      auto l = greedy_dive(g, cfg, order, cap);
      if (l) pool.push_back(*l);
      offer(std::move(l));
    }
  }
  if (has_scale_term(cfg.variant)) {
    // Dives inside W <= w, H <= h boxes of increasing area.
    const int n = g.num_vertices();
    for (int h = 1; h <= std::min(cfg.y, 32); ++h) {
      for (long long wd = ceil_div(n, h); wd <= n; ++wd) {
        bool hit = false;
        for (const auto& order : orders) {
          auto l = greedy_dive(g, cfg, order, h, wd);
          if (!l) continue;
          hit = true;
          pool.push_back(*l);
          offer(std::move(l));
        }
        if (hit) break;
      }
    }
  }
  if (best) pool.push_back(*best);
  long long budget = 400000;
  for (Layering& l : pool) {
    auto value = layering_objective(g, l, cfg);
    if (!value) continue;
    local_descent(g, cfg, l, *value, budget);
    offer(l);
  }
  return best;
}

SolveResult solve_with_restarts(const DiGraph& g, const SolveConfig& cfg) {
  if (g.num_vertices() == 0 || provably_infeasible(g, cfg)) return branch_and_bound(g, cfg);
  const auto start = heuristic_layering(g, cfg);
  if (has_scale_term(cfg.variant)) return scale_sweep(g, cfg, start);
  return branch_and_bound(g, cfg, start);
}

}  // namespace layerforge
