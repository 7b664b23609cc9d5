#include "layerforge/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace layerforge {

DiGraph::DiGraph(int num_vertices, std::vector<Arc> arcs) : n_(num_vertices), arcs_(std::move(arcs)) {
  if (n_ < 0) throw std::invalid_argument("negative vertex count");
  for (const Arc& a : arcs_) {
    if (a.tail < 0 || a.head < 0 || a.tail >= n_ || a.head >= n_) {
      throw std::invalid_argument("arc endpoint out of range: " + std::to_string(a.tail) + " " +
                                  std::to_string(a.head));
    }
    if (a.tail == a.head) {
      throw std::invalid_argument("self-loop at vertex " + std::to_string(a.tail));
    }
  }
}

std::vector<int> DiGraph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (const Arc& a : arcs_) {
    ++deg[static_cast<std::size_t>(a.tail)];
    ++deg[static_cast<std::size_t>(a.head)];
  }
  return deg;
}

std::vector<int> DiGraph::parallel_copy_index() const {
  std::map<std::pair<int, int>, int> seen;
  std::vector<int> copy;
  copy.reserve(arcs_.size());
  for (const Arc& a : arcs_) copy.push_back(seen[{a.tail, a.head}]++);
  return copy;
}

// ---------------------------------------------------------------------------
// Edge list

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool to_int(std::string_view s, long long& value) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

DiGraph parse_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  long long header_n = -1;
  long long max_id = -1;
  bool seen_arc = false;
  std::vector<Arc> arcs;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    auto tokens = split_ws(view);
    if (tokens.empty()) continue;
    if (tokens[0] == "n") {
      if (seen_arc || header_n >= 0) throw ParseError(line_no, "header 'n' must be the first entry");
      if (tokens.size() != 2 || !to_int(tokens[1], header_n) || header_n < 0) {
        throw ParseError(line_no, "malformed header, expected 'n <count>'");
      }
      continue;
    }
    long long tail = 0;
    long long head = 0;
    if (tokens.size() != 2 || !to_int(tokens[0], tail) || !to_int(tokens[1], head) || tail < 0 ||
        head < 0) {
      throw ParseError(line_no, "malformed arc, expected 'tail head'");
    }
    if (tail == head) throw ParseError(line_no, "self-loop at vertex " + std::to_string(tail));
    if (header_n >= 0 && (tail >= header_n || head >= header_n)) {
      throw ParseError(line_no, "vertex id exceeds declared count " + std::to_string(header_n));
    }
    if (tail > 1'000'000'000 || head > 1'000'000'000) throw ParseError(line_no, "vertex id too large");
    max_id = std::max({max_id, tail, head});
    seen_arc = true;
    arcs.push_back({static_cast<int>(tail), static_cast<int>(head)});
  }
  int n = header_n >= 0 ? static_cast<int>(header_n) : static_cast<int>(max_id + 1);
  return DiGraph(n, std::move(arcs));
}

DiGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_edge_list(in);
}

void write_edge_list(const DiGraph& g, std::ostream& out) {
  out << "n " << g.num_vertices() << '\n';
  for (const Arc& a : g.arcs()) out << a.tail << ' ' << a.head << '\n';
}

// ---------------------------------------------------------------------------
// DOT subset

namespace {

struct DotToken {
  enum Kind { kId, kArrow, kPunct } kind;
  std::string text;
  int line;
};

std::vector<DotToken> tokenize_dot(std::string_view s) {
  std::vector<DotToken> out;
  int line = 1;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      auto end = s.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError(line, "unterminated comment");
      line += static_cast<int>(std::count(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(end), '\n'));
      i = end + 2;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({DotToken::kArrow, "->", line});
      i += 2;
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
      throw ParseError(line, "undirected edge '--' not supported");
    } else if (c == '"') {
      std::string text;
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        if (s[i] == '\n') ++line;
        text.push_back(s[i++]);
      }
      if (i >= s.size()) throw ParseError(line, "unterminated string");
      ++i;
      out.push_back({DotToken::kId, text, line});
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '.' ||
                              (s[j] == '-' && j == i))) {
        ++j;
      }
      out.push_back({DotToken::kId, std::string(s.substr(i, j - i)), line});
      i = j;
    } else {
      out.push_back({DotToken::kPunct, std::string(1, c), line});
      ++i;
    }
  }
  return out;
}

}  // namespace

DiGraph parse_dot(std::string_view text) {
  auto tokens = tokenize_dot(text);
  std::size_t pos = 0;
  auto at = [&](std::size_t k) -> const DotToken* { return k < tokens.size() ? &tokens[k] : nullptr; };
  auto fail = [&](const std::string& what) -> ParseError {
    int line = pos < tokens.size() ? tokens[pos].line : (tokens.empty() ? 1 : tokens.back().line);
    return ParseError(line, what);
  };

  if (at(pos) && at(pos)->kind == DotToken::kId && at(pos)->text == "strict") ++pos;
  if (!at(pos) || at(pos)->text != "digraph") throw fail("expected 'digraph'");
  ++pos;
  if (at(pos) && at(pos)->kind == DotToken::kId) ++pos;
  if (!at(pos) || at(pos)->text != "{") throw fail("expected '{'");
  ++pos;

  std::unordered_map<std::string, int> ids;
  std::vector<Arc> arcs;
  auto id_of = [&](const std::string& name) {
    auto [it, inserted] = ids.emplace(name, static_cast<int>(ids.size()));
    return it->second;
  };
  auto skip_attributes = [&] {
    while (at(pos) && at(pos)->text == "[") {
      while (at(pos) && at(pos)->text != "]") ++pos;
      if (!at(pos)) throw fail("unterminated attribute list");
      ++pos;
    }
  };

  while (true) {
    const DotToken* t = at(pos);
    if (!t) throw fail("expected '}'");
    if (t->kind == DotToken::kPunct && t->text == "}") {
      ++pos;
      break;
    }
    if (t->kind == DotToken::kPunct && (t->text == ";" || t->text == ",")) {
      ++pos;
      continue;
    }
    if (t->kind != DotToken::kId) throw fail("unexpected '" + t->text + "'");
    if ((t->text == "node" || t->text == "edge" || t->text == "graph") && at(pos + 1) &&
        at(pos + 1)->text == "[") {
      ++pos;
      skip_attributes();
      continue;
    }
    if (at(pos + 1) && at(pos + 1)->text == "=") {
      // Graph attribute statement such as rankdir=LR.
      pos += 3;
      continue;
    }
    std::vector<int> chain{id_of(t->text)};
    ++pos;
    while (at(pos) && at(pos)->kind == DotToken::kArrow) {
      ++pos;
      if (!at(pos) || at(pos)->kind != DotToken::kId) throw fail("expected node after '->'");
      chain.push_back(id_of(at(pos)->text));
      ++pos;
    }
    skip_attributes();
    for (std::size_t k = 1; k < chain.size(); ++k) {
      if (chain[k - 1] == chain[k]) throw fail("self-loop");
      arcs.push_back({chain[k - 1], chain[k]});
    }
  }
  if (at(pos)) throw fail("trailing content after graph");
  return DiGraph(static_cast<int>(ids.size()), std::move(arcs));
}

DiGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos &&
      (text.compare(first, 7, "digraph") == 0 || text.compare(first, 6, "strict") == 0)) {
    return parse_dot(text);
  }
  return parse_edge_list(std::string_view(text));
}

// ---------------------------------------------------------------------------
// Structure

std::vector<VertexId> topological_order(const DiGraph& g) {
  const int n = g.num_vertices();
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (const Arc& a : g.arcs()) {
    ++indeg[static_cast<std::size_t>(a.head)];
    out[static_cast<std::size_t>(a.tail)].push_back(a.head);
  }
  std::vector<VertexId> order;
  order.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    if (indeg[static_cast<std::size_t>(v)] == 0) order.push_back(v);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int w : out[static_cast<std::size_t>(order[i])]) {
      if (--indeg[static_cast<std::size_t>(w)] == 0) order.push_back(w);
    }
  }
  if (static_cast<int>(order.size()) != n) return {};
  return order;
}

bool is_acyclic(const DiGraph& g) {
  return g.num_vertices() == 0 || !topological_order(g).empty();
}

namespace {

std::vector<std::vector<int>> undirected_adjacency(const DiGraph& g) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.num_vertices()));
  for (const Arc& a : g.arcs()) {
    adj[static_cast<std::size_t>(a.tail)].push_back(a.head);
    adj[static_cast<std::size_t>(a.head)].push_back(a.tail);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

bool color_rec(const std::vector<std::vector<int>>& adj, std::vector<int>& color, int v, int k,
               int used) {
  if (v == static_cast<int>(adj.size())) return true;
  // Colours beyond used+1 are symmetric to used+1.
  int limit = std::min(k, used + 1);
  for (int c = 1; c <= limit; ++c) {
    bool ok = true;
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (w < v && color[static_cast<std::size_t>(w)] == c) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    color[static_cast<std::size_t>(v)] = c;
    if (color_rec(adj, color, v + 1, k, std::max(used, c))) return true;
  }
  color[static_cast<std::size_t>(v)] = 0;
  return false;
}

}  // namespace

int min_feasible_layers(const DiGraph& g) {
  const int n = g.num_vertices();
  if (n == 0) return 0;
  auto adj = undirected_adjacency(g);
  std::vector<int> color(static_cast<std::size_t>(n), 0);
  int max_color = 0;
  std::vector<char> taken;
  for (int v = 0; v < n; ++v) {
    taken.assign(static_cast<std::size_t>(n) + 2, 0);
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (w < v) taken[static_cast<std::size_t>(color[static_cast<std::size_t>(w)])] = 1;
    }
    int c = 1;
    while (taken[static_cast<std::size_t>(c)]) ++c;
    color[static_cast<std::size_t>(v)] = c;
    max_color = std::max(max_color, c);
  }
  return max_color;
}

bool is_colorable(const DiGraph& g, int k) {
  if (g.num_vertices() == 0) return true;
  if (k <= 0) return false;
  auto adj = undirected_adjacency(g);
  std::vector<int> color(static_cast<std::size_t>(g.num_vertices()), 0);
  return color_rec(adj, color, 0, k, 0);
}

// ---------------------------------------------------------------------------
// Generator

int GenSpec::arc_count() const {
  // round half up of p*n/q
  const auto p = density_factor.numerator();
  const auto q = density_factor.denominator();
  return static_cast<int>((2 * p * n_target + q) / (2 * q));
}

void GenSpec::validate() const {
  if (n_target < 2) throw std::invalid_argument("n_target must be at least 2");
  if (density_factor <= 0) throw std::invalid_argument("density_factor must be positive");
  long long cap = static_cast<long long>(n_target) * (n_target - 1) / 2;
  if (arc_count() > cap) {
    throw std::invalid_argument("density too high: " + std::to_string(arc_count()) +
                                " arcs exceed the " + std::to_string(cap) + " possible acyclic arcs");
  }
}

namespace {

// Unbiased draw from [0, bound) by rejection.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  while (true) {
    std::uint64_t r = rng();
    if (r < limit) return r % bound;
  }
}

}  // namespace

GeneratedGraph generate_random(const GenSpec& spec) {
  spec.validate();
  const int n = spec.n_target;
  const int m = spec.arc_count();
  std::mt19937_64 rng(spec.seed);

  // Out-degree per vertex; vertex i can reach the n-1-i vertices above it.
  std::vector<int> outdeg(static_cast<std::size_t>(n), 0);
  for (int placed = 0; placed < m;) {
    int v = static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(n - 1)));
    if (outdeg[static_cast<std::size_t>(v)] < n - 1 - v) {
      ++outdeg[static_cast<std::size_t>(v)];
      ++placed;
    }
  }

  std::vector<Arc> arcs;
  arcs.reserve(static_cast<std::size_t>(m));
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    std::fill(chosen.begin(), chosen.end(), 0);
    const int span = n - 1 - v;
    for (int k = 0; k < outdeg[static_cast<std::size_t>(v)];) {
      int w = v + 1 + static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(span)));
      if (chosen[static_cast<std::size_t>(w)]) continue;
      chosen[static_cast<std::size_t>(w)] = 1;
      arcs.push_back({v, w});
      ++k;
    }
  }

  std::vector<int> label(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) label[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(label[static_cast<std::size_t>(i)], label[static_cast<std::size_t>(j)]);
  }
  for (Arc& a : arcs) {
    a.tail = label[static_cast<std::size_t>(a.tail)];
    a.head = label[static_cast<std::size_t>(a.head)];
  }

  // Drop isolated vertices, keeping the relative order of the rest.
  std::vector<int> touched(static_cast<std::size_t>(n), 0);
  for (const Arc& a : arcs) touched[static_cast<std::size_t>(a.tail)] = touched[static_cast<std::size_t>(a.head)] = 1;
  std::vector<int> compact(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int v = 0; v < n; ++v) {
    if (touched[static_cast<std::size_t>(v)]) compact[static_cast<std::size_t>(v)] = next++;
  }
  for (Arc& a : arcs) {
    a.tail = compact[static_cast<std::size_t>(a.tail)];
    a.head = compact[static_cast<std::size_t>(a.head)];
  }
  GeneratedGraph out;
  out.arcs_drawn = m;
  out.vertices_drawn = n;
  out.graph = DiGraph(next, std::move(arcs));
  return out;
}

}  // namespace layerforge
