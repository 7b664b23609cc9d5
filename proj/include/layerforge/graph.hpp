#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "layerforge/rational.hpp"

namespace layerforge {

using VertexId = int;

struct Arc {
  VertexId tail = 0;
  VertexId head = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Directed multigraph over vertices 0..n-1. Arc order is significant and kept
// stable through parsing and serialization. Self-loops are rejected.
class DiGraph {
 public:
  DiGraph() = default;
  DiGraph(int num_vertices, std::vector<Arc> arcs);

  int num_vertices() const { return n_; }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(int index) const { return arcs_[static_cast<std::size_t>(index)]; }

  // Underlying undirected degree, parallel arcs counted separately.
  std::vector<int> degrees() const;

  // For each arc, how many earlier arcs share its (tail, head) pair. Zero for
  // the first copy of every arc.
  std::vector<int> parallel_copy_index() const;

  friend bool operator==(const DiGraph&, const DiGraph&) = default;

 private:
  int n_ = 0;
  std::vector<Arc> arcs_;
};

// Edge-list text: optional header "n <count>", then "tail head" per line.
// '#' starts a comment. Without a header n = 1 + max id.
DiGraph parse_edge_list(std::istream& in);
DiGraph parse_edge_list(std::string_view text);
void write_edge_list(const DiGraph& g, std::ostream& out);

// Minimal DOT reader: `digraph [name] { a -> b; c; a -> c -> d; }`. Node
// identifiers are mapped to dense ids in order of first appearance; attribute
// lists in brackets are skipped.
DiGraph parse_dot(std::string_view text);

// Reads either format, picking DOT when the first token is "digraph".
DiGraph read_graph_file(const std::string& path);

bool is_acyclic(const DiGraph& g);

// Vertices in topological order; empty when g has a cycle and n > 0.
std::vector<VertexId> topological_order(const DiGraph& g);

// Greedy colouring of the underlying undirected graph in vertex-id order.
// Any Y at or above the returned count admits a feasible GLP layering.
int min_feasible_layers(const DiGraph& g);

// Exact test whether the underlying undirected graph is colourable with k
// colours (backtracking; intended for small graphs).
bool is_colorable(const DiGraph& g, int k);

struct GenSpec {
  int n_target = 20;
  Rational density_factor{3, 2};
  std::uint64_t seed = 1;

  // round(density_factor * n_target), halves rounded up.
  int arc_count() const;
  void validate() const;
};

struct GeneratedGraph {
  DiGraph graph;
  // Number of arcs drawn before isolated vertices were removed. Removal never
  // drops arcs, so this equals graph.num_arcs().
  int arcs_drawn = 0;
  int vertices_drawn = 0;
};

// Random acyclic instance: n_target vertices, round(density * n) arcs towards
// higher ids, uniform relabelling, isolated vertices removed and ids compacted.
// Uses std::mt19937_64 with portable bounded draws, so output is identical on
// every platform for a given seed.
GeneratedGraph generate_random(const GenSpec& spec);

}  // namespace layerforge
