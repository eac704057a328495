#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hetero/dense_matrix.hpp"

namespace hetero {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph. Edges are stored once as (i, j) with i < j, sorted.
class Graph {
 public:
  Graph() = default;
  // Canonicalizes: orients pairs, drops self-loops and duplicates. Throws on
  // endpoints outside [0, n).
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(NodeId i, NodeId j) const;
  std::vector<std::size_t> degrees() const;

  bool operator==(const Graph&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

// Ground-truth or detected communities; members are sorted and unique.
struct CommunityLabels {
  std::vector<std::vector<NodeId>> members;

  std::size_t count() const { return members.size(); }
  bool operator==(const CommunityLabels&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Maps raw ids found in a file to the contiguous range [0, n).
class NodeIdMap {
 public:
  NodeId intern(std::int64_t raw);
  std::optional<NodeId> find(std::int64_t raw) const;
  std::int64_t original(NodeId id) const { return originals_.at(id); }
  std::size_t size() const { return originals_.size(); }
  const std::vector<std::int64_t>& originals() const { return originals_; }

 private:
  std::vector<std::int64_t> originals_;
  std::unordered_map<std::int64_t, NodeId> index_;
};

struct EdgeListOptions {
  // Overrides n = 1 + max id; must cover every id seen.
  std::optional<std::size_t> num_nodes;
  // Compact arbitrary (possibly negative or sparse) ids to [0, n) in order of
  // first appearance.
  bool remap_ids = false;
};

struct LoadedGraph {
  Graph graph;
  std::optional<NodeIdMap> id_map;  // set when remap_ids was requested
};

LoadedGraph load_edge_list(std::istream& in, const EdgeListOptions& options = {});
void save_edge_list(std::ostream& out, const Graph& g);

// One community per line. When `id_map` is given, raw ids are translated
// through it and unknown ids are rejected.
CommunityLabels load_communities(std::istream& in, const NodeIdMap* id_map = nullptr);
void save_communities(std::ostream& out, const CommunityLabels& labels);

// Throws if any member id is >= n.
void validate_labels(const CommunityLabels& labels, std::size_t n);

DenseMatrix adjacency_dense(const Graph& g);
std::size_t max_degree(const Graph& g);

struct Subgraph {
  Graph graph;
  std::vector<NodeId> kept;  // new id -> old id
};

// Induced subgraph on `nodes` (sorted and deduplicated internally).
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

// The `count` largest communities; equal sizes keep file order.
CommunityLabels largest_communities(const CommunityLabels& labels, std::size_t count);

// Restricts a graph and its labels to nodes that belong to at least one of
// the `count` largest communities, relabeling both consistently.
struct FilteredDataset {
  Graph graph;
  CommunityLabels labels;
  std::vector<NodeId> kept;
};
FilteredDataset filter_to_largest_communities(const Graph& g, const CommunityLabels& labels,
                                              std::size_t count);

}  // namespace hetero
