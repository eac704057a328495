#include "hetero/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace hetero {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n) {
  for (auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw std::invalid_argument("Graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") outside [0, " + std::to_string(n) + ")");
    }
    if (u > v) std::swap(u, v);
  }
  std::erase_if(edges, [](const Edge& e) { return e.first == e.second; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(n_, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

NodeId NodeIdMap::intern(std::int64_t raw) {
  auto [it, inserted] = index_.try_emplace(raw, originals_.size());
  if (inserted) originals_.push_back(raw);
  return it->second;
}

std::optional<NodeId> NodeIdMap::find(std::int64_t raw) const {
  auto it = index_.find(raw);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::int64_t parse_id(std::string_view token, std::size_t line_no) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "expected integer node id, got '" + std::string(token) + "'");
  }
  return value;
}

bool is_comment(std::string_view line) {
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '#';
  }
  return false;
}

}  // namespace

LoadedGraph load_edge_list(std::istream& in, const EdgeListOptions& options) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment(line)) continue;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected two node ids, got " + std::to_string(tokens.size()) +
                                    " tokens");
    }
    const std::int64_t u = parse_id(tokens[0], line_no);
    const std::int64_t v = parse_id(tokens[1], line_no);
    if (!options.remap_ids && (u < 0 || v < 0)) {
      throw ParseError(line_no, "negative node id (use id remapping)");
    }
    raw.emplace_back(u, v);
  }
  if (raw.empty()) throw std::invalid_argument("load_edge_list: input contains no edges");

  LoadedGraph out;
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  std::size_t n = 0;
  if (options.remap_ids) {
    NodeIdMap map;
    for (auto [u, v] : raw) {
      const NodeId a = map.intern(u);
      const NodeId b = map.intern(v);
      edges.emplace_back(a, b);
    }
    n = map.size();
    out.id_map = std::move(map);
  } else {
    for (auto [u, v] : raw) {
      edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
      n = std::max<std::size_t>(n, static_cast<std::size_t>(std::max(u, v)) + 1);
    }
  }
  if (options.num_nodes) {
    if (*options.num_nodes < n) {
      throw std::invalid_argument("load_edge_list: node count override " +
                                  std::to_string(*options.num_nodes) + " smaller than " +
                                  std::to_string(n) + " ids seen");
    }
    n = *options.num_nodes;
  }
  out.graph = Graph(n, std::move(edges));
  return out;
}

void save_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << " edges " << g.num_edges() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

CommunityLabels load_communities(std::istream& in, const NodeIdMap* id_map) {
  CommunityLabels labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment(line)) continue;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    std::vector<NodeId> members;
    members.reserve(tokens.size());
    for (auto tok : tokens) {
      const std::int64_t raw = parse_id(tok, line_no);
      if (id_map) {
        auto id = id_map->find(raw);
        if (!id) throw ParseError(line_no, "node id " + std::to_string(raw) + " not in graph");
        members.push_back(*id);
      } else {
        if (raw < 0) throw ParseError(line_no, "negative node id");
        members.push_back(static_cast<NodeId>(raw));
      }
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    labels.members.push_back(std::move(members));
  }
  if (labels.members.empty()) throw std::invalid_argument("load_communities: no communities");
  return labels;
}

void save_communities(std::ostream& out, const CommunityLabels& labels) {
  for (const auto& c : labels.members) {
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << c[i];
    out << '\n';
  }
}

void validate_labels(const CommunityLabels& labels, std::size_t n) {
  for (std::size_t c = 0; c < labels.members.size(); ++c) {
    const auto& m = labels.members[c];
    if (m.empty()) throw std::invalid_argument("community " + std::to_string(c) + " is empty");
    if (m.back() >= n) {
      throw std::invalid_argument("community " + std::to_string(c) + " references node " +
                                  std::to_string(m.back()) + " >= " + std::to_string(n));
    }
  }
}

DenseMatrix adjacency_dense(const Graph& g) {
  DenseMatrix a(g.num_nodes(), g.num_nodes());
  for (const auto& [u, v] : g.edges()) {
    a(u, v) = 1.0;
    a(v, u) = 1.0;
  }
  return a;
}

std::size_t max_degree(const Graph& g) {
  auto deg = g.degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<NodeId> kept(nodes.begin(), nodes.end());
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  constexpr NodeId kAbsent = static_cast<NodeId>(-1);
  std::vector<NodeId> remap(g.num_nodes(), kAbsent);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] >= g.num_nodes()) throw std::invalid_argument("induced_subgraph: node out of range");
    remap[kept[i]] = i;
  }
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edges())
    if (remap[u] != kAbsent && remap[v] != kAbsent) edges.emplace_back(remap[u], remap[v]);
  return {Graph(kept.size(), std::move(edges)), std::move(kept)};
}

CommunityLabels largest_communities(const CommunityLabels& labels, std::size_t count) {
  std::vector<std::size_t> order(labels.members.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return labels.members[a].size() > labels.members[b].size();
  });
  order.resize(std::min(count, order.size()));
  std::sort(order.begin(), order.end());
  CommunityLabels out;
  for (std::size_t i : order) out.members.push_back(labels.members[i]);
  return out;
}

FilteredDataset filter_to_largest_communities(const Graph& g, const CommunityLabels& labels,
                                              std::size_t count) {
  CommunityLabels top = largest_communities(labels, count);
  std::set<NodeId> nodes;
  for (const auto& c : top.members) nodes.insert(c.begin(), c.end());
  std::vector<NodeId> node_list(nodes.begin(), nodes.end());
  Subgraph sub = induced_subgraph(g, node_list);

  std::vector<NodeId> remap(g.num_nodes(), 0);
  for (std::size_t i = 0; i < sub.kept.size(); ++i) remap[sub.kept[i]] = i;
  FilteredDataset out{std::move(sub.graph), {}, std::move(sub.kept)};
  for (const auto& c : top.members) {
    std::vector<NodeId> m;
    m.reserve(c.size());
    for (NodeId v : c) m.push_back(remap[v]);
    out.labels.members.push_back(std::move(m));
  }
  return out;
}

}  // namespace hetero
