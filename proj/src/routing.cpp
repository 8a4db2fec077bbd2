#include "leoisl/routing.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace leoisl {

Graph::Graph(const TopologySnapshot& snapshot, bool isl_only)
    : snapshot_(&snapshot), adjacency_(static_cast<std::size_t>(snapshot.num_nodes())) {
  const auto& edges = snapshot.edges();
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    const auto& e = edges[static_cast<std::size_t>(i)];
    if (isl_only && e.link_class != LinkClass::isl_laser) continue;
    adjacency_[static_cast<std::size_t>(e.a)].push_back({e.b, i});
    adjacency_[static_cast<std::size_t>(e.b)].push_back({e.a, i});
  }
  for (auto& arcs : adjacency_) {
    std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) { return x.to < y.to; });
  }
}

bool Graph::can_relay(int node) const {
  return snapshot_->nodes()[static_cast<std::size_t>(node)].kind == NodeKind::satellite;
}

Path Graph::make_path(const std::vector<int>& nodes) const {
  Path p;
  p.nodes = nodes;
  p.hop_count = nodes.empty() ? 0 : static_cast<int>(nodes.size()) - 1;
  p.bottleneck_capacity_bps = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const auto& arcs = adjacency_[static_cast<std::size_t>(nodes[i])];
    auto it = std::find_if(arcs.begin(), arcs.end(),
                           [next = nodes[i + 1]](const Arc& a) { return a.to == next; });
    if (it == arcs.end()) throw std::invalid_argument("make_path: consecutive nodes not adjacent");
    const auto& e = snapshot_->edges()[static_cast<std::size_t>(it->edge)];
    p.total_distance_km += e.distance_km;
    p.total_propagation_delay_s += e.delay_s;
    p.bottleneck_capacity_bps = std::min(p.bottleneck_capacity_bps, e.capacity_bps);
    p.hop_capacities_bps.push_back(e.capacity_bps);
  }
  return p;
}

namespace {

struct Label {
  double distance = std::numeric_limits<double>::infinity();
  int hops = std::numeric_limits<int>::max();
  std::vector<int> seq;
};

// Strict "a is better than b" under the metric's total order.
bool better(const Label& a, const Label& b, RouteMetric metric) {
  if (metric == RouteMetric::distance) {
    return std::tie(a.distance, a.hops, a.seq) < std::tie(b.distance, b.hops, b.seq);
  }
  return std::tie(a.hops, a.distance, a.seq) < std::tie(b.hops, b.distance, b.seq);
}

std::optional<Path> search(const Graph& graph, int src, int dst, RouteMetric metric) {
  const int n = graph.num_nodes();
  if (src < 0 || src >= n || dst < 0 || dst >= n) {
    throw std::out_of_range("path search: node index out of range");
  }
  if (src == dst) return graph.make_path({src});

  std::vector<Label> labels(static_cast<std::size_t>(n));
  std::vector<char> settled(static_cast<std::size_t>(n), 0);
  labels[static_cast<std::size_t>(src)] = Label{0.0, 0, {src}};

  using Key = std::tuple<double, double, int>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;
  auto key_of = [metric](const Label& l, int node) {
    return metric == RouteMetric::distance ? Key{l.distance, l.hops, node}
                                           : Key{l.hops, l.distance, node};
  };
  queue.push(key_of(labels[static_cast<std::size_t>(src)], src));

  const auto& edges = graph.snapshot().edges();
  while (!queue.empty()) {
    const auto key = queue.top();
    queue.pop();
    const int u = std::get<2>(key);
    auto& lu = labels[static_cast<std::size_t>(u)];
    if (settled[static_cast<std::size_t>(u)] || key != key_of(lu, u)) continue;
    settled[static_cast<std::size_t>(u)] = 1;
    if (u == dst) break;
    if (u != src && !graph.can_relay(u)) continue;
    for (const auto& arc : graph.arcs(u)) {
      if (settled[static_cast<std::size_t>(arc.to)]) continue;
      Label cand;
      cand.distance = lu.distance + edges[static_cast<std::size_t>(arc.edge)].distance_km;
      cand.hops = lu.hops + 1;
      cand.seq = lu.seq;
      cand.seq.push_back(arc.to);
      auto& lv = labels[static_cast<std::size_t>(arc.to)];
      if (better(cand, lv, metric)) {
        lv = std::move(cand);
        queue.push(key_of(lv, arc.to));
      }
    }
  }
  if (!settled[static_cast<std::size_t>(dst)]) return std::nullopt;
  return graph.make_path(labels[static_cast<std::size_t>(dst)].seq);
}

}  // namespace

std::optional<Path> find_path(const Graph& graph, int src, int dst, RouteMetric metric) {
  return search(graph, src, dst, metric);
}

std::optional<Path> shortest_distance_path(const Graph& graph, int src, int dst) {
  return search(graph, src, dst, RouteMetric::distance);
}

std::optional<Path> shortest_distance_path(const TopologySnapshot& snapshot, int src, int dst) {
  return search(Graph(snapshot), src, dst, RouteMetric::distance);
}

std::optional<Path> min_hop_path(const Graph& graph, int src, int dst) {
  return search(graph, src, dst, RouteMetric::hops);
}

std::optional<Path> min_hop_path(const TopologySnapshot& snapshot, int src, int dst) {
  return search(Graph(snapshot), src, dst, RouteMetric::hops);
}

std::vector<int> hop_counts_from(const Graph& graph, int src) {
  std::vector<int> hops(static_cast<std::size_t>(graph.num_nodes()), -1);
  std::deque<int> frontier{src};
  hops[static_cast<std::size_t>(src)] = 0;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    if (u != src && !graph.can_relay(u)) continue;
    for (const auto& arc : graph.arcs(u)) {
      auto& h = hops[static_cast<std::size_t>(arc.to)];
      if (h >= 0) continue;
      h = hops[static_cast<std::size_t>(u)] + 1;
      frontier.push_back(arc.to);
    }
  }
  return hops;
}

}  // namespace leoisl
