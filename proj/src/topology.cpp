#include "intercloud/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

namespace intercloud {

void Graph::add_edge(std::size_t u, std::size_t v) {
    if (u >= size() || v >= size() || u == v)
        throw std::out_of_range("Graph::add_edge: bad endpoints");
    if (has_edge(u, v)) return;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
}

bool Graph::has_edge(std::size_t u, std::size_t v) const {
    const auto& a = adj_[u];
    return std::find(a.begin(), a.end(), v) != a.end();
}

std::size_t Graph::edge_count() const {
    std::size_t deg = 0;
    for (const auto& a : adj_) deg += a.size();
    return deg / 2;
}

std::vector<std::size_t> Graph::bfs_distances(std::size_t src) const {
    std::vector<std::size_t> dist(size(), std::numeric_limits<std::size_t>::max());
    std::deque<std::size_t> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t w : adj_[v]) {
            if (dist[w] != std::numeric_limits<std::size_t>::max()) continue;
            dist[w] = dist[v] + 1;
            queue.push_back(w);
        }
    }
    return dist;
}

Graph::DiameterInfo Graph::diameter() const {
    DiameterInfo info;
    for (std::size_t v = 0; v < size(); ++v) {
        auto dist = bfs_distances(v);
        for (std::size_t d : dist) {
            if (d == std::numeric_limits<std::size_t>::max())
                info.connected = false;
            else
                info.diameter = std::max(info.diameter, d);
        }
    }
    return info;
}

Graph Graph::ring(std::size_t n) {
    Graph g(n);
    for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    if (n > 2) g.add_edge(n - 1, 0);
    return g;
}

Graph Graph::path(std::size_t n) {
    Graph g(n);
    for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

Graph Graph::complete(std::size_t n) {
    Graph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

Graph Graph::random_connected(Rng& rng, std::size_t n, std::size_t extra_edges) {
    Graph g(n);
    if (n <= 1) return g;
    // Random spanning tree: attach each node to a uniformly chosen earlier one.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    for (std::size_t i = 1; i < n; ++i)
        g.add_edge(order[i], order[rng.uniform(i)]);
    std::size_t max_extra = n * (n - 1) / 2 - (n - 1);
    extra_edges = std::min(extra_edges, max_extra);
    std::size_t added = 0;
    while (added < extra_edges) {
        std::size_t u = rng.uniform(n);
        std::size_t v = rng.uniform(n);
        if (u == v || g.has_edge(u, v)) continue;
        g.add_edge(u, v);
        ++added;
    }
    return g;
}

}  // namespace intercloud
