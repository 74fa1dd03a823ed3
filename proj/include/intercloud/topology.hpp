#pragma once

#include <cstdint>
#include <vector>

#include "intercloud/rng.hpp"

namespace intercloud {

// Undirected network topology over node indices 0..n-1.
class Graph {
public:
    explicit Graph(std::size_t n) : adj_(n) {}

    std::size_t size() const { return adj_.size(); }
    void add_edge(std::size_t u, std::size_t v);
    bool has_edge(std::size_t u, std::size_t v) const;
    const std::vector<std::size_t>& neighbours(std::size_t v) const { return adj_[v]; }
    std::size_t edge_count() const;

    // BFS hop distances from src; unreachable nodes get SIZE_MAX.
    std::vector<std::size_t> bfs_distances(std::size_t src) const;

    struct DiameterInfo {
        std::size_t diameter = 0;  // per-component max when disconnected
        bool connected = true;
    };
    DiameterInfo diameter() const;

    static Graph ring(std::size_t n);
    static Graph path(std::size_t n);
    static Graph complete(std::size_t n);
    // Random spanning tree plus `extra_edges` distinct random edges.
    static Graph random_connected(Rng& rng, std::size_t n, std::size_t extra_edges);

private:
    std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace intercloud
