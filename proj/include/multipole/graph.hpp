#pragma once

#include "multipole/dataset.hpp"
#include "multipole/measures.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace multipole {

// Undirected simple graph with sorted adjacency lists.
class Graph {
public:
    explicit Graph(std::size_t nodes = 0) : adjacency_(nodes) {}
    // Sorts and deduplicates each list; self loops are dropped, symmetry is required.
    explicit Graph(std::vector<std::vector<int>> adjacency);

    // Edges may be listed in either orientation and more than once.
    static Graph from_edges(std::size_t nodes, std::span<const std::pair<int, int>> edges);

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept;
    const std::vector<int>& neighbors(int u) const { return adjacency_[static_cast<std::size_t>(u)]; }
    bool adjacent(int u, int v) const;

private:
    std::vector<std::vector<int>> adjacency_;
};

// Two copies of every variable: node i is (variable i, copy 1) and node N + i is
// (variable i, copy 2). Within a copy, i ~ j iff corr(i, j) <= rho; across copies,
// (1,i) ~ (2,j) iff corr(i, j) >= -rho and i != j.
class PromisingGraph {
public:
    PromisingGraph(Graph g, std::size_t variables, double rho)
        : graph_(std::move(g)), variables_(variables), rho_(rho) {}

    const Graph& graph() const noexcept { return graph_; }
    std::size_t variables() const noexcept { return variables_; }
    double rho() const noexcept { return rho_; }

    int node(int variable, int copy) const
    {
        return copy == 1 ? variable : static_cast<int>(variables_) + variable;
    }
    int variable_of(int node) const { return node % static_cast<int>(variables_); }
    int copy_of(int node) const { return node < static_cast<int>(variables_) ? 1 : 2; }

private:
    Graph graph_;
    std::size_t variables_;
    double rho_;
};

PromisingGraph build_graph(const CorrelationMatrix& a, double rho);

// Edge list "u v w" with nodes written as v<copy>_<variable> and w the correlation.
void write_edge_list(const PromisingGraph& g, const CorrelationMatrix& a, std::ostream& out);

struct CliqueOptions {
    std::size_t min_size = 1;
    // Maximum number of reported cliques; exceeding it stops the enumeration.
    std::uint64_t budget = 10'000'000;
    unsigned threads = 1;
    const std::atomic<bool>* cancel = nullptr;
};

struct CliqueEnumeration {
    std::vector<std::vector<int>> cliques;  // each ascending; list lexicographically sorted
    bool truncated = false;                 // budget exhausted or cancelled
};

// Maximal cliques via Bron-Kerbosch with Tomita pivoting over a degeneracy
// ordering (ties broken by node id).
CliqueEnumeration maximal_cliques(const Graph& g, const CliqueOptions& options);

// Copy-1 nodes map to +1 and copy-2 nodes to -1, canonically oriented, so a clique
// and its mirror give the same set. Throws ValidationError if a variable repeats.
SignedSet clique_to_signed_set(const PromisingGraph& g, std::span<const int> clique);

}  // namespace multipole
