#include "multipole/graph.hpp"

#include "multipole/error.hpp"
#include "multipole/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <iterator>
#include <ostream>
#include <set>

namespace multipole {

Graph::Graph(std::vector<std::vector<int>> adjacency) : adjacency_(std::move(adjacency))
{
    const int n = static_cast<int>(adjacency_.size());
    for (int u = 0; u < n; ++u) {
        auto& list = adjacency_[static_cast<std::size_t>(u)];
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        std::erase(list, u);
        for (int v : list)
            if (v < 0 || v >= n)
                throw ValidationError("graph: neighbor " + std::to_string(v) + " out of range");
    }
    for (int u = 0; u < n; ++u)
        for (int v : adjacency_[static_cast<std::size_t>(u)])
            if (!adjacent(v, u))
                throw ValidationError("graph: adjacency is not symmetric");
}

Graph Graph::from_edges(std::size_t nodes, std::span<const std::pair<int, int>> edges)
{
    std::vector<std::vector<int>> adj(nodes);
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= nodes ||
            static_cast<std::size_t>(v) >= nodes)
            throw ValidationError("graph: edge endpoint out of range");
        adj[static_cast<std::size_t>(u)].push_back(v);
        adj[static_cast<std::size_t>(v)].push_back(u);
    }
    return Graph(std::move(adj));
}

std::size_t Graph::edge_count() const noexcept
{
    std::size_t twice = 0;
    for (const auto& list : adjacency_)
        twice += list.size();
    return twice / 2;
}

bool Graph::adjacent(int u, int v) const
{
    const auto& list = neighbors(u);
    return std::binary_search(list.begin(), list.end(), v);
}

PromisingGraph build_graph(const CorrelationMatrix& a, double rho)
{
    if (!(rho >= -1.0 && rho <= 1.0))
        throw ValidationError("rho must be in [-1,1]");
    const std::size_t n = a.dim();
    const int ni = static_cast<int>(n);
    std::vector<std::vector<int>> adj(2 * n);
    for (int i = 0; i < ni; ++i) {
        for (int j = 0; j < ni; ++j) {
            if (i == j)
                continue;
            const double r = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (r <= rho) {
                adj[static_cast<std::size_t>(i)].push_back(j);
                adj[static_cast<std::size_t>(ni + i)].push_back(ni + j);
            }
            if (r >= -rho) {
                adj[static_cast<std::size_t>(i)].push_back(ni + j);
                adj[static_cast<std::size_t>(ni + i)].push_back(j);
            }
        }
    }
    // Lists were filled in ascending order per copy; merge the two halves.
    for (auto& list : adj)
        std::sort(list.begin(), list.end());
    return PromisingGraph(Graph(std::move(adj)), n, rho);
}

void write_edge_list(const PromisingGraph& g, const CorrelationMatrix& a, std::ostream& out)
{
    const auto& graph = g.graph();
    char buf[32];
    for (int u = 0; u < static_cast<int>(graph.node_count()); ++u) {
        for (int v : graph.neighbors(u)) {
            if (v <= u)
                continue;
            const double w = a(static_cast<std::size_t>(g.variable_of(u)),
                               static_cast<std::size_t>(g.variable_of(v)));
            const auto res = std::to_chars(buf, buf + sizeof buf, w);
            out << 'v' << g.copy_of(u) << '_' << g.variable_of(u) << " v" << g.copy_of(v) << '_'
                << g.variable_of(v) << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))
                << '\n';
        }
    }
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::size_t intersection_size(const std::vector<int>& a, const std::vector<int>& b)
{
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j)
            ++i;
        else if (*j < *i)
            ++j;
        else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

// Degeneracy ordering: repeatedly remove a minimum-degree node, smallest id first.
std::vector<int> degeneracy_order(const Graph& g)
{
    const std::size_t n = g.node_count();
    std::vector<std::size_t> degree(n);
    std::set<std::pair<std::size_t, int>> queue;
    for (std::size_t u = 0; u < n; ++u) {
        degree[u] = g.neighbors(static_cast<int>(u)).size();
        queue.emplace(degree[u], static_cast<int>(u));
    }
    std::vector<char> removed(n, 0);
    std::vector<int> order;
    order.reserve(n);
    while (!queue.empty()) {
        const int u = queue.begin()->second;
        queue.erase(queue.begin());
        removed[static_cast<std::size_t>(u)] = 1;
        order.push_back(u);
        for (int v : g.neighbors(u)) {
            const auto vi = static_cast<std::size_t>(v);
            if (removed[vi])
                continue;
            queue.erase({degree[vi], v});
            --degree[vi];
            queue.emplace(degree[vi], v);
        }
    }
    return order;
}

class Enumerator {
public:
    Enumerator(const Graph& g, const CliqueOptions& opt, std::atomic<std::uint64_t>& reported,
               std::atomic<bool>& stop)
        : g_(g), opt_(opt), reported_(reported), stop_(stop)
    {
    }

    void expand(std::vector<int>& r, std::vector<int> p, std::vector<int> x)
    {
        if (stopped())
            return;
        if (p.empty()) {
            if (x.empty() && r.size() >= opt_.min_size)
                report(r);
            return;
        }
        if (r.size() + p.size() < opt_.min_size)
            return;

        int pivot = -1;
        std::size_t best = 0;
        for (const auto* side : {&p, &x}) {
            for (int u : *side) {
                const std::size_t c = intersection_size(p, g_.neighbors(u));
                if (pivot < 0 || c > best || (c == best && u < pivot)) {
                    pivot = u;
                    best = c;
                }
            }
        }
        std::vector<int> branch;
        std::set_difference(p.begin(), p.end(), g_.neighbors(pivot).begin(),
                            g_.neighbors(pivot).end(), std::back_inserter(branch));
        for (int v : branch) {
            const auto& nv = g_.neighbors(v);
            r.push_back(v);
            expand(r, intersect(p, nv), intersect(x, nv));
            r.pop_back();
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
            if (stopped())
                return;
        }
    }

    std::vector<std::vector<int>> take() { return std::move(found_); }

private:
    bool stopped() const
    {
        return stop_.load(std::memory_order_relaxed) ||
               (opt_.cancel != nullptr && opt_.cancel->load(std::memory_order_relaxed));
    }

    void report(const std::vector<int>& r)
    {
        if (reported_.fetch_add(1, std::memory_order_relaxed) >= opt_.budget) {
            stop_.store(true, std::memory_order_relaxed);
            return;
        }
        auto c = r;
        std::sort(c.begin(), c.end());
        found_.push_back(std::move(c));
    }

    const Graph& g_;
    const CliqueOptions& opt_;
    std::atomic<std::uint64_t>& reported_;
    std::atomic<bool>& stop_;
    std::vector<std::vector<int>> found_;
};

}  // namespace

CliqueEnumeration maximal_cliques(const Graph& g, const CliqueOptions& options)
{
    if (options.min_size < 1)
        throw ValidationError("maximal_cliques: min_size must be >= 1");
    const auto order = degeneracy_order(g);
    const std::size_t n = order.size();
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i)
        position[static_cast<std::size_t>(order[i])] = i;

    std::atomic<std::uint64_t> reported{0};
    std::atomic<bool> stop{false};
    std::vector<std::vector<std::vector<int>>> per_root(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        const int v = order[i];
        std::vector<int> p;
        std::vector<int> x;
        for (int u : g.neighbors(v))
            (position[static_cast<std::size_t>(u)] > i ? p : x).push_back(u);
        if (p.size() + 1 < options.min_size)
            return;
        Enumerator e(g, options, reported, stop);
        std::vector<int> r{v};
        e.expand(r, std::move(p), std::move(x));
        per_root[i] = e.take();
    });

    CliqueEnumeration out;
    for (auto& list : per_root)
        for (auto& c : list)
            out.cliques.push_back(std::move(c));
    std::sort(out.cliques.begin(), out.cliques.end());
    out.truncated = stop.load() || (options.cancel != nullptr && options.cancel->load());
    return out;
}

SignedSet clique_to_signed_set(const PromisingGraph& g, std::span<const int> clique)
{
    std::vector<int> members;
    std::vector<int> signs;
    members.reserve(clique.size());
    signs.reserve(clique.size());
    for (int node : clique) {
        members.push_back(g.variable_of(node));
        signs.push_back(g.copy_of(node) == 1 ? 1 : -1);
    }
    return SignedSet::canonical(std::move(members), std::move(signs));
}

}  // namespace multipole
