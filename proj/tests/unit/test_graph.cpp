#include "doctest.h"

#include "multipole/error.hpp"
#include "multipole/graph.hpp"
#include "multipole/measures.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace multipole;

namespace {

CorrelationMatrix unchecked_triple(double a01, double a02, double a12)
{
    Matrix m = Matrix::identity(3);
    m(0, 1) = m(1, 0) = a01;
    m(0, 2) = m(2, 0) = a02;
    m(1, 2) = m(2, 1) = a12;
    return CorrelationMatrix(m, CorrelationMatrix::Unchecked{});
}

bool is_clique(const Graph& g, const std::vector<int>& c)
{
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j)
            if (!g.adjacent(c[i], c[j]))
                return false;
    return true;
}

std::vector<std::vector<int>> brute_maximal(const Graph& g, std::size_t min_size)
{
    const int n = static_cast<int>(g.node_count());
    std::vector<std::vector<int>> out;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> c;
        for (int i = 0; i < n; ++i)
            if ((mask >> i) & 1u)
                c.push_back(i);
        if (c.size() < min_size || !is_clique(g, c))
            continue;
        bool maximal = true;
        for (int v = 0; v < n && maximal; ++v) {
            if ((mask >> v) & 1u)
                continue;
            auto bigger = c;
            bigger.push_back(v);
            std::sort(bigger.begin(), bigger.end());
            maximal = !is_clique(g, bigger);
        }
        if (maximal)
            out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

CorrelationMatrix random_corr(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m(i, j) = m(j, i) = u(rng);
    return CorrelationMatrix(m, CorrelationMatrix::Unchecked{});
}

}  // namespace

TEST_CASE("Graph basics")
{
    const std::pair<int, int> e[] = {{0, 1}, {1, 0}, {1, 2}, {2, 2}};
    const auto g = Graph::from_edges(3, e);
    CHECK(g.edge_count() == 2);
    CHECK(g.adjacent(0, 1));
    CHECK(g.adjacent(1, 0));
    CHECK_FALSE(g.adjacent(0, 2));
    CHECK_FALSE(g.adjacent(2, 2));
    CHECK_THROWS_AS(Graph(std::vector<std::vector<int>>{{1}, {}}), ValidationError);
}

TEST_CASE("build_graph edge rules")
{
    const auto a = unchecked_triple(-0.6, 0.5, 0.4);
    const auto pg = build_graph(a, 0.0);
    const auto& g = pg.graph();
    CHECK(g.node_count() == 6);
    const std::vector<int> c{pg.node(0, 1), pg.node(1, 1), pg.node(2, 2)};
    CHECK(is_clique(g, c));
    for (int i = 0; i < 3; ++i)
        CHECK_FALSE(g.adjacent(pg.node(i, 1), pg.node(i, 2)));
    CHECK(pg.variable_of(pg.node(2, 2)) == 2);
    CHECK(pg.copy_of(pg.node(2, 2)) == 2);

    const auto pos = build_graph(CorrelationMatrix::equicorrelated(4, 0.5), 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK_FALSE(pos.graph().adjacent(pos.node(i, 1), pos.node(j, 1)));
            CHECK_FALSE(pos.graph().adjacent(pos.node(i, 2), pos.node(j, 2)));
        }
    for (const auto& cl : maximal_cliques(pos.graph(), {}).cliques)
        CHECK(cl.size() <= 2);

    const auto neg = build_graph(CorrelationMatrix::equicorrelated(4, -0.1), 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            CHECK(neg.graph().adjacent(neg.node(i, 1), neg.node(j, 1)));
            CHECK(neg.graph().adjacent(neg.node(i, 2), neg.node(j, 2)));
        }

    CHECK_THROWS_AS(build_graph(a, 1.5), ValidationError);
}

TEST_CASE("edge list dump")
{
    const auto a = unchecked_triple(-0.6, 0.5, 0.4);
    std::ostringstream out;
    write_edge_list(build_graph(a, 0.0), a, out);
    const std::string s = out.str();
    CHECK(s.find("v1_0 v1_1 -0.6") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(build_graph(a, 0.0).graph().edge_count()));
}

TEST_CASE("maximal_cliques small graphs")
{
    const std::pair<int, int> tri[] = {{0, 1}, {1, 2}, {0, 2}};
    auto r = maximal_cliques(Graph::from_edges(3, tri), {});
    CHECK(r.cliques == std::vector<std::vector<int>>{{0, 1, 2}});

    const std::pair<int, int> path[] = {{0, 1}, {1, 2}};
    r = maximal_cliques(Graph::from_edges(3, path), {});
    CHECK(r.cliques == std::vector<std::vector<int>>{{0, 1}, {1, 2}});

    const std::pair<int, int> cyc[] = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}};
    const auto c5 = Graph::from_edges(5, cyc);
    r = maximal_cliques(c5, {});
    CHECK(r.cliques.size() == 5);
    CHECK(r.cliques == brute_maximal(c5, 1));
    CHECK_FALSE(r.truncated);

    CliqueOptions big;
    big.min_size = 3;
    CHECK(maximal_cliques(c5, big).cliques.empty());
}

TEST_CASE("maximal_cliques equals brute force on random graphs")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 15);
        const double p = 0.2 + 0.6 * u(rng);
        std::vector<std::pair<int, int>> edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (u(rng) < p)
                    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
        const auto g = Graph::from_edges(n, edges);
        for (std::size_t min_size : {1u, 3u}) {
            CliqueOptions opt;
            opt.min_size = min_size;
            opt.threads = 1 + static_cast<unsigned>(trial % 3);
            CHECK(maximal_cliques(g, opt).cliques == brute_maximal(g, min_size));
        }
    }
}

TEST_CASE("clique budget truncates")
{
    // Complement of a perfect matching on 16 nodes: 2^8 maximal cliques.
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 16; ++i)
        for (int j = i + 1; j < 16; ++j)
            if (j != i + 8)
                edges.emplace_back(i, j);
    const auto g = Graph::from_edges(16, edges);
    CHECK(maximal_cliques(g, {}).cliques.size() == 256);
    CliqueOptions opt;
    opt.budget = 10;
    const auto r = maximal_cliques(g, opt);
    CHECK(r.truncated);
    CHECK(r.cliques.size() <= 10);

    std::atomic<bool> stop{true};
    CliqueOptions cancelled;
    cancelled.cancel = &stop;
    CHECK(maximal_cliques(g, cancelled).truncated);
}

TEST_CASE("clique_to_signed_set and mirror pairing")
{
    const auto a = unchecked_triple(-0.6, 0.5, 0.4);
    const auto pg = build_graph(a, 0.0);
    const std::vector<int> c{pg.node(0, 1), pg.node(1, 1), pg.node(2, 2)};
    const std::vector<int> mirror{pg.node(0, 2), pg.node(1, 2), pg.node(2, 1)};
    const auto s = clique_to_signed_set(pg, c);
    CHECK(s.members == std::vector<int>{0, 1, 2});
    CHECK(s.signs == std::vector<int>{1, 1, -1});
    CHECK(clique_to_signed_set(pg, mirror) == s);
    const std::vector<int> plus{pg.node(0, 1), pg.node(2, 1)};
    CHECK(clique_to_signed_set(pg, plus).signs == std::vector<int>{1, 1});
    const std::vector<int> twice{pg.node(0, 1), pg.node(0, 2)};
    CHECK_THROWS_AS(clique_to_signed_set(pg, twice), ValidationError);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = random_corr(8, rng);
        const auto g = build_graph(m, 0.1);
        CliqueOptions opt;
        opt.min_size = 3;
        const auto cl = maximal_cliques(g.graph(), opt).cliques;
        std::set<SignedSet> distinct;
        for (const auto& q : cl) {
            const auto ss = clique_to_signed_set(g, q);
            CHECK(is_negative_clique(m, ss, 0.1));
            distinct.insert(ss);
        }
        CHECK(distinct.size() * 2 == cl.size());
    }
}

TEST_CASE("every negative-equivalent set lies in some clique")
{
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 6 + static_cast<std::size_t>(trial % 4);
        const auto m = random_corr(n, rng);
        const double rho = -0.1 + 0.02 * (trial % 10);
        const auto g = build_graph(m, rho);
        CliqueOptions opt;
        opt.min_size = 3;
        const auto cl = maximal_cliques(g.graph(), opt).cliques;
        std::vector<std::set<int>> vars;
        for (const auto& q : cl) {
            std::set<int> s;
            for (int node : q)
                s.insert(g.variable_of(node));
            vars.push_back(s);
        }
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> sub;
            for (std::size_t i = 0; i < n; ++i)
                if ((mask >> i) & 1u)
                    sub.push_back(static_cast<int>(i));
            if (sub.size() < 3 || !negative_equivalent_witness(m, sub, rho))
                continue;
            const bool covered = std::any_of(vars.begin(), vars.end(), [&](const std::set<int>& s) {
                return std::includes(s.begin(), s.end(), sub.begin(), sub.end());
            });
            CHECK(covered);
        }
    }
}
