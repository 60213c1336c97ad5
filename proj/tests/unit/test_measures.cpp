#include "doctest.h"

#include "multipole/dataset.hpp"
#include "multipole/error.hpp"
#include "multipole/measures.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace multipole;

namespace {

CorrelationMatrix triple(double a01, double a02, double a12, bool checked = true)
{
    Matrix m = Matrix::identity(3);
    m(0, 1) = m(1, 0) = a01;
    m(0, 2) = m(2, 0) = a02;
    m(1, 2) = m(2, 1) = a12;
    if (checked)
        return CorrelationMatrix(m);
    return CorrelationMatrix(m, CorrelationMatrix::Unchecked{});
}

CorrelationMatrix random_psd(std::size_t k, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        Matrix m = Matrix::identity(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                m(i, j) = m(j, i) = u(rng);
        if (is_psd(m, 1e-10))
            return CorrelationMatrix(m, CorrelationMatrix::Unchecked{});
    }
}

std::vector<int> iota_vec(int k)
{
    std::vector<int> v(static_cast<std::size_t>(k));
    std::iota(v.begin(), v.end(), 0);
    return v;
}

}  // namespace

TEST_CASE("SignedSet canonical form")
{
    const auto s = SignedSet::canonical({3, 1, 2}, {1, -1, 1});
    CHECK(s.members == std::vector<int>{1, 2, 3});
    CHECK(s.signs == std::vector<int>{1, -1, -1});
    CHECK_THROWS_AS(SignedSet::canonical({1, 1}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(SignedSet::canonical({1, 2}, {1, 0}), ValidationError);
    CHECK_THROWS_AS(SignedSet::canonical({1, 2}, {1}), ValidationError);
    CHECK(SignedSet::all_positive({4, 2}).signs == std::vector<int>{1, 1});
}

TEST_CASE("lvnlc")
{
    Matrix m = Matrix::identity(2);
    m(0, 1) = m(1, 0) = -1.0;
    const CorrelationMatrix anti(m);
    const auto l = lvnlc(anti, iota_vec(2));
    CHECK(std::abs(l.variance) < 1e-12);
    CHECK(std::abs(l.weights[0] - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(l.weights[1] - 1 / std::sqrt(2.0)) < 1e-12);

    CHECK(std::abs(lvnlc(CorrelationMatrix(Matrix::identity(3)), iota_vec(3)).variance - 1.0) < 1e-12);

    const auto e = lvnlc(CorrelationMatrix::equicorrelated(3, -0.5), iota_vec(3));
    CHECK(std::abs(e.variance) < 1e-12);
    for (double w : e.weights)
        CHECK(std::abs(w - 1 / std::sqrt(3.0)) < 1e-12);

    const std::vector<int> one{0};
    CHECK_THROWS_AS(lvnlc(anti, one), ValidationError);
}

TEST_CASE("linear_dependence")
{
    Matrix m = Matrix::identity(2);
    m(0, 1) = m(1, 0) = -1.0;
    CHECK(linear_dependence(CorrelationMatrix(m), iota_vec(2)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(linear_dependence(CorrelationMatrix(Matrix::identity(3)), iota_vec(3)) == 0.0);
    CHECK(std::abs(linear_dependence(CorrelationMatrix::equicorrelated(3, -0.4), iota_vec(3)) - 0.8) < 1e-12);
}

TEST_CASE("linear_gain")
{
    const double deletions[] = {0.67, 0.42, 0.26};
    CHECK(std::abs(gain_from_dependences(0.92, deletions) - 0.25) < 1e-12);
    // Same arithmetic from the LVNLC variances.
    const double variances[] = {0.33, 0.58, 0.74};
    double best = 0;
    for (double v : variances)
        best = std::max(best, 1.0 - v);
    CHECK(std::abs((1.0 - 0.08) - best - 0.25) < 1e-12);

    CHECK(std::abs(linear_gain(CorrelationMatrix::equicorrelated(3, -0.5), iota_vec(3)) - 0.5) < 1e-9);
    CHECK(linear_gain(CorrelationMatrix(Matrix::identity(3)), iota_vec(3)) == 0.0);
    CHECK_THROWS_AS(linear_gain(CorrelationMatrix(Matrix::identity(3)), iota_vec(2)), ValidationError);
}

TEST_CASE("range, monotonicity, sign invariance and the eigengap identity")
{
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 3 + static_cast<std::size_t>(trial % 4);
        const auto a = random_psd(k, rng);
        const auto all = iota_vec(static_cast<int>(k));
        const double s = linear_dependence(a, all);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        double min_mu = 1e9;
        for (std::size_t drop = 0; drop < k; ++drop) {
            std::vector<int> sub;
            for (int i : all)
                if (i != static_cast<int>(drop))
                    sub.push_back(i);
            CHECK(linear_dependence(a, sub) <= s + 1e-9);
            min_mu = std::min(min_mu, lvnlc(a, sub).variance);
        }
        const double g = linear_gain(a, all);
        CHECK(g >= -1e-9);
        CHECK(std::abs(g - (min_mu - lvnlc(a, all).variance)) < 1e-9);

        Matrix f(k, k);
        std::vector<double> d(k);
        for (auto& x : d)
            x = coin(rng) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                f(i, j) = d[i] * a(i, j) * d[j];
        const CorrelationMatrix fa(f, CorrelationMatrix::Unchecked{});
        CHECK(std::abs(linear_dependence(fa, all) - s) < 1e-10);
        CHECK(std::abs(linear_gain(fa, all) - g) < 1e-10);
    }
}

TEST_CASE("flip_negative_weights")
{
    const std::vector<int> members{1, 2, 3};
    const std::vector<double> w{0.6, 0.65, -0.47};
    const auto s = flip_negative_weights(members, w);
    CHECK(s.signs == std::vector<int>{1, 1, -1});
    const std::vector<double> neg{-0.6, -0.65, 0.47};
    CHECK(flip_negative_weights(members, neg) == s);
    const std::vector<double> tiny{0.5, -5e-11, 0.5};
    CHECK(flip_negative_weights(members, tiny).signs == std::vector<int>{1, 1, 1});
}

TEST_CASE("self_canceling_form")
{
    const auto a = CorrelationMatrix::equicorrelated(3, -0.3);
    const auto f = self_canceling_form(a, iota_vec(3));
    CHECK(f.signed_set.signs == std::vector<int>{1, 1, 1});
    CHECK(std::abs(f.rho_s + 0.3) < 1e-12);

    // Variable 2 is nearly a copy of 0 + 1, so the LVNLC flips it.
    const auto b = triple(0.1, 0.7, 0.7);
    const auto g = self_canceling_form(b, iota_vec(3));
    CHECK(g.signed_set.signs == std::vector<int>{1, 1, -1});
    CHECK(std::abs(g.rho_s - max_adjusted_correlation(b, g.signed_set)) < 1e-12);
    CHECK(std::abs(g.rho_s - 0.1) < 1e-12);
    double norm = 0;
    for (double w : g.weights) {
        CHECK(w >= -1e-10);
        norm += w * w;
    }
    CHECK(std::abs(norm - 1.0) < 1e-12);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = random_psd(4, rng);
        const auto form = self_canceling_form(r, iota_vec(4));
        Matrix adj(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                adj(i, j) = form.signed_set.signs[i] * r(i, j) * form.signed_set.signs[j];
        const auto x = eigenvalues_symmetric(r.matrix());
        const auto y = eigenvalues_symmetric(adj);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(std::abs(x[i] - y[i]) < 1e-10);
        CHECK(form.signed_set.signs[0] == 1);
    }
}

TEST_CASE("is_negative_clique")
{
    const auto neg = CorrelationMatrix::equicorrelated(3, -0.2);
    CHECK(is_negative_clique(neg, SignedSet::all_positive({0, 1, 2}), 0.0));
    const auto m = triple(-0.6, 0.5, 0.4, false);
    CHECK_FALSE(is_negative_clique(m, SignedSet::all_positive({0, 1, 2}), 0.0));
    CHECK(is_negative_clique(m, SignedSet::canonical({0, 1, 2}, {1, 1, -1}), 0.0));
}

TEST_CASE("negative_equivalent_witness")
{
    const auto m = triple(-0.6, 0.5, 0.4, false);
    const auto w = negative_equivalent_witness(m, iota_vec(3), 0.0);
    REQUIRE(w.has_value());
    CHECK(w->signs == std::vector<int>{1, 1, -1});

    CHECK_FALSE(negative_equivalent_witness(CorrelationMatrix::equicorrelated(3, 0.5), iota_vec(3), 0.0));

    const auto n = negative_equivalent_witness(CorrelationMatrix::equicorrelated(3, -0.2), iota_vec(3), 0.0);
    REQUIRE(n.has_value());
    CHECK(n->signs == std::vector<int>{1, 1, 1});

    CHECK_THROWS_AS(negative_equivalent_witness(CorrelationMatrix(Matrix::identity(26)), iota_vec(26), 0.0),
                    ValidationError);
}

TEST_CASE("witness agrees with the two-part partition characterization")
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> rho_dist(-0.3, 0.3);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 4 + trial % 3;
        const auto a = random_psd(static_cast<std::size_t>(k), rng);
        const double rho = rho_dist(rng);
        bool split = false;
        for (unsigned mask = 0; mask < (1u << k) && !split; ++mask) {
            bool ok = true;
            for (int i = 0; i < k && ok; ++i)
                for (int j = i + 1; j < k && ok; ++j) {
                    const bool same = ((mask >> i) & 1u) == ((mask >> j) & 1u);
                    ok = same ? a(i, j) <= rho : a(i, j) >= -rho;
                }
            split = ok;
        }
        const auto w = negative_equivalent_witness(a, iota_vec(k), rho);
        CHECK(w.has_value() == split);
        if (w)
            CHECK(is_negative_clique(a, *w, rho));
    }
}

TEST_CASE("evaluate_multipole")
{
    const auto a = CorrelationMatrix::equicorrelated(3, -0.5);
    const auto r = evaluate_multipole(a, iota_vec(3));
    CHECK(std::abs(r.sigma - 1.0) < 1e-9);
    CHECK(std::abs(r.gain - 0.5) < 1e-9);
    CHECK(r.set.signs == std::vector<int>{1, 1, 1});
    CHECK(r.degenerate == false);
    const auto id = evaluate_multipole(CorrelationMatrix(Matrix::identity(3)), iota_vec(3));
    CHECK(id.degenerate);
}
