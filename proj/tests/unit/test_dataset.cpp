#include "doctest.h"

#include "multipole/dataset.hpp"
#include "multipole/error.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace multipole;

namespace {

TimeSeriesDataset parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_csv(in, "test.csv");
}

double mean(std::span<const double> x)
{
    double s = 0;
    for (double v : x)
        s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x)
{
    const double m = mean(x);
    double s = 0;
    for (double v : x)
        s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

std::string message_of(const std::string& text)
{
    try {
        parse(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("parse_csv reads header and columns in file order")
{
    std::string text = "a,b,c\n";
    for (int t = 0; t < 100; ++t)
        text += std::to_string(t) + "," + std::to_string(2 * t) + "," + std::to_string(-t) + "\n";
    const auto d = parse(text);
    CHECK(d.width() == 3);
    CHECK(d.length() == 100);
    CHECK(d.names()[1] == "b");
    CHECK(d.column(1)[7] == 14);
    CHECK_FALSE(d.standardized());
    CHECK(d.find("c") == 2);
    CHECK(d.find("zz") == -1);
}

TEST_CASE("parse_csv validation")
{
    std::string nan_file = "a,b\n";
    for (int t = 1; t <= 6; ++t)
        nan_file += t == 5 ? "1,NaN\n" : "1,2\n";
    const auto msg = message_of(nan_file);
    CHECK(msg.find("row 5") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);

    CHECK(message_of("a,b,a\n1,2,3\n4,5,6\n7,8,9\n").find("duplicate") != std::string::npos);
    CHECK(message_of("a,b\n1,2\n3\n4,5\n").find("row") != std::string::npos);
    CHECK_THROWS_AS(parse("a,b\n1,inf\n2,3\n4,5\n"), ValidationError);
    CHECK_THROWS_AS(parse("a,b\n1,x\n2,3\n4,5\n"), ValidationError);
    CHECK_THROWS_AS(parse("a,b\n1,2\n3,4\n"), ValidationError);     // T < 3
    CHECK_THROWS_AS(parse("a\n1\n2\n3\n"), ValidationError);        // N < 2
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), IoError);
}

TEST_CASE("parse_csv tolerates BOM, quotes and CRLF")
{
    const auto d = parse("\xEF\xBB\xBF\"a\",b\r\n1,2\r\n3,4\r\n5,6\r\n");
    CHECK(d.names()[0] == "a");
    CHECK(d.column(1)[2] == 6);
}

TEST_CASE("write_csv round trips exactly")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    std::vector<std::vector<double>> cols(3, std::vector<double>(20));
    for (auto& c : cols)
        for (auto& x : c)
            x = n(rng);
    const TimeSeriesDataset d({"p", "q", "r"}, cols);
    std::ostringstream out;
    write_csv(d, out);
    const auto back = parse(out.str());
    CHECK(back.columns() == d.columns());
    CHECK(back.names() == d.names());
}

TEST_CASE("standardize")
{
    const TimeSeriesDataset d({"a", "b"}, {{1, 2, 3, 4}, {4, 1, 0, 2}});
    const auto s = standardize(d, false);
    CHECK(s.standardized());
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(mean(s.column(j))) <= 1e-9);
        CHECK(std::abs(variance(s.column(j)) - 1.0) <= 1e-9);
    }

    const TimeSeriesDataset c({"a", "flat"}, {{1, 2, 3, 4}, {5, 5, 5, 5}});
    try {
        standardize(c, false);
        FAIL("expected error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("flat") != std::string::npos);
    }
}

TEST_CASE("detrend removes the linear trend")
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n;
    const std::size_t T = 500;
    std::vector<double> y(T), z(T), t(T);
    for (std::size_t i = 0; i < T; ++i) {
        t[i] = static_cast<double>(i);
        y[i] = 2.0 * t[i] + n(rng);
        z[i] = n(rng);
    }
    const auto s = standardize(TimeSeriesDataset({"y", "z"}, {y, z}), true);
    const double tm = mean(t);
    double num = 0, den = 0, yy = 0;
    for (std::size_t i = 0; i < T; ++i) {
        num += (t[i] - tm) * s.column(0)[i];
        den += (t[i] - tm) * (t[i] - tm);
        yy += s.column(0)[i] * s.column(0)[i];
    }
    CHECK(std::abs(num / std::sqrt(den * yy)) < 1e-9);
}

TEST_CASE("correlation_matrix")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    std::vector<double> x(50);
    for (auto& v : x)
        v = n(rng);
    std::vector<double> neg(x), same(x);
    for (auto& v : neg)
        v = -v;
    const auto s = standardize(TimeSeriesDataset({"x", "neg", "same"}, {x, neg, same}), false);
    const auto a = correlation_matrix(s);
    CHECK(std::abs(a(0, 1) + 1.0) <= 1e-12);
    CHECK(a(0, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a(1, 1) == 1.0);

    CHECK_THROWS_AS(correlation_matrix(TimeSeriesDataset({"a", "b"}, {{1, 2, 3}, {3, 1, 2}})),
                    ValidationError);
}

TEST_CASE("white noise correlations are small; threads do not change bits")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    const std::size_t N = 70, T = 10000;
    std::vector<std::vector<double>> cols(N, std::vector<double>(T));
    std::vector<std::string> names;
    for (std::size_t j = 0; j < N; ++j) {
        names.push_back("v" + std::to_string(j));
        for (auto& v : cols[j])
            v = n(rng);
    }
    const auto s = standardize(TimeSeriesDataset(names, cols), false);
    const auto a = correlation_matrix(s, 1);
    const auto b = correlation_matrix(s, 4);
    CHECK(a.matrix() == b.matrix());
    double worst = 0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j)
            worst = std::max(worst, std::abs(a(i, j)));
    CHECK(worst < 0.05);
}

TEST_CASE("correlation is invariant under positive affine rescaling; sign flips negate")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    std::vector<std::vector<double>> cols(4, std::vector<double>(200));
    for (auto& c : cols)
        for (auto& v : c)
            v = n(rng);
    cols[1] = cols[0];
    for (std::size_t i = 0; i < 200; ++i)
        cols[1][i] += 0.5 * cols[2][i];
    auto scaled = cols;
    auto flipped = cols;
    for (std::size_t i = 0; i < 200; ++i) {
        scaled[0][i] = 3.5 * cols[0][i] + 100.0;
        scaled[2][i] = 0.01 * cols[2][i] - 7.0;
        flipped[1][i] = -cols[1][i];
    }
    const std::vector<std::string> names{"a", "b", "c", "d"};
    const auto a = correlation_matrix(standardize(TimeSeriesDataset(names, cols), false));
    const auto b = correlation_matrix(standardize(TimeSeriesDataset(names, scaled), false));
    const auto f = correlation_matrix(standardize(TimeSeriesDataset(names, flipped), false));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(std::abs(a(i, j) - b(i, j)) <= 1e-9);
            const double expect = (i != j && (i == 1 || j == 1)) ? -a(i, j) : a(i, j);
            CHECK(std::abs(f(i, j) - expect) <= 1e-9);
        }
}

TEST_CASE("CorrelationMatrix invariants")
{
    Matrix m = Matrix::identity(3);
    m(0, 1) = m(1, 0) = 0.3;
    CHECK_NOTHROW(CorrelationMatrix{m});
    Matrix bad_diag = m;
    bad_diag(2, 2) = 0.999;
    CHECK_THROWS_AS(CorrelationMatrix{bad_diag}, ValidationError);
    Matrix asym = m;
    asym(1, 0) = 0.3 + 1e-11;
    CHECK_THROWS_AS(CorrelationMatrix{asym}, ValidationError);
    Matrix range = m;
    range(0, 2) = range(2, 0) = 1.5;
    CHECK_THROWS_AS(CorrelationMatrix{range}, ValidationError);
    CHECK_THROWS_AS(CorrelationMatrix::equicorrelated(3, -0.9), ValidationError);
    const auto e = CorrelationMatrix::equicorrelated(4, -1.0 / 3.0);
    CHECK(e(0, 3) == doctest::Approx(-1.0 / 3.0));
}
