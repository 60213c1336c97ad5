#include "doctest.h"

#include "multipole/error.hpp"
#include "multipole/io.hpp"
#include "multipole/miner.hpp"

#include <cmath>
#include <limits>

using namespace multipole;

namespace {

NamedRecord named(std::vector<std::string> m, std::vector<int> s, double sigma, double gain)
{
    NamedRecord r;
    r.members = std::move(m);
    r.signs = std::move(s);
    r.sigma = sigma;
    r.gain = gain;
    r.weights.assign(r.members.size(), 1.0 / std::sqrt(static_cast<double>(r.members.size())));
    return r;
}

}  // namespace

TEST_CASE("format_double round trips")
{
    for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0}) {
        const auto s = format_double(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("records JSON round trip")
{
    const std::vector<NamedRecord> v{named({"a", "b", "c"}, {1, -1, 1}, 0.9, 0.3),
                                     named({"d", "e", "f", "g"}, {1, 1, 1, -1}, 0.8, 0.2)};
    const auto text = records_to_json(v);
    CHECK(text.find("\"linear_dependence\"") != std::string::npos);
    CHECK(text.find("\"size\": 4") != std::string::npos);
    const auto back = records_from_json(text);
    REQUIRE(back.size() == 2);
    CHECK(back[1].members == v[1].members);
    CHECK(back[1].signs == v[1].signs);
    CHECK(back[0].sigma == 0.9);
    CHECK(back[0].weights == v[0].weights);
    CHECK(records_to_json(back) == text);

    CHECK_THROWS_AS(records_from_json("{}"), ValidationError);
    CHECK_THROWS_AS(records_from_json("[{\"members\": [\"a\"]}]"), ValidationError);
    CHECK_THROWS_AS(records_from_json("not json"), ValidationError);
}

TEST_CASE("records CSV")
{
    const std::vector<NamedRecord> v{named({"a", "b", "c"}, {1, -1, 1}, 0.9, 0.25)};
    const auto csv = records_to_csv(v);
    CHECK(csv.rfind("size,members,signs,linear_dependence,linear_gain,weights\n", 0) == 0);
    CHECK(csv.find("3,a;b;c,1;-1;1,0.9,0.25,") != std::string::npos);
}

TEST_CASE("merge removes duplicates and subsets")
{
    const std::vector<NamedRecord> p1{named({"a", "b", "c"}, {1, 1, 1}, 0.9, 0.3),
                                      named({"x", "y", "z"}, {1, 1, -1}, 0.7, 0.2)};
    const std::vector<NamedRecord> p2{named({"c", "b", "a"}, {1, 1, 1}, 0.9, 0.3),
                                      named({"a", "b", "c", "d"}, {1, 1, 1, 1}, 0.95, 0.2)};
    const std::vector<std::vector<NamedRecord>> parts{p1, p2};
    const auto m = merge_records(parts);
    REQUIRE(m.size() == 2);
    CHECK(m[0].members == std::vector<std::string>{"a", "b", "c", "d"});
    CHECK(m[1].members == std::vector<std::string>{"x", "y", "z"});
    CHECK(m[1].signs == std::vector<int>{1, 1, -1});
}

TEST_CASE("scatter and bounds CSV")
{
    const std::vector<ScatterSample> s{{3, 0.25, -0.5}};
    CHECK(scatter_to_csv(s) == "k,gain,rho_s\n3,0.25,-0.5\n");
    BoundsValidation v;
    BoundsRow row;
    row.k = 3;
    row.report = bound_report(CorrelationMatrix::equicorrelated(3, -0.5));
    row.gain = row.report.gain;
    v.rows.push_back(row);
    const auto csv = bounds_to_csv(v);
    CHECK(csv.find("\n3,") != std::string::npos);
    CHECK(csv.substr(csv.size() - 9) == ",0,0,0,0\n");
}

TEST_CASE("text files")
{
    CHECK_THROWS_AS(read_text_file("/nonexistent/x"), IoError);
    CHECK_THROWS_AS(write_text_file("/nonexistent/dir/x", "y"), IoError);
}
