#include "multipole/io.hpp"

#include "multipole/error.hpp"
#include "multipole/miner.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace multipole {

using nlohmann::json;

std::string format_double(double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::vector<NamedRecord> name_records(std::span<const MultipoleRecord> records,
                                      std::span<const std::string> names)
{
    std::vector<NamedRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        NamedRecord n;
        for (int m : r.set.members)
            n.members.push_back(names[static_cast<std::size_t>(m)]);
        n.signs = r.set.signs;
        n.sigma = r.sigma;
        n.gain = r.gain;
        n.weights = r.weights;
        n.degenerate = r.degenerate;
        out.push_back(std::move(n));
    }
    return out;
}

std::string records_to_json(std::span<const NamedRecord> records)
{
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back({{"members", r.members},
                       {"signs", r.signs},
                       {"linear_dependence", r.sigma},
                       {"linear_gain", r.gain},
                       {"weights", r.weights},
                       {"size", r.members.size()},
                       {"degenerate", r.degenerate}});
    }
    return arr.dump(2) + "\n";
}

std::vector<NamedRecord> records_from_json(const std::string& text)
{
    std::vector<NamedRecord> out;
    try {
        const auto arr = json::parse(text);
        if (!arr.is_array())
            throw ValidationError("result file: expected a JSON array");
        for (const auto& o : arr) {
            NamedRecord r;
            r.members = o.at("members").get<std::vector<std::string>>();
            r.signs = o.at("signs").get<std::vector<int>>();
            r.sigma = o.at("linear_dependence").get<double>();
            r.gain = o.at("linear_gain").get<double>();
            r.weights = o.at("weights").get<std::vector<double>>();
            r.degenerate = o.value("degenerate", false);
            if (r.signs.size() != r.members.size() || r.weights.size() != r.members.size())
                throw ValidationError("result file: members, signs and weights differ in length");
            out.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("result file: ") + e.what());
    }
    return out;
}

namespace {

template <class T, class F>
std::string join(const std::vector<T>& v, F&& fmt)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ';';
        s += fmt(v[i]);
    }
    return s;
}

}  // namespace

std::string records_to_csv(std::span<const NamedRecord> records)
{
    std::string out = "size,members,signs,linear_dependence,linear_gain,weights\n";
    for (const auto& r : records) {
        out += std::to_string(r.members.size()) + ',';
        out += join(r.members, [](const std::string& s) { return s; }) + ',';
        out += join(r.signs, [](int s) { return std::to_string(s); }) + ',';
        out += format_double(r.sigma) + ',' + format_double(r.gain) + ',';
        out += join(r.weights, [](double w) { return format_double(w); }) + '\n';
    }
    return out;
}

std::vector<NamedRecord> merge_records(std::span<const std::vector<NamedRecord>> parts)
{
    std::map<std::string, int> index;
    for (const auto& part : parts)
        for (const auto& r : part)
            for (const auto& m : r.members)
                index.emplace(m, 0);
    std::vector<std::string> names;
    for (auto& [name, i] : index) {
        i = static_cast<int>(names.size());
        names.push_back(name);
    }

    std::vector<MultipoleRecord> all;
    for (const auto& part : parts) {
        for (const auto& r : part) {
            std::vector<std::size_t> order(r.members.size());
            for (std::size_t i = 0; i < order.size(); ++i)
                order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
                return index.at(r.members[x]) < index.at(r.members[y]);
            });
            std::vector<int> members;
            std::vector<int> signs;
            MultipoleRecord rec;
            for (auto i : order) {
                members.push_back(index.at(r.members[i]));
                signs.push_back(r.signs[i]);
                rec.weights.push_back(r.weights[i]);
            }
            rec.set = SignedSet::canonical(std::move(members), std::move(signs));
            rec.sigma = r.sigma;
            rec.gain = r.gain;
            rec.degenerate = r.degenerate;
            all.push_back(std::move(rec));
        }
    }
    auto kept = remove_non_maximal(std::move(all));
    sort_records(kept);
    return name_records(kept, names);
}

std::string scatter_to_csv(std::span<const ScatterSample> samples)
{
    std::string out = "k,gain,rho_s\n";
    for (const auto& s : samples)
        out += std::to_string(s.k) + ',' + format_double(s.gain) + ',' + format_double(s.rho_s) + '\n';
    return out;
}

std::string bounds_to_csv(const BoundsValidation& v)
{
    std::string out =
        "k,gain,rho_s,corollary1_bound,corollary2_bound,size_cap_bound,max_theorem1_slack,"
        "theorem1_violation,corollary1_violation,corollary2_violation,size_cap_violation\n";
    for (const auto& row : v.rows) {
        // Smallest margin ||C_j||_2 - delta_lambda_j over columns.
        double slack = 0.0;
        bool first = true;
        for (const auto& c : row.report.columns) {
            const double s = c.c_norm2 - c.delta_lambda;
            if (first || s < slack)
                slack = s;
            first = false;
        }
        auto flag = [&](auto pred) {
            return std::any_of(row.violations.begin(), row.violations.end(), pred) ? "1" : "0";
        };
        out += std::to_string(row.k) + ',' + format_double(row.gain) + ',' +
               format_double(row.rho_s) + ',' + format_double(row.report.corollary1_bound) + ',' +
               format_double(row.report.corollary2_bound) + ',' +
               format_double(row.report.size_cap_bound) + ',' + format_double(slack) + ',';
        out += flag([](const BoundViolation& b) {
            return b.kind == BoundKind::theorem1_norm2 || b.kind == BoundKind::theorem1_norm1;
        });
        out += ',';
        out += flag([](const BoundViolation& b) { return b.kind == BoundKind::corollary1; });
        out += ',';
        out += flag([](const BoundViolation& b) { return b.kind == BoundKind::corollary2; });
        out += ',';
        out += flag([](const BoundViolation& b) { return b.kind == BoundKind::size_cap; });
        out += '\n';
    }
    return out;
}

std::string truth_to_json(const SynthOutput& s)
{
    json arr = json::array();
    for (const auto& g : s.truth) {
        std::vector<std::string> names;
        for (int m : g)
            names.push_back(s.dataset.names()[static_cast<std::size_t>(m)]);
        arr.push_back({{"members", names}, {"size", g.size()}});
    }
    return arr.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace multipole
