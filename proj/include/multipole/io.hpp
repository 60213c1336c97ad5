#pragma once

// File formats: multipole result JSON/CSV, scatter and bounds CSV reports,
// ground-truth JSON for synthetic datasets.

#include "multipole/measures.hpp"
#include "multipole/stats.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace multipole {

// A result record with members identified by name (the on-disk form).
struct NamedRecord {
    std::vector<std::string> members;
    std::vector<int> signs;
    double sigma = 0.0;
    double gain = 0.0;
    std::vector<double> weights;
    bool degenerate = false;
};

std::vector<NamedRecord> name_records(std::span<const MultipoleRecord> records,
                                      std::span<const std::string> names);

// JSON array of {members, signs, linear_dependence, linear_gain, weights, size, degenerate}.
std::string records_to_json(std::span<const NamedRecord> records);
std::vector<NamedRecord> records_from_json(const std::string& text);

// One row per multipole: size,members,signs,linear_dependence,linear_gain,weights
// with list fields joined by ';'.
std::string records_to_csv(std::span<const NamedRecord> records);

// Unions several result lists, then drops duplicates and non-maximal sets.
std::vector<NamedRecord> merge_records(std::span<const std::vector<NamedRecord>> parts);

std::string scatter_to_csv(std::span<const ScatterSample> samples);
std::string bounds_to_csv(const BoundsValidation& v);

// [{members: [names], size}] for each planted set.
std::string truth_to_json(const SynthOutput& s);

// Round-trip decimal representation.
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace multipole
