#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "regdepth/core.hpp"

namespace regdepth {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Reads a dataset whose header is x1,...,x{p-1},y (p is the column
/// count). Blank lines and lines starting with '#' are skipped.
Dataset read_dataset_csv(std::istream& in, std::string label = {});
Dataset read_dataset_csv_file(const std::string& path);

void write_dataset_csv(std::ostream& out, const Dataset& d);
void write_dataset_csv_file(const std::string& path, const Dataset& d);

/// Parses "a,b,c" into doubles; throws InputError on malformed input.
std::vector<double> parse_number_list(const std::string& s);

}  // namespace regdepth
