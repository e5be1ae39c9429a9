#include "regdepth/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace regdepth {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty())
    throw InputError("csv line " + std::to_string(line) + ": cannot parse number '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Dataset read_dataset_csv(std::istream& in, std::string label) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    header = split(t);
    break;
  }
  if (header.size() < 2) throw InputError("csv: missing header x1,...,y");
  const std::size_t p = header.size();
  for (std::size_t j = 0; j + 1 < p; ++j)
    if (header[j] != "x" + std::to_string(j + 1))
      throw InputError("csv: header column " + std::to_string(j + 1) + " should be x" +
                       std::to_string(j + 1) + ", got '" + header[j] + "'");
  if (header.back() != "y") throw InputError("csv: last header column must be y");

  std::vector<double> xs;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t);
    if (cells.size() != p)
      throw InputError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(p) +
                       " values, got " + std::to_string(cells.size()));
    for (std::size_t j = 0; j + 1 < p; ++j) xs.push_back(parse_double(cells[j], lineno));
    ys.push_back(parse_double(cells.back(), lineno));
  }
  return Dataset(p, std::move(xs), std::move(ys), std::move(label));
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_dataset_csv(in, path);
}

void write_dataset_csv(std::ostream& out, const Dataset& d) {
  for (std::size_t j = 0; j < d.x_dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (double v : d.x(i)) out << format_double(v) << ',';
    out << format_double(d.y(i)) << '\n';
  }
}

void write_dataset_csv_file(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_dataset_csv(out, d);
}

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> v;
  for (const auto& cell : split(s)) v.push_back(parse_double(cell, 1));
  if (v.empty()) throw InputError("empty number list");
  return v;
}

}  // namespace regdepth
