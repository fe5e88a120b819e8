#include "thermalscatter/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "thermalscatter/error.hpp"

namespace ts {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const SampledFunction& f) {
  const auto& g = f.layout();
  out << "node,weight,re,im\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    out << format_double(g.node(i)) << ',' << format_double(g.weight(i)) << ',' << format_double(f[i].real()) << ','
        << format_double(f[i].imag()) << '\n';
  }
}

void write_csv(const std::string& path, const SampledFunction& f) {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open '" + path + "' for writing");
  write_csv(out, f);
  if (!out) throw ContractError("write to '" + path + "' failed");
}

namespace {

double parse_field(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e)
    throw ContractError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

SampledFunction read_csv(std::istream& in, const GridPtr& grid) {
  std::string line;
  if (!std::getline(in, line)) throw ContractError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "node,weight,re,im") throw ContractError("csv: expected header node,weight,re,im");
  SampledFunction f(grid);
  std::size_t row = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (row >= grid->size()) throw ContractError("csv: more rows than grid nodes");
    std::istringstream fields(line);
    std::string cell[4];
    for (auto& c : cell)
      if (!std::getline(fields, c, ',')) throw ContractError("csv line " + std::to_string(lineno) + ": expected 4 fields");
    const double x = parse_field(cell[0], lineno);
    const double w = parse_field(cell[1], lineno);
    if (!close(x, grid->node(row)) || !close(w, grid->weight(row)))
      throw ContractError("csv line " + std::to_string(lineno) + ": node or weight does not match the grid");
    f.values()[static_cast<Eigen::Index>(row)] = cplx(parse_field(cell[2], lineno), parse_field(cell[3], lineno));
    ++row;
  }
  if (row != grid->size())
    throw ContractError("csv: " + std::to_string(row) + " rows for a grid of " + std::to_string(grid->size()));
  return f;
}

SampledFunction read_csv(const std::string& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open '" + path + "'");
  return read_csv(in, grid);
}

void write_kernel_csv(std::ostream& out, const KernelOperator& k, const QuadratureGrid& grid) {
  out << "x,y,re,im\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const cplx v = k.kernel(grid.node(i), grid.node(j));
      out << format_double(grid.node(i)) << ',' << format_double(grid.node(j)) << ',' << format_double(v.real()) << ','
          << format_double(v.imag()) << '\n';
    }
  }
}

}  // namespace ts
