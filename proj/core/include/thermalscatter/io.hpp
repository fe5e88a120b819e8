#pragma once

#include <iosfwd>
#include <string>

#include "thermalscatter/grid.hpp"
#include "thermalscatter/operators.hpp"

namespace ts {

// CSV with header node,weight,re,im and one row per grid node, at round-trip precision.
void write_csv(std::ostream& out, const SampledFunction& f);
void write_csv(const std::string& path, const SampledFunction& f);

// Reads a CSV written by write_csv. Nodes and weights must match the grid to 1e-12
// relative, otherwise ContractError.
SampledFunction read_csv(std::istream& in, const GridPtr& grid);
SampledFunction read_csv(const std::string& path, const GridPtr& grid);

// Kernel table x,y,re,im over all node pairs of the grid.
void write_kernel_csv(std::ostream& out, const KernelOperator& k, const QuadratureGrid& grid);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace ts
