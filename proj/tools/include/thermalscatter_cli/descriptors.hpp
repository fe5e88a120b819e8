#pragma once

#include <map>
#include <string>

#include "thermalscatter/grid.hpp"
#include "thermalscatter/perturbation.hpp"

namespace ts::cli {

// "name:key=value,key=value" split into its parts.
struct Descriptor {
  std::string name;
  std::map<std::string, std::string> params;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
};

Descriptor parse_descriptor(const std::string& text);

// Real functions on the line:
//   zero | const:c=C | gauss:amp=A,width=S,centre=C | lorentz:amp=A,r=R (A (1+x^2)^{-r})
//   | file:PATH (real part of a node,weight,re,im table on the run grid, zero beyond it)
// zero yields an empty function.
RealFunction parse_function(const std::string& text, const GridPtr& grid);

// Potentials: wr:r=R | japanese:s=S[,winf=A] | zero | any function descriptor above.
// Function descriptors become custom potentials; gauss and file have compact
// numerical support and are declared rapidly decaying.
PotentialSpec parse_potential(const std::string& text, const GridPtr& grid);

// i | -i | a+bi | a-bi | a,b
cplx parse_complex(const std::string& text);

}  // namespace ts::cli
