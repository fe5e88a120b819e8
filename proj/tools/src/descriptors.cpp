#include "thermalscatter_cli/descriptors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermalscatter/error.hpp"
#include "thermalscatter/io.hpp"
#include "thermalscatter/operators.hpp"

namespace ts::cli {

namespace {

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ContractError(what + ": expected a number, got '" + text + "'");
  return v;
}

constexpr double rapid_decay = std::numeric_limits<double>::infinity();

}  // namespace

double Descriptor::number(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw ContractError("descriptor '" + name + "' needs " + key + "=...");
  return parse_number(it->second, name + "." + key);
}

double Descriptor::number(const std::string& key, double fallback) const {
  return params.count(key) ? number(key) : fallback;
}

Descriptor parse_descriptor(const std::string& text) {
  Descriptor d;
  const auto colon = text.find(':');
  d.name = text.substr(0, colon);
  if (d.name.empty()) throw ContractError("empty descriptor");
  if (colon == std::string::npos) return d;
  const std::string rest = text.substr(colon + 1);
  if (d.name == "file") {
    d.params["path"] = rest;
    return d;
  }
  std::istringstream in(rest);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ContractError("descriptor '" + text + "': expected key=value");
    d.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return d;
}

namespace {

void require_keys(const Descriptor& d, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : d.params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ContractError("descriptor '" + d.name + "': unknown parameter '" + k + "'");
  }
}

RealFunction tabulated(const std::string& path, const GridPtr& grid) {
  const SampledFunction f = read_csv(path, grid);
  const double edge = grid->cutoff();
  return [f, edge](double x) {
    if (std::abs(x) > edge) return 0.0;
    return interpolate(f, x).real();
  };
}

}  // namespace

RealFunction parse_function(const std::string& text, const GridPtr& grid) {
  const Descriptor d = parse_descriptor(text);
  if (d.name == "zero") {
    require_keys(d, {});
    return {};
  }
  if (d.name == "const") {
    require_keys(d, {"c"});
    const double c = d.number("c");
    return [c](double) { return c; };
  }
  if (d.name == "gauss") {
    require_keys(d, {"amp", "width", "centre"});
    const double a = d.number("amp", 1.0), s = d.number("width", 1.0), c = d.number("centre", 0.0);
    if (!(s > 0.0)) throw ContractError("gauss: width must be positive");
    return [a, s, c](double x) { return a * std::exp(-0.5 * (x - c) * (x - c) / (s * s)); };
  }
  if (d.name == "lorentz") {
    require_keys(d, {"amp", "r"});
    const double a = d.number("amp", 1.0), r = d.number("r", 1.0);
    return [a, r](double x) { return a * std::pow(1.0 + x * x, -r); };
  }
  if (d.name == "file") return tabulated(d.params.at("path"), grid);
  throw ContractError("unknown function descriptor '" + text + "'");
}

PotentialSpec parse_potential(const std::string& text, const GridPtr& grid) {
  const Descriptor d = parse_descriptor(text);
  if (d.name == "wr") {
    require_keys(d, {"r"});
    return PotentialSpec::power_family(d.number("r"));
  }
  if (d.name == "japanese") {
    require_keys(d, {"s", "winf"});
    const double a = d.number("winf", 1.0);
    return PotentialSpec::japanese([a](double) { return a; }, std::abs(a), d.number("s"));
  }
  if (d.name == "zero") {
    require_keys(d, {});
    return PotentialSpec::zero();
  }
  if (d.name == "lorentz") {
    RealFunction f = parse_function(text, grid);
    return PotentialSpec::custom(std::move(f), 2.0 * d.number("r", 1.0), text);
  }
  if (d.name == "const") {
    RealFunction f = parse_function(text, grid);
    return PotentialSpec::custom(std::move(f), 0.0, text);
  }
  RealFunction f = parse_function(text, grid);
  return PotentialSpec::custom(std::move(f), rapid_decay, text);
}

cplx parse_complex(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (c != ' ') text += c;
  if (text.empty()) throw ContractError("empty complex number");
  const auto comma = text.find(',');
  if (comma != std::string::npos)
    return {parse_number(text.substr(0, comma), "z"), parse_number(text.substr(comma + 1), "z")};
  if (text.back() != 'i') return {parse_number(text, "z"), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not a leading sign or part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : body.substr(0, split);
  std::string im = split == std::string::npos ? body : body.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  if (!im.empty() && im[0] == '+') im.erase(0, 1);
  return {re.empty() ? 0.0 : parse_number(re, "z"), parse_number(im, "z")};
}

}  // namespace ts::cli
