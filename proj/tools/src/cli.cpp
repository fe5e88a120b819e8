#include "thermalscatter_cli/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "thermalscatter/constants.hpp"
#include "thermalscatter/domainlab.hpp"
#include "thermalscatter/dynamics.hpp"
#include "thermalscatter/error.hpp"
#include "thermalscatter/io.hpp"
#include "thermalscatter/operators.hpp"
#include "thermalscatter/parallel.hpp"
#include "thermalscatter/perturbation.hpp"
#include "thermalscatter/specfun.hpp"
#include "thermalscatter_cli/criteria.hpp"
#include "thermalscatter_cli/descriptors.hpp"
#include "thermalscatter_cli/run_config.hpp"

namespace ts::cli {

namespace {

using json = nlohmann::ordered_json;

// Output assembled by a command; emitted only once the command has a result.
struct Outcome {
  std::string stdout_text;
  std::vector<std::pair<std::string, std::string>> files;  // path, contents
  int code = exit_ok;
};

json envelope(const RunConfig& config, const std::string& command) {
  return {{"schema", schema_version}, {"command", command}, {"config", to_json(config)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string in_output_dir(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

json point(cplx z) { return json::array({z.real(), z.imag()}); }

// specfun-eval

struct SpecfunArgs {
  std::vector<std::string> functions = {"j0", "ber", "bei", "ker", "kei", "m0", "n0", "gamma"};
  std::vector<double> x;
};

specfun::SpecialValue eval_named(const std::string& name, double x) {
  using specfun::Kelvin;
  if (name == "j0") return specfun::bessel_j0_eval(x);
  if (name == "ber") return specfun::kelvin_eval(Kelvin::ber, x);
  if (name == "bei") return specfun::kelvin_eval(Kelvin::bei, x);
  if (name == "ker") return specfun::kelvin_eval(Kelvin::ker, x);
  if (name == "kei") return specfun::kelvin_eval(Kelvin::kei, x);
  if (name == "gamma") return specfun::gamma_eval(x);
  if (name == "i0") {
    const auto v = specfun::bessel_i0_eval(cplx(x, 0.0));
    return {v.value.real(), v.est_abs_error};
  }
  if (name == "k0") {
    const auto v = specfun::bessel_k0_eval(cplx(x, 0.0));
    return {v.value.real(), v.est_abs_error};
  }
  if (name == "m0" || name == "n0") {
    const bool m = name == "m0";
    const auto re = specfun::kelvin_eval(m ? Kelvin::ber : Kelvin::ker, x);
    const auto im = specfun::kelvin_eval(m ? Kelvin::bei : Kelvin::kei, x);
    const double v = m ? specfun::amplitude_m0(x) : specfun::amplitude_n0(x);
    const double e = v > 0.0 ? (std::abs(re.value) * re.est_abs_error + std::abs(im.value) * im.est_abs_error) / v : 0.0;
    return {v, e};
  }
  throw ContractError("specfun-eval: unknown function '" + name + "'");
}

Outcome specfun_eval(const RunConfig&, const SpecfunArgs& a) {
  std::ostringstream csv;
  csv << "function,argument,value,est_error\n";
  for (const auto& fn : a.functions)
    for (double x : a.x) {
      const auto v = eval_named(fn, x);
      csv << fn << ',' << format_double(x) << ',' << format_double(v.value) << ',' << format_double(v.est_abs_error)
          << '\n';
    }
  return {csv.str(), {}, exit_ok};
}

// kernels-dump

struct KernelArgs {
  std::string which = "B";
  std::string z = "i";
  std::string out;
};

Outcome kernels_dump(const RunConfig& c, const KernelArgs& a) {
  const GridPtr g = c.build();
  KernelOperator k;
  if (a.which == "B")
    k = kernel_operator_B();
  else if (a.which == "F")
    k = kernel_operator_F(parse_complex(a.z));
  else if (a.which == "Fabs")
    k = kernel_operator_F_abs(parse_complex(a.z));
  else
    throw ContractError("kernels-dump: --which must be B, F or Fabs");
  std::ostringstream csv;
  write_kernel_csv(csv, k, *g);
  if (a.out.empty()) return {csv.str(), {}, exit_ok};
  return {"", {{a.out, csv.str()}}, exit_ok};
}

// verify-bounds

struct VerifyArgs {
  int seeds = 100;
  std::string checks = "l1,linf,holder:k=0.5,decay";
  int pairs = 200;
};

struct CheckSpec {
  std::string label;
  std::string kind;
  double k = 0.0;
};

std::vector<CheckSpec> parse_checks(const std::string& text) {
  std::vector<CheckSpec> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "l1" || item == "linf" || item == "linf_weak" || item == "decay") {
      out.push_back({item, item, 0.0});
    } else if (item.rfind("holder", 0) == 0) {
      const Descriptor d = parse_descriptor(item);
      if (d.name != "holder") throw ContractError("verify-bounds: unknown check '" + item + "'");
      const double k = d.number("k", 0.5);
      if (!(k >= 0.0 && k < 1.0)) throw ContractError("verify-bounds: holder needs 0 <= k < 1");
      out.push_back({item, "holder", k});
    } else {
      throw ContractError("verify-bounds: unknown check '" + item + "'");
    }
  }
  if (out.empty()) throw ContractError("verify-bounds: no checks selected");
  return out;
}

Outcome verify_bounds(const RunConfig& c, const VerifyArgs& a) {
  if (a.seeds < 1) throw ContractError("verify-bounds: --seeds must be >= 1");
  if (a.pairs < 1) throw ContractError("verify-bounds: --pairs must be >= 1");
  const auto checks = parse_checks(a.checks);
  const GridPtr g = c.build();
  const double slack = c.tol("slack");
  std::vector<int> passes(checks.size(), 0);
  std::vector<double> worst(checks.size(), INFINITY);
  std::ostringstream csv;
  csv << "seed,check,margin,pass\n";
  for (int s = 0; s < a.seeds; ++s) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(s);
    const DomainSample d = make_domain_sample(g, seed);
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const auto& ck = checks[i];
      double margin = 0.0;
      if (ck.kind == "l1") {
        margin = check_l1(d);
      } else if (ck.kind == "linf") {
        margin = check_linf(d).margin;
      } else if (ck.kind == "linf_weak") {
        margin = check_linf(d).weak_margin;
      } else if (ck.kind == "holder") {
        const HolderCheck h = check_holder(d, ck.k, a.pairs, seed);
        margin = h.constants.g_k - h.worst_ratio;
      } else {
        margin = constants::frozen::k_hat - check_decay(d);
      }
      const bool ok = margin >= -slack;
      passes[i] += ok ? 1 : 0;
      worst[i] = std::min(worst[i], margin);
      csv << seed << ',' << ck.label << ',' << format_double(margin) << ',' << (ok ? 1 : 0) << '\n';
    }
  }
  json j = envelope(c, "verify-bounds");
  j["seeds"] = a.seeds;
  json rows = json::array();
  bool all = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    rows.push_back({{"check", checks[i].label}, {"pass_count", passes[i]}, {"worst_margin", worst[i]}});
    all = all && passes[i] == a.seeds;
  }
  j["checks"] = rows;
  const std::string detail = in_output_dir(c, "verify_bounds_samples.csv");
  j["detail_csv"] = detail;
  return {dump(j), {{detail, csv.str()}}, all ? exit_ok : exit_check_failed};
}

// kato

struct KatoArgs {
  std::string v1 = "zero";
  std::string v2 = "zero";
  std::vector<double> eps = {1.0, 0.1, 0.01};
  int samples = 100;
};

Outcome kato(const RunConfig& c, const KatoArgs& a) {
  if (a.samples < 1) throw ContractError("kato: --samples must be >= 1");
  const GridPtr g = c.build();
  const PotentialSpec w = PotentialSpec::split_on_grid(parse_function(a.v1, g), parse_function(a.v2, g), g);
  std::vector<DomainSample> s;
  for (int i = 0; i < a.samples; ++i) s.push_back(make_domain_sample(g, c.seed + static_cast<std::uint64_t>(i)));
  json j = envelope(c, "kato");
  j["v1"] = a.v1;
  j["v2"] = a.v2;
  j["C_hat"] = constants::frozen::c_hat;
  j["V1_l2"] = w.v1_l2;
  j["V2_linf"] = w.v2_linf;
  json rows = json::array();
  bool ok = true;
  for (double eps : a.eps) {
    const KatoBound b = kato_constants(w, eps);
    const KatoCheck k = kato_check(w, b, s);
    ok = ok && k.violations == 0;
    json row = {{"epsilon", eps}};
    if (b.degenerate)
      row["v_eps"] = nullptr;
    else
      row["v_eps"] = b.v_epsilon;
    row["B_eps"] = b.b_epsilon;
    row["B_eps_derived"] = b.b_epsilon_derived;
    row["empirical_max_ratio"] = k.max_ratio;
    row["violations"] = k.violations;
    row["worst_margin"] = k.worst_margin;
    rows.push_back(row);
  }
  j["samples"] = a.samples;
  j["bounds"] = rows;
  return {dump(j), {}, ok ? exit_ok : exit_check_failed};
}

// hs-norm

struct HsArgs {
  std::string potential;
  std::string z = "i";
  bool no_refine = false;
};

Outcome hs_norm(const RunConfig& c, const HsArgs& a) {
  const GridPtr g = c.build();
  const PotentialSpec w = parse_potential(a.potential, g);
  const cplx z = parse_complex(a.z);
  std::vector<std::pair<double, int>> ladder;
  if (!a.no_refine)
    ladder = {{c.grid.cutoff / 2.0, c.grid.n_per_side / 2},
              {c.grid.cutoff, c.grid.n_per_side},
              {2.0 * c.grid.cutoff, 2 * c.grid.n_per_side}};
  const HsReport rep = hs_norm_squared(w, z, g, ladder);
  json j = envelope(c, "hs-norm");
  j["potential"] = a.potential;
  j["z"] = point(z);
  j["norm_sq"] = rep.norm_sq;
  j["route_a"] = rep.route_a;
  j["route_b"] = rep.route_b;
  json trace = json::array();
  for (const auto& lv : rep.refinement_trace)
    trace.push_back({{"cutoff", lv.cutoff}, {"n_per_side", lv.n_per_side}, {"value", lv.value}});
  j["refinement_trace"] = trace;
  return {dump(j), {}, exit_ok};
}

// evolve

struct EvolveArgs {
  std::string w = "zero";
  double t = 0.0;
  int steps = 1;
  std::string in;
  std::string out;
};

double energy(const PotentialSpec& w, const SampledFunction& f) {
  SampledFunction h = apply_T(f);
  const auto& g = f.layout();
  for (std::size_t i = 0; i < g.size(); ++i) h.values()[static_cast<Eigen::Index>(i)] += w(g.node(i)) * f[i];
  return inner(f, h).real();
}

Outcome evolve(const RunConfig& c, const EvolveArgs& a) {
  const GridPtr g = c.build();
  const PotentialSpec w = parse_potential(a.w, g);
  const SampledFunction f = read_csv(a.in, g);
  const SampledFunction out = perturbed_propagate(a.t, f, w, a.steps);
  std::ostringstream csv;
  write_csv(csv, out);
  json j = envelope(c, "evolve");
  j["potential"] = a.w;
  j["t"] = a.t;
  j["steps"] = a.steps;
  j["input"] = a.in;
  j["output"] = a.out;
  j["norm_in"] = norm_l2(f);
  j["norm_out"] = norm_l2(out);
  j["energy_in"] = energy(w, f);
  j["energy_out"] = energy(w, out);
  return {dump(j), {{a.out, csv.str()}}, exit_ok};
}

// scatter

struct ScatterArgs {
  std::string w;
  std::string basis = "hermite:16";
  std::string schedule = "geom:1:256";
};

json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(point(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

json trace_json(const std::vector<TracePoint>& trace) {
  json out = json::array();
  for (const auto& p : trace) out.push_back({{"t", p.t}, {"increment", p.increment}});
  return out;
}

Outcome scatter(const RunConfig& c, const ScatterArgs& a) {
  const GridPtr g = c.build();
  const PotentialSpec w = parse_potential(a.w, g);
  const Eligibility e = scattering_eligibility(w);
  if (!e.eligible)
    throw PreconditionError("wave operators need W and |W|^{1/2} R(T) Hilbert-Schmidt (r > 1/4 for W_r): " + e.reason);
  const auto basis = make_basis(g, a.basis);
  const Schedule schedule = parse_schedule(a.schedule, c.tol("cauchy"));
  const ScatteringReport rep = scattering_matrix(w, basis, schedule);
  json j = envelope(c, "scatter");
  j["potential"] = a.w;
  j["basis"] = a.basis;
  j["schedule"] = a.schedule;
  j["basis_size"] = rep.basis_size;
  j["converged"] = rep.converged;
  j["time_plus"] = rep.time_plus;
  j["time_minus"] = rep.time_minus;
  j["unitarity_defect"] = rep.unitarity_defect;
  j["isometry_defect"] = rep.isometry_defect;
  j["intertwining_defect"] = rep.intertwining_defect;
  j["boundary_mass"] = rep.boundary_mass;
  j["leakage_warning"] = rep.leakage_warning;
  j["convergence_trace"] = trace_json(rep.convergence_trace);
  j["s_matrix"] = matrix_json(rep.s_matrix);
  j["omega_plus"] = matrix_json(rep.omega_plus);
  j["omega_minus"] = matrix_json(rep.omega_minus);
  std::ostringstream csv;
  csv << "t,increment_plus,increment_minus,increment\n";
  for (std::size_t i = 0; i < rep.convergence_trace.size(); ++i) {
    const auto at = [](const std::vector<TracePoint>& v, std::size_t k) {
      return k < v.size() ? format_double(v[k].increment) : std::string();
    };
    csv << format_double(rep.convergence_trace[i].t) << ',' << at(rep.trace_plus, i) << ',' << at(rep.trace_minus, i)
        << ',' << format_double(rep.convergence_trace[i].increment) << '\n';
  }
  const std::string trace_path = in_output_dir(c, "scatter_trace.csv");
  j["trace_csv"] = trace_path;
  return {dump(j), {{trace_path, csv.str()}}, rep.converged ? exit_ok : exit_not_converged};
}

// report

struct ReportArgs {
  std::vector<std::string> criteria;
  std::string out;
};

Outcome report(const RunConfig& c, const ReportArgs& a) {
  const std::vector<std::string> ids = a.criteria.empty() ? criterion_ids() : a.criteria;
  for (const auto& id : ids)
    if (std::find(criterion_ids().begin(), criterion_ids().end(), id) == criterion_ids().end())
      throw ContractError("report: unknown criterion '" + id + "'");
  json j = envelope(c, "report");
  json rows = json::array();
  int passed = 0, failed = 0, expected = 0;
  for (const auto& id : ids) {
    const CriterionResult r = evaluate_criterion(id, c);
    rows.push_back(to_json(r));
    if (r.pass)
      ++passed;
    else if (r.expected_failure)
      ++expected;
    else
      ++failed;
  }
  j["criteria"] = rows;
  j["summary"] = {{"passed", passed}, {"failed", failed}, {"expected_failures", expected}};
  Outcome o{dump(j), {}, failed == 0 ? exit_ok : exit_check_failed};
  if (!a.out.empty()) o.files.emplace_back(a.out, o.stdout_text);
  return o;
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

void write_files(const Outcome& o) {
  for (const auto& [path, text] : o.files) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ContractError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ContractError("write to '" + path + "' failed");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermal-operator scattering toolkit", "thermalscatter"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::string config_path;
  std::string grid_text;
  std::optional<double> cutoff, grading;
  std::optional<int> n_per_side, threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::vector<std::string> settings;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--grid", grid_text, "grid as CUTOFF:N_PER_SIDE[:GRADING]");
  app.add_option("--cutoff", cutoff, "grid.cutoff");
  app.add_option("--n-per-side", n_per_side, "grid.n_per_side");
  app.add_option("--grading", grading, "grid.grading_exponent");
  app.add_option("--seed", seed, "base seed for domain samples");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--output-dir", output_dir, "directory for CSV and report files");
  app.add_option("--set", settings, "extra key=value setting, e.g. tol.unitarity=1e-2");

  SpecfunArgs sf;
  auto* c_sf = app.add_subcommand("specfun-eval", "tabulate special functions as CSV")->group("");
  c_sf->add_option("--fn", sf.functions, "j0, ber, bei, ker, kei, m0, n0, gamma, i0, k0")->delimiter(',');
  c_sf->add_option("--x", sf.x, "arguments")->delimiter(',')->required();

  KernelArgs kd;
  auto* c_kd = app.add_subcommand("kernels-dump", "kernel table x,y,re,im over the grid");
  c_kd->add_option("--which", kd.which, "B, F or Fabs")->check(CLI::IsMember({"B", "F", "Fabs"}));
  c_kd->add_option("--z", kd.z, "spectral parameter for F");
  c_kd->add_option("--out", kd.out, "output CSV (default: standard output)");

  VerifyArgs vb;
  auto* c_vb = app.add_subcommand("verify-bounds", "domain lemma checks on seeded samples");
  c_vb->add_option("--seeds", vb.seeds, "number of samples");
  c_vb->add_option("--checks", vb.checks, "comma list of l1, linf, linf_weak, holder:k=K, decay");
  c_vb->add_option("--pairs", vb.pairs, "Holder pairs per sample");

  KatoArgs ka;
  auto* c_ka = app.add_subcommand("kato", "Kato relative bound for W = |x|^{1/4} V1 + V2");
  c_ka->add_option("--v1", ka.v1, "function descriptor or file:PATH");
  c_ka->add_option("--v2", ka.v2, "function descriptor or file:PATH");
  c_ka->add_option("--eps", ka.eps, "epsilon values")->delimiter(',');
  c_ka->add_option("--samples", ka.samples, "number of domain samples");

  HsArgs hs;
  auto* c_hs = app.add_subcommand("hs-norm", "||W R_z(T)||_HS^2 by two routes");
  c_hs->add_option("--potential,--w", hs.potential, "potential descriptor, e.g. wr:r=1")->required();
  c_hs->add_option("--z", hs.z, "spectral parameter, e.g. i, -i, 1+i");
  c_hs->add_flag("--no-refine", hs.no_refine, "skip the refinement ladder");

  EvolveArgs ev;
  auto* c_ev = app.add_subcommand("evolve", "Strang propagation of a sampled function");
  c_ev->add_option("--w", ev.w, "potential descriptor");
  c_ev->add_option("--t", ev.t, "final time")->required();
  c_ev->add_option("--steps", ev.steps, "number of steps")->check(CLI::PositiveNumber);
  c_ev->add_option("--in", ev.in, "input CSV node,weight,re,im")->required();
  c_ev->add_option("--out", ev.out, "output CSV")->required();

  ScatterArgs sc;
  auto* c_sc = app.add_subcommand("scatter", "wave operators and S-matrix on a packet basis");
  c_sc->add_option("--w", sc.w, "potential descriptor, e.g. wr:r=1")->required();
  c_sc->add_option("--basis", sc.basis, "hermite:N");
  c_sc->add_option("--schedule", sc.schedule, "geom:T0:T1");

  ReportArgs rp;
  auto* c_rp = app.add_subcommand("report", "acceptance table as JSON");
  c_rp->add_option("--criteria", rp.criteria, "subset of criterion ids")->delimiter(',');
  c_rp->add_option("--out", rp.out, "also write the JSON to this path");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return exit_precondition;
  }

  RunConfig config;
  Outcome outcome;
  try {
    if (const char* env = std::getenv("THERMALSCATTER_CONFIG"); env && *env) apply_config_file(config, env);
    if (!config_path.empty()) apply_config_file(config, config_path);
    if (!grid_text.empty()) {
      std::istringstream in(grid_text);
      std::string part;
      std::vector<std::string> parts;
      while (std::getline(in, part, ':')) parts.push_back(part);
      if (parts.size() < 2 || parts.size() > 3) throw ContractError("--grid expects CUTOFF:N_PER_SIDE[:GRADING]");
      apply_setting(config, "grid.cutoff", parts[0]);
      apply_setting(config, "grid.n_per_side", parts[1]);
      if (parts.size() == 3) apply_setting(config, "grid.grading_exponent", parts[2]);
    }
    if (cutoff) config.grid.cutoff = *cutoff;
    if (n_per_side) config.grid.n_per_side = *n_per_side;
    if (grading) config.grid.grading_exponent = *grading;
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    if (output_dir) config.output_dir = *output_dir;
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ContractError("--set expects key=value, got '" + s + "'");
      apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    validate(config);
    set_thread_count(config.threads);

    if (c_sf->parsed()) outcome = specfun_eval(config, sf);
    else if (c_kd->parsed()) outcome = kernels_dump(config, kd);
    else if (c_vb->parsed()) outcome = verify_bounds(config, vb);
    else if (c_ka->parsed()) outcome = kato(config, ka);
    else if (c_hs->parsed()) outcome = hs_norm(config, hs);
    else if (c_ev->parsed()) outcome = evolve(config, ev);
    else if (c_sc->parsed()) outcome = scatter(config, sc);
    else if (c_rp->parsed()) outcome = report(config, rp);
    write_files(outcome);
  } catch (const PreconditionError& e) {
    err << "error: precondition: " << one_line(e.what()) << '\n';
    return exit_precondition;
  } catch (const ContractError& e) {
    err << "error: contract: " << one_line(e.what()) << '\n';
    return exit_precondition;
  } catch (const DomainError& e) {
    err << "error: domain: " << one_line(e.what()) << '\n';
    return exit_precondition;
  } catch (const DivergenceError& e) {
    err << "error: divergence: " << one_line(e.what()) << '\n';
    return exit_precondition;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
    return exit_check_failed;
  }
  out << outcome.stdout_text;
  out.flush();
  if (outcome.code == exit_not_converged) err << "warning: not converged within the schedule\n";
  return outcome.code;
}

}  // namespace ts::cli
