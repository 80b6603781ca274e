// Copyright 2026 The fqdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fqdyn/costmodel.hpp"
#include "fqdyn/errors.hpp"
#include "fqdyn/hamiltonian.hpp"
#include "fqdyn/meanfield.hpp"
#include "fqdyn/shadows.hpp"
#include "fqdyn/state.hpp"
#include "fqdyn/state_io.hpp"
#include "fqdyn/stateprep.hpp"

namespace fqdyn::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  return os;
}

namespace detail {

struct GridArgs {
  int dim = 1;
  int points = 5;
  double omega = 0.0;  // 0: points^dim (unit spacing)
  int eta = 2;
  std::string nuclei;
  double soften = 0.0;
  std::string coeffs;
  std::string init = "ground";

  void add_to(CLI::App* sub, bool with_eta = true) {
    sub->add_option("--dim", dim, "Spatial dimension (1-3)");
    sub->add_option("--points", points, "Grid points per axis");
    sub->add_option("--omega", omega, "Cell volume (default: points^dim)");
    if (with_eta) sub->add_option("--eta", eta, "Electron count");
    sub->add_option("--nuclei", nuclei, "Nuclei file, one 'zeta x [y z]' per line");
    sub->add_option("--soften", soften, "Coulomb softening shift s (0: bare kernel)");
  }

  void add_initial(CLI::App* sub) {
    sub->add_option("--coeffs", coeffs, "Initial orbitals, N rows x 2*eta columns");
    sub->add_option("--init", init, "Initial orbitals without --coeffs")
        ->check(CLI::IsMember({"ground", "random"}));
  }

  GridSpec grid() const {
    double vol = omega > 0 ? omega : std::pow(static_cast<double>(points), dim);
    return GridSpec::make(dim, points, vol);
  }

  NuclearConfig nuclear_config() const {
    return nuclei.empty() ? NuclearConfig{} : io::read_nuclei(nuclei, dim);
  }

  CoulombKernel kernel() const {
    return soften > 0 ? CoulombKernel::softened(soften) : CoulombKernel::bare();
  }

  CMatrix initial_orbitals(const GridIntegrals& ints, std::uint64_t seed) const {
    if (!coeffs.empty()) {
      CMatrix c = io::read_coeffs(coeffs);
      if (c.rows() != ints.size()) throw DimensionMismatch("coefficient rows differ from N");
      if (orthonormality_deviation(c) > 1e-8)
        throw NonOrthonormalInput("initial orbitals are not orthonormal");
      return c;
    }
    if (eta < 1 || eta > ints.size()) throw ValidationError("need 1 <= eta <= N");
    if (init == "random") {
      RngStream rng(seed, "init");
      return random_orthonormal_columns(ints.size(), eta, rng);
    }
    return lowest_orbitals(ints.h, eta);
  }
};

inline std::vector<KrdmElement> parse_elements(const std::string& source, int k, std::size_t n) {
  std::vector<KrdmElement> out;
  if (source == "all-1rdm") {
    if (k != 1) throw ValidationError("all-1rdm needs --k 1");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.push_back({{i}, {j}});
    return out;
  }
  std::ifstream is(source);
  if (!is) throw ValidationError("cannot open elements file '" + source + "'");
  std::string line;
  while (std::getline(is, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b)) throw ValidationError("element line needs an i-tuple and a j-tuple");
    KrdmElement e;
    for (const auto& t : io::split(a, ':')) e.i.push_back(static_cast<std::size_t>(std::stoul(t)));
    for (const auto& t : io::split(b, ':')) e.j.push_back(static_cast<std::size_t>(std::stoul(t)));
    if (static_cast<int>(e.i.size()) != k || static_cast<int>(e.j.size()) != k)
      throw ValidationError("element tuples must have length k");
    for (auto v : e.i)
      if (v >= n) throw IndexOutOfRange("element orbital beyond N");
    for (auto v : e.j)
      if (v >= n) throw IndexOutOfRange("element orbital beyond N");
    out.push_back(std::move(e));
  }
  if (out.empty()) throw ValidationError("elements file lists no elements");
  return out;
}

inline std::string join_tuple(const std::vector<std::size_t>& t) {
  std::string s;
  for (std::size_t a = 0; a < t.size(); ++a) s += (a ? ":" : "") + std::to_string(t[a]);
  return s;
}

inline std::vector<double> parse_list(const std::string& text, char sep) {
  std::vector<double> out;
  for (const auto& p : io::split(text, sep)) out.push_back(io::parse_double(p));
  return out;
}

struct Outputs {
  std::string primary;
  std::vector<std::string> inputs;
  std::vector<std::string> files;
};

}  // namespace detail

/// Single entry point for every subcommand; returns the process exit code.
class Dispatcher {
 public:
  Dispatcher(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    try {
      return run_checked(std::move(args));
    } catch (const ValidationError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitValidation;
    } catch (const NumericalError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitNumerical;
    } catch (const json::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitValidation;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitNumerical;
    }
  }

 private:
  static const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"evolve", "tdhf", "prep", "shadows", "cost", "pipeline"};
    return names;
  }

  /// Splices config-file values in right after the subcommand so explicit
  /// flags (parsed later, last one wins) take precedence.
  static std::vector<std::string> merge_config(std::vector<std::string> args) {
    auto it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end()) return args;
    if (it + 1 == args.end()) throw UsageError("--config needs a file");
    std::string path = *(it + 1);
    args.erase(it, it + 2);
    json cfg = json::parse(read_file(path));
    if (!cfg.is_object()) throw ValidationError("config file must hold a JSON object");
    std::vector<std::string> extra;
    for (const auto& [key, value] : cfg.items()) {
      std::string flag = "--" + key;
      if (value.is_boolean()) {
        if (value.get<bool>()) extra.push_back(flag);
      } else if (value.is_array()) {
        std::string joined;
        for (std::size_t a = 0; a < value.size(); ++a)
          joined += (a ? "," : "") + (value[a].is_string() ? value[a].get<std::string>() : value[a].dump());
        extra.push_back(flag);
        extra.push_back(joined);
      } else {
        extra.push_back(flag);
        extra.push_back(value.is_string() ? value.get<std::string>() : value.dump());
      }
    }
    auto sub = std::find_first_of(args.begin(), args.end(), subcommands().begin(), subcommands().end());
    auto pos = (sub == args.end()) ? args.end() : sub + 1;
    args.insert(pos, extra.begin(), extra.end());
    return args;
  }

  int run_checked(std::vector<std::string> args) {
    args = merge_config(std::move(args));
    resolved_args_ = args;

    CLI::App app{"Grid electron dynamics: first-quantized simulation, shadows, TDHF, costs", "fqdyn"};
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kVersion);
    app.fallthrough();
    app.require_subcommand(0, 1);
    app.add_option("--threads", threads_, "Worker threads for sampling")->check(CLI::PositiveNumber);
    std::string manifest;
    app.add_option("--manifest", manifest, "Replay a recorded manifest");

    detail::GridArgs g;
    std::uint64_t seed = 1;
    std::string in, out;

    auto* evolve = app.add_subcommand("evolve", "Product-formula evolution of a first-quantized state");
    EvolutionPlan plan{1.0, 100, 2};
    g.add_to(evolve);
    g.add_initial(evolve);
    evolve->add_option("--time", plan.total_time, "Total time");
    evolve->add_option("--steps", plan.steps, "Trotter steps");
    evolve->add_option("--order", plan.order, "Product-formula order")->check(CLI::IsMember({1, 2, 4}));
    evolve->add_option("--seed", seed, "Master seed");
    evolve->add_option("--in", in, "Initial state snapshot");
    evolve->add_option("--out", out, "Output state snapshot")->required();

    auto* tdhf = app.add_subcommand("tdhf", "Real-time Hartree-Fock trajectory");
    TdhfPlan tplan{1.0, 1000, TdhfScheme::midpoint};
    std::string scheme = "midpoint";
    std::string observables = "energy";
    g.add_to(tdhf);
    g.add_initial(tdhf);
    tdhf->add_option("--time", tplan.total_time, "Total time");
    tdhf->add_option("--steps", tplan.steps, "Time steps");
    tdhf->add_option("--scheme", scheme, "Integrator")->check(CLI::IsMember({"midpoint", "rk4"}));
    tdhf->add_option("--observables", observables, "Comma list: energy, rdm-diag, idempotency, fock-norm");
    tdhf->add_option("--seed", seed, "Master seed");
    tdhf->add_option("--out", out, "Trajectory CSV")->required();

    auto* prep = app.add_subcommand("prep", "Givens-network Slater preparation with Toffoli ledger");
    bool verify = false;
    std::string ledger_out;
    prep->add_option("--coeffs", g.coeffs, "Orbitals, N rows x 2*eta columns")->required();
    prep->add_option("--dim", g.dim, "Spatial dimension");
    prep->add_option("--omega", g.omega, "Cell volume");
    prep->add_flag("--verify", verify, "Check oracle overlap and ledger total");
    prep->add_option("--ledger-out", ledger_out, "Per-step ledger CSV");
    prep->add_option("--out", out, "Prepared state snapshot");

    auto* shadows = app.add_subcommand("shadows", "Classical-shadow k-RDM estimation");
    int k = 1;
    double epsilon = 0.1, delta = 0.05;
    std::string samples = "auto", elements = "all-1rdm", samples_out;
    auto add_shadow_opts = [&](CLI::App* sub) {
      sub->add_option("--k", k, "RDM order")->check(CLI::PositiveNumber);
      sub->add_option("--epsilon", epsilon, "Target accuracy");
      sub->add_option("--delta", delta, "Failure probability");
      sub->add_option("--samples", samples, "Sample count or 'auto'");
      sub->add_option("--seed", seed, "Master seed");
      sub->add_option("--elements", elements, "Elements file ('i1:i2 j1:j2' per line) or all-1rdm");
      sub->add_option("--samples-out", samples_out, "Raw sample CSV");
    };
    add_shadow_opts(shadows);
    shadows->add_option("--in", in, "State snapshot")->required();
    shadows->add_option("--out", out, "Estimates CSV")->required();

    auto* cost = app.add_subcommand("cost", "Asymptotic cost and speedup models");
    std::string alpha_range, query;
    cost->add_option("--alpha-range", alpha_range, "lo:hi:step");
    cost->add_option("--query", query, "N,eta,t,eps[,M,L,lambda,C,k]");
    cost->add_option("--out", out, "Output file");

    auto* pipeline = app.add_subcommand("pipeline", "Prepare, evolve, sample shadows and compare with exact RDMs");
    std::string report;
    g.add_to(pipeline);
    g.add_initial(pipeline);
    pipeline->add_option("--time", plan.total_time, "Total time");
    pipeline->add_option("--steps", plan.steps, "Trotter steps");
    pipeline->add_option("--order", plan.order, "Product-formula order")->check(CLI::IsMember({1, 2, 4}));
    add_shadow_opts(pipeline);
    pipeline->add_option("--out", out, "Estimates CSV")->required();
    pipeline->add_option("--report", report, "Report JSON (default: <out>.report.json)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out_, err_);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e, out_, err_);
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << "\n\n" << app.help();
      return kExitValidation;
    }

    if (!manifest.empty()) return replay(manifest);
    auto subs = app.get_subcommands();
    if (subs.empty()) {
      err_ << "error: a subcommand is required\n\n" << app.help();
      return kExitValidation;
    }
    CLI::App* sub = subs.front();
    detail::Outputs o;
    json summary;
    const std::string name = sub->get_name();
    if (name == "evolve") summary = run_evolve(g, plan, seed, in, out, o);
    if (name == "tdhf") {
      tplan.scheme = parse_scheme(scheme);
      summary = run_tdhf(g, tplan, seed, observables, out, o);
    }
    if (name == "prep") summary = run_prep(g, verify, ledger_out, out, o);
    if (name == "shadows")
      summary = run_shadows(in, k, epsilon, delta, samples, seed, elements, samples_out, out, o);
    if (name == "cost") summary = run_cost(alpha_range, query, out, o);
    if (name == "pipeline") {
      if (report.empty()) report = out + ".report.json";
      summary = run_pipeline(g, plan, k, epsilon, delta, samples, seed, elements, samples_out,
                             out, report, o);
    }
    if (!o.primary.empty()) write_manifest(sub, seed, o);
    if (!summary.is_null()) out_ << summary.dump(2) << "\n";
    if (summary.contains("passed") && !summary["passed"].get<bool>()) return kExitNumerical;
    return kExitOk;
  }

  void write_manifest(CLI::App* sub, std::uint64_t seed, const detail::Outputs& o) {
    json m;
    m["subcommand"] = sub->get_name();
    json params = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
      std::string v;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        v = r.empty() ? "true" : r.back();
      } else {
        v = opt->get_default_str();
      }
      params[opt->get_lnames()[0]] = v;
    }
    m["params"] = params;
    m["seed"] = seed;
    m["version"] = kVersion;
    json argv = json::array();
    for (const auto& a : resolved_args_) argv.push_back(a);
    m["argv"] = argv;
    json inputs = json::object();
    for (const auto& f : o.inputs) inputs[f] = sha256_file(f);
    m["inputs"] = inputs;
    json outputs = json::object();
    for (const auto& f : o.files) outputs[f] = sha256_file(f);
    m["outputs"] = outputs;
    auto os = open_output(o.primary + ".manifest.json");
    os << m.dump(2) << "\n";
  }

  int replay(const std::string& path) {
    json m = json::parse(read_file(path));
    std::vector<std::string> argv;
    for (const auto& a : m.at("argv")) argv.push_back(a.get<std::string>());
    for (const auto& [f, digest] : m.at("inputs").items())
      if (sha256_file(f) != digest.get<std::string>())
        throw ValidationError("input '" + f + "' changed since the manifest was written");
    std::ostringstream sink;
    Dispatcher inner(sink, err_);
    inner.threads_ = threads_;
    int code = inner.run(argv);
    if (code != kExitOk) return code;
    std::size_t same = 0;
    for (const auto& [f, digest] : m.at("outputs").items()) {
      if (sha256_file(f) != digest.get<std::string>()) {
        err_ << "replay mismatch: " << f << "\n";
        return kExitNumerical;
      }
      ++same;
    }
    out_ << "replay: " << same << " output(s) byte-identical\n";
    return kExitOk;
  }

  json run_evolve(const detail::GridArgs& g, const EvolutionPlan& plan, std::uint64_t seed,
                  const std::string& in, const std::string& out, detail::Outputs& o) {
    FirstQuantizedState state = [&] {
      if (!in.empty()) {
        o.inputs.push_back(in);
        return io::read_state(in);
      }
      GridIntegrals ints = GridIntegrals::build(g.grid(), g.nuclear_config(), g.kernel());
      if (!g.coeffs.empty()) o.inputs.push_back(g.coeffs);
      return slater_oracle(g.initial_orbitals(ints, seed), g.grid());
    }();
    if (!g.nuclei.empty()) o.inputs.push_back(g.nuclei);
    GridHamiltonian ham(state.grid(), g.nuclear_config(), g.kernel());
    const double e0 = ham.total_energy(state);
    FirstQuantizedState final_state = ham.evolve(state, plan);
    io::write_state(out, final_state);
    o.primary = out;
    o.files.push_back(out);
    json s;
    s["norm"] = final_state.norm();
    s["energy_initial"] = e0;
    s["energy_final"] = ham.total_energy(final_state);
    s["antisymmetric"] = is_antisymmetric(final_state, 1e-9);
    return s;
  }

  json run_tdhf(const detail::GridArgs& g, const TdhfPlan& plan, std::uint64_t seed,
                const std::string& observables, const std::string& out, detail::Outputs& o) {
    std::vector<std::string> obs = io::split(observables, ',');
    for (const auto& name : obs)
      if (name != "energy" && name != "rdm-diag" && name != "idempotency" && name != "fock-norm")
        throw ValidationError("unknown observable '" + name + "'");
    auto has = [&](const char* n) { return std::find(obs.begin(), obs.end(), n) != obs.end(); };
    GridIntegrals ints = GridIntegrals::build(g.grid(), g.nuclear_config(), g.kernel());
    if (!g.coeffs.empty()) o.inputs.push_back(g.coeffs);
    if (!g.nuclei.empty()) o.inputs.push_back(g.nuclei);
    CMatrix c0 = g.initial_orbitals(ints, seed);
    auto os = open_output(out);
    os << "step,time,energy";
    if (has("rdm-diag"))
      for (Eigen::Index p = 0; p < ints.size(); ++p) os << ",rho_" << p;
    if (has("idempotency")) os << ",idempotency";
    if (has("fock-norm")) os << ",fock_norm";
    os << "\n";
    double e0 = 0.0, drift = 0.0;
    evolve_tdhf(c0, ints, plan, [&](int step, double t, const CMatrix& c) {
      const double e = hf_energy(c, ints);
      if (step == 0) e0 = e;
      drift = std::max(drift, std::abs(e - e0));
      os << step << "," << io::format_double(t) << "," << io::format_double(e);
      if (has("rdm-diag")) {
        RVector d = c.rowwise().squaredNorm();
        for (Eigen::Index p = 0; p < d.size(); ++p) os << "," << io::format_double(d(p));
      }
      if (has("idempotency")) os << "," << io::format_double(idempotency_error(mean_field_1rdm(c)));
      if (has("fock-norm")) os << "," << io::format_double(fock_spectral_norm(c, ints));
      os << "\n";
    });
    os.close();
    o.primary = out;
    o.files.push_back(out);
    json s;
    s["steps"] = plan.steps;
    s["energy_initial"] = e0;
    s["max_energy_drift"] = drift;
    return s;
  }

  json run_prep(detail::GridArgs g, bool verify, const std::string& ledger_out,
                const std::string& out, detail::Outputs& o) {
    CMatrix c = io::read_coeffs(g.coeffs);
    o.inputs.push_back(g.coeffs);
    const auto n = static_cast<double>(c.rows());
    g.points = static_cast<int>(std::lround(std::pow(n, 1.0 / g.dim)));
    GridSpec grid = g.grid();
    if (static_cast<Eigen::Index>(grid.num_points()) != c.rows())
      throw DimensionMismatch("row count is not points^dim");
    auto result = prepare_slater_detailed(c, grid);
    const auto eta = static_cast<std::uint64_t>(c.cols());
    json s;
    s["N"] = c.rows();
    s["eta"] = eta;
    s["givens_rotations"] = result.network.rotation_count();
    s["ledger"] = {{"increment", result.ledger.increment},
                   {"controlled_unary", result.ledger.controlled_unary},
                   {"simultaneous_unary", result.ledger.simultaneous_unary},
                   {"mcnot", result.ledger.mcnot},
                   {"total", result.ledger.total()}};
    if (eta < static_cast<std::uint64_t>(c.rows())) {
      s["toffoli_improved"] = toffoli_count(c.rows(), eta, ToffoliVariant::improved);
      s["toffoli_basic"] = toffoli_count(c.rows(), eta, ToffoliVariant::basic);
    }
    s["antisymmetrization_estimate"] = antisymmetrization_estimate(n, static_cast<double>(eta));
    if (verify) {
      double fid = fidelity_modulus(result.state, slater_oracle(c, grid));
      bool ledger_ok = eta < static_cast<std::uint64_t>(c.rows()) &&
                       result.ledger.total() == toffoli_count(c.rows(), eta, ToffoliVariant::improved);
      s["fidelity"] = fid;
      s["ledger_matches_formula"] = ledger_ok;
      s["passed"] = std::abs(fid - 1.0) <= 1e-9 && ledger_ok;
    }
    if (!out.empty()) {
      io::write_state(out, result.state);
      o.files.push_back(out);
    }
    if (!ledger_out.empty()) {
      auto os = open_output(ledger_out);
      os << "q,increment,controlled_unary,simultaneous_unary,mcnot,step_total,cumulative\n";
      for (const auto& r : result.history)
        os << r.q << "," << r.step.increment << "," << r.step.controlled_unary << ","
           << r.step.simultaneous_unary << "," << r.step.mcnot << "," << r.step.total() << ","
           << r.cumulative << "\n";
      o.files.push_back(ledger_out);
    }
    if (!o.files.empty()) o.primary = o.files.front();
    return s;
  }

  struct ShadowRun {
    EstimatorConfig config;
    ShadowData data;
    std::vector<KrdmElement> elements;
    std::vector<ShadowEstimate> estimates;
    std::vector<std::vector<cplx>> values;
  };

  ShadowRun shadow_estimates(const FirstQuantizedState& state, int k, double epsilon, double delta,
                             const std::string& samples, std::uint64_t seed,
                             const std::string& elements) {
    ShadowRun r;
    r.elements = detail::parse_elements(elements, k, state.num_points());
    std::uint64_t m = samples == "auto"
                          ? required_samples(static_cast<double>(state.num_points()), k,
                                             state.eta(), epsilon, delta)
                          : static_cast<std::uint64_t>(std::stoull(samples));
    r.config = EstimatorConfig::for_samples(k, m, epsilon, delta);
    r.data = collect_shadows(state, m, seed, threads_);
    RestrictedIndexSet set(k, state.eta());
    for (const auto& e : r.elements) {
      auto [est, v] = estimate_with_values(r.data, set, e.i, e.j, r.config.groups, r.config.group_size);
      r.estimates.push_back(est);
      r.values.push_back(std::move(v));
    }
    return r;
  }

  void write_estimates(const std::string& out, const ShadowRun& r) {
    auto os = open_output(out);
    os << "i,j,re,im,K,b\n";
    for (std::size_t e = 0; e < r.elements.size(); ++e)
      os << detail::join_tuple(r.elements[e].i) << "," << detail::join_tuple(r.elements[e].j)
         << "," << io::format_double(r.estimates[e].value.real()) << ","
         << io::format_double(r.estimates[e].value.imag()) << "," << r.estimates[e].groups << ","
         << r.estimates[e].group_size << "\n";
  }

  void write_samples(const std::string& path, const ShadowData& d) {
    auto os = open_output(path);
    os << "sample";
    for (int j = 0; j < d.eta; ++j) os << ",clifford_" << j;
    for (int j = 0; j < d.eta; ++j) os << ",outcome_" << j;
    os << "\n";
    for (std::size_t s = 0; s < d.size(); ++s) {
      os << s;
      for (auto id : d.samples[s].clifford_ids) os << "," << id;
      for (auto b : d.samples[s].outcomes) os << "," << b;
      os << "\n";
    }
  }

  json run_shadows(const std::string& in, int k, double epsilon, double delta,
                   const std::string& samples, std::uint64_t seed, const std::string& elements,
                   const std::string& samples_out, const std::string& out, detail::Outputs& o) {
    FirstQuantizedState state = io::read_state(in);
    o.inputs.push_back(in);
    if (elements != "all-1rdm") o.inputs.push_back(elements);
    ShadowRun r = shadow_estimates(state, k, epsilon, delta, samples, seed, elements);
    write_estimates(out, r);
    o.primary = out;
    o.files.push_back(out);
    if (!samples_out.empty()) {
      write_samples(samples_out, r.data);
      o.files.push_back(samples_out);
    }
    json s;
    s["samples"] = r.data.size();
    s["K"] = r.config.groups;
    s["b"] = r.config.group_size;
    s["elements"] = r.elements.size();
    return s;
  }

  json run_cost(const std::string& alpha_range, const std::string& query, const std::string& out,
                detail::Outputs& o) {
    if (alpha_range.empty() == query.empty())
      throw UsageError("cost needs exactly one of --alpha-range or --query");
    if (!alpha_range.empty()) {
      if (out.empty()) throw UsageError("--alpha-range needs --out");
      auto v = detail::parse_list(alpha_range, ':');
      if (v.size() != 3) throw UsageError("--alpha-range expects lo:hi:step");
      auto rows = cost::regime_table(v[0], v[1], v[2]);
      auto os = open_output(out);
      os << "alpha,beta_classical,beta_quantum,speedup,optimal_quantum,optimal_classical_term\n";
      for (const auto& r : rows)
        os << io::format_double(r.alpha) << "," << io::format_double(r.beta_classical) << ","
           << io::format_double(r.beta_quantum) << "," << io::format_double(r.speedup) << ",\""
           << r.optimal_quantum << "\",\"" << r.optimal_classical_term << "\"\n";
      os.close();
      o.primary = out;
      o.files.push_back(out);
      return json();
    }
    auto v = detail::parse_list(query, ',');
    if (v.size() < 4 || v.size() > 9) throw UsageError("--query expects N,eta,t,eps[,M,L,lambda,C,k]");
    cost::CostQuery q{v[0], v[1], v[2], v[3]};
    if (v.size() > 4 && v[4] > 0) q.m = v[4];
    if (v.size() > 5) q.l = v[5];
    if (v.size() > 6) q.lambda = v[6];
    if (v.size() > 7) q.c_samp = v[7];
    if (v.size() > 8) q.k = static_cast<int>(v[8]);
    auto rep = cost::cost_report(q);
    json s;
    s["query"] = {{"N", q.n}, {"eta", q.eta}, {"t", q.t}, {"epsilon", q.epsilon}};
    json classical = json::array();
    for (const auto& e : rep.classical) classical.push_back({{"name", e.name}, {"value", e.value}});
    json quantum = json::array();
    for (const auto& e : rep.quantum)
      quantum.push_back({{"name", e.name}, {"value", e.value}, {"hypothetical", e.hypothetical}});
    s["classical"] = classical;
    s["quantum"] = quantum;
    s["alpha"] = rep.alpha;
    s["regime"] = rep.regime;
    s["optimal_quantum"] = rep.optimal_quantum;
    s["optimal_classical_term"] = rep.optimal_classical_term;
    if (rep.alpha >= 1.0) {
      auto b = cost::beta_exponents(rep.alpha);
      s["beta_classical"] = b.classical;
      s["beta_quantum"] = b.quantum;
      s["speedup_exponent"] = b.classical / b.quantum;
    }
    cost::MeasurementInputs mi;
    mi.k = q.k.value_or(1);
    mi.eta = q.eta;
    mi.n = q.n;
    mi.l = q.l.value_or(1.0);
    mi.epsilon = q.epsilon;
    mi.c_samp = q.c_samp.value_or(1.0);
    mi.lambda = q.lambda.value_or(cost::energy_lambda(q.n, q.eta));
    mi.t = q.t;
    json meas = json::array();
    for (const auto& r : cost::measurement_costs(mi)) meas.push_back({{"name", r.name}, {"value", r.value}});
    s["measurement"] = meas;
    s["energy_lambda"] = cost::energy_lambda(q.n, q.eta);
    s["suppressed_factors"] = rep.suppressed_factors;
    if (!out.empty()) {
      auto os = open_output(out);
      os << s.dump(2) << "\n";
      os.close();
      o.primary = out;
      o.files.push_back(out);
    }
    return s;
  }

  json run_pipeline(const detail::GridArgs& g, const EvolutionPlan& plan, int k, double epsilon,
                    double delta, const std::string& samples, std::uint64_t seed,
                    const std::string& elements, const std::string& samples_out,
                    const std::string& out, const std::string& report, detail::Outputs& o) {
    const GridSpec grid = g.grid();
    NuclearConfig nuclei = g.nuclear_config();
    GridIntegrals ints = GridIntegrals::build(grid, nuclei, g.kernel());
    if (!g.coeffs.empty()) o.inputs.push_back(g.coeffs);
    if (!g.nuclei.empty()) o.inputs.push_back(g.nuclei);
    if (elements != "all-1rdm") o.inputs.push_back(elements);
    CMatrix c = g.initial_orbitals(ints, seed);
    auto prepared = prepare_slater_detailed(c, grid);
    GridHamiltonian ham(grid, nuclei, g.kernel());
    FirstQuantizedState state = ham.evolve(prepared.state, plan);
    ShadowRun r = shadow_estimates(state, k, epsilon, delta, samples, seed, elements);
    write_estimates(out, r);
    o.primary = out;
    o.files.push_back(out);
    if (!samples_out.empty()) {
      write_samples(samples_out, r.data);
      o.files.push_back(samples_out);
    }

    json rep;
    rep["samples"] = r.data.size();
    rep["K"] = r.config.groups;
    rep["b"] = r.config.group_size;
    rep["epsilon"] = epsilon;
    rep["prep_fidelity"] = fidelity_modulus(prepared.state, slater_oracle(c, grid));
    rep["norm_after_evolution"] = state.norm();
    json rows = json::array();
    bool within = true;
    double max_var = 0.0;
    for (std::size_t e = 0; e < r.elements.size(); ++e) {
      cplx exact = exact_krdm_element(state, r.elements[e].i, r.elements[e].j);
      double err = std::abs(r.estimates[e].value - exact);
      within = within && err <= epsilon;
      double var = sample_variance(r.values[e]);
      max_var = std::max(max_var, var);
      rows.push_back({{"i", detail::join_tuple(r.elements[e].i)},
                      {"j", detail::join_tuple(r.elements[e].j)},
                      {"estimate_re", r.estimates[e].value.real()},
                      {"estimate_im", r.estimates[e].value.imag()},
                      {"exact_re", exact.real()},
                      {"exact_im", exact.imag()},
                      {"abs_error", err},
                      {"empirical_variance", var}});
    }
    rep["elements"] = rows;
    rep["max_empirical_variance"] = max_var;
    bool var_ok = true;
    try {
      double bound = variance_bound(k, state.eta());
      rep["variance_bound"] = bound;
      var_ok = max_var <= bound;
    } catch (const AssumptionViolated&) {
      rep["variance_bound"] = nullptr;
    }
    rep["all_within_epsilon"] = within;
    rep["variance_within_bound"] = var_ok;
    rep["passed"] = within && var_ok;
    auto os = open_output(report);
    os << rep.dump(2) << "\n";
    os.close();
    o.files.push_back(report);
    json s;
    s["report"] = report;
    s["report_passed"] = rep["passed"];
    return s;
  }

  std::ostream& out_;
  std::ostream& err_;
  int threads_ = 1;
  std::vector<std::string> resolved_args_;
};

inline int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  return Dispatcher(out, err).run(args);
}

}  // namespace fqdyn::cli
