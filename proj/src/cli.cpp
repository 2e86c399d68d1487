// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "qrstab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <random>
#include <thread>

#include "qrstab/certify.hpp"
#include "qrstab/focksim.hpp"
#include "qrstab/io.hpp"
#include "qrstab/random.hpp"

namespace qrstab::cli {

using nlohmann::json;

namespace {

struct CommandName {
  Command command;
  const char* name;
};

constexpr CommandName kCommands[] = {
    {Command::Validate, "validate"},     {Command::Certify, "certify"},
    {Command::OpaRegion, "opa-region"},  {Command::Simulate, "simulate"},
    {Command::Sweep, "sweep"},           {Command::CheckIdentities, "check-identities"},
    {Command::GammaSearch, "gamma-search"},
};

class WriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_artifact(const RunConfig& config, const std::string& suffix, const std::string& content,
                    std::ostream& out) {
  const std::string path = config.output + suffix;
  try {
    io::write_atomic(path, content);
  } catch (const std::exception& e) {
    throw WriteError(e.what());
  }
  out << "wrote " << path << '\n';
}

template <class T>
void require(bool ok, const T& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

Command command_from_string(const std::string& s) {
  for (const auto& c : kCommands) {
    if (s == c.name) return c.command;
  }
  throw ConfigError("unknown command '" + s + "'");
}

std::string to_string(Command c) {
  for (const auto& entry : kCommands) {
    if (entry.command == c) return entry.name;
  }
  return "?";
}

RunConfig make_config(Command command, const std::optional<json>& doc, const Overrides& flags) {
  RunConfig c;
  c.command = command;
  const json empty = json::object();
  const json& d = doc ? *doc : empty;
  bool have_gamma = false;

  try {
    if (!d.is_object()) throw ConfigError("config document must be a JSON object");
    if (d.contains("system")) {
      c.system = io::system_from_json(d.at("system"));
      const int p = c.system->channels();
      if (d.contains("series")) {
        c.series = io::series_from_json(d.at("series"), std::max(p, 1));
      } else {
        c.series = PerturbationSeries(std::max(p, 1));
      }
      require(!d.contains("opa") && !flags.kappa1 && !flags.kappa2 && !flags.chi,
              "give either an explicit system or OPA parameters, not both");
    } else {
      opa::OpaParams params;
      if (d.contains("opa")) {
        const json& o = d.at("opa");
        params.kappa1 = o.value("kappa1", params.kappa1);
        params.kappa2 = o.value("kappa2", params.kappa2);
        params.chi = o.value("chi", params.chi);
      }
      if (flags.kappa1) params.kappa1 = *flags.kappa1;
      if (flags.kappa2) params.kappa2 = *flags.kappa2;
      if (flags.chi) params.chi = *flags.chi;
      c.opa = params;
    }
    if (d.contains("bounds")) {
      c.bounds = io::bounds_from_json(d.at("bounds"));
      have_gamma = d.at("bounds").contains("gamma");
    }
    if (d.contains("sim")) {
      const json& s = d.at("sim");
      if (s.contains("dim")) c.sim.dim = s.at("dim").get<int>();
      if (s.contains("dt")) c.sim.dt = s.at("dt").get<double>();
      if (s.contains("t_final")) c.sim.t_final = s.at("t_final").get<double>();
      if (s.contains("alpha")) {
        for (const json& a : s.at("alpha")) c.sim.alpha.push_back(io::complex_from_json(a));
      }
    }
    if (d.contains("sweep")) {
      const json& s = d.at("sweep");
      c.sweep.parameter = s.value("parameter", c.sweep.parameter);
      c.sweep.from = s.value("from", c.sweep.from);
      c.sweep.to = s.value("to", c.sweep.to);
      c.sweep.steps = s.value("steps", c.sweep.steps);
    }
    c.grid = d.value("grid", c.grid);
    c.samples = d.value("samples", c.samples);
    if (d.contains("eps")) c.eps = d.at("eps").get<double>();
    c.tol = d.value("tol", c.tol);
    c.output = d.value("output", c.output);
    c.seed = d.value("seed", c.seed);
    c.workers = d.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const io::FormatError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (flags.gamma) {
    c.bounds.gamma = *flags.gamma;
    have_gamma = true;
  }
  if (flags.delta1) c.bounds.delta1 = *flags.delta1;
  if (flags.delta2) c.bounds.delta2 = *flags.delta2;
  if (flags.dim) c.sim.dim = *flags.dim;
  if (flags.dt) c.sim.dt = *flags.dt;
  if (flags.t_final) c.sim.t_final = *flags.t_final;
  if (flags.eps) c.eps = *flags.eps;
  if (flags.tol) c.tol = *flags.tol;
  if (flags.grid) c.grid = *flags.grid;
  if (flags.samples) c.samples = *flags.samples;
  if (flags.steps) c.sweep.steps = *flags.steps;
  if (flags.sweep_param) c.sweep.parameter = *flags.sweep_param;
  if (flags.sweep_from) c.sweep.from = *flags.sweep_from;
  if (flags.sweep_to) c.sweep.to = *flags.sweep_to;
  if (flags.out) c.output = *flags.out;
  if (flags.seed) c.seed = *flags.seed;

  const bool needs_gamma = command == Command::Certify || command == Command::OpaRegion ||
                           command == Command::Simulate ||
                           (command == Command::Sweep && c.sweep.parameter != "gamma");
  require(!needs_gamma || have_gamma, "command " + to_string(command) + " needs --gamma");
  try {
    if (needs_gamma || have_gamma) c.bounds.validate();
    if (c.opa) c.opa->validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  require(!(c.bounds.delta1 < 0.0) && !(c.bounds.delta2 < 0.0), "delta1 and delta2 must be nonnegative");
  require(!c.sim.dim || *c.sim.dim >= 3, "--dim must be at least 3");
  require(!c.sim.dt || *c.sim.dt > 0.0, "--dt must be positive");
  require(!c.sim.t_final || *c.sim.t_final >= 0.0, "--t-final must be nonnegative");
  require(!c.eps || *c.eps > 0.0, "eps must be positive");
  require(c.tol > 0.0, "tol must be positive");
  require(c.grid >= 1, "--grid must be positive");
  require(c.samples >= 2, "samples must be at least 2");
  require(c.sweep.steps >= 1, "sweep needs at least one step");
  require(!c.output.empty(), "--out must not be empty");
  require(command != Command::OpaRegion || c.opa.has_value(), "opa-region needs OPA parameters");
  if (command == Command::Sweep) {
    static const std::vector<std::string> general = {"gamma", "delta1", "delta2"};
    static const std::vector<std::string> opa_only = {"kappa1", "kappa2", "chi"};
    const auto& p = c.sweep.parameter;
    const bool known = std::find(general.begin(), general.end(), p) != general.end() ||
                       (c.opa && std::find(opa_only.begin(), opa_only.end(), p) != opa_only.end());
    require(known, "cannot sweep parameter '" + p + "'");
  }
  return c;
}

namespace {

struct ResolvedModel {
  LinearQuantumSystem system;
  PerturbationSeries series;
};

ResolvedModel resolve(const RunConfig& c) {
  if (c.opa) {
    opa::OpaModel m = opa::build_opa(*c.opa);
    return {std::move(m.system), std::move(m.series)};
  }
  return {*c.system, c.series ? *c.series : PerturbationSeries(std::max(1, c.system->channels()))};
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::Certified: return kOk;
    case Verdict::FailedHurwitz: return kFailedHurwitz;
    case Verdict::FailedSmallGain: return kFailedSmallGain;
  }
  return kInternalError;
}

StabilityCertificate run_certify(const RunConfig& c, const ResolvedModel& m) {
  CertifyOptions opts;
  opts.eps = c.eps;
  StabilityCertificate cert = certify(m.system, c.bounds, opts);
  if (cert.verdict == Verdict::Certified && c.opa) {
    cert.invariant_level = opa::invariant_ellipsoid(*cert.P, *c.opa, c.bounds);
  }
  return cert;
}

json certificate_document(const RunConfig& c, const StabilityCertificate& cert) {
  json j = io::to_json(cert);
  j["bounds"] = io::to_json(c.bounds);
  if (c.opa) j["opa"] = {{"kappa1", c.opa->kappa1}, {"kappa2", c.opa->kappa2}, {"chi", c.opa->chi}};
  return j;
}

void summarize(const StabilityCertificate& cert, std::ostream& out) {
  out << "verdict " << to_string(cert.verdict) << "  hinf " << io::format_double(cert.hinf_reduced);
  if (cert.verdict == Verdict::Certified) {
    out << "  c1 " << io::format_double(cert.c1) << "  c2 " << io::format_double(cert.c2) << "  c3 "
        << io::format_double(cert.c3);
  }
  out << '\n';
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ResolvedModel m = resolve(c);
  const auto violations = validate_system(m.system);
  const auto adjoint = validate_selfadjoint(m.series);
  json j;
  j["system"] = io::to_json(violations);
  json sa = json::array();
  for (const auto& v : adjoint) {
    sa.push_back({{"i", v.index.i}, {"j", v.index.j}, {"k", v.index.k}, {"l", v.index.l},
                  {"residual", v.residual}});
  }
  j["series"] = sa;
  write_artifact(c, "_validation.json", j.dump(2) + "\n", out);
  for (const auto& v : violations) err << v.what << ", residual " << io::format_double(v.residual) << '\n';
  for (const auto& v : adjoint) {
    err << "series not self-adjoint at (" << v.index.i << ',' << v.index.j << ',' << v.index.k << ','
        << v.index.l << "), residual " << io::format_double(v.residual) << '\n';
  }
  return violations.empty() && adjoint.empty() ? kOk : kConfigError;
}

int cmd_certify(const RunConfig& c, std::ostream& out) {
  const ResolvedModel m = resolve(c);
  const StabilityCertificate cert = run_certify(c, m);
  write_artifact(c, "_certificate.json", certificate_document(c, cert).dump(2) + "\n", out);
  summarize(cert, out);
  return exit_for(cert.verdict);
}

int cmd_region(const RunConfig& c, std::ostream& out) {
  const ResolvedModel m = resolve(c);
  const opa::RegionCurve curve = opa::region_curve(*c.opa, c.bounds, c.samples);
  MagnitudeGrid grid;
  grid.max1 = curve.lambda_bar;
  grid.max2 = curve.cap2 > 0.0 ? 1.25 * curve.cap2 : 1.0;
  grid.cells1 = grid.cells2 = c.grid;
  const auto mask = scan_sector_region(m.series, c.bounds, grid);
  const opa::LambdaBar lb = opa::lambda_bar(*c.opa, c.bounds);

  write_artifact(c, "_region.csv", io::region_curve_csv(curve), out);
  write_artifact(c, "_mask.csv", io::region_mask_csv(mask), out);
  json j = {{"knee", curve.knee},
            {"cap2", curve.cap2},
            {"lambda_bar_numerator_root", lb.numerator_root},
            {"lambda_bar_caption", lb.caption},
            {"lambda_bar_discrepancy", lb.discrepancy()},
            {"gamma_condition", opa::gamma_condition(*c.opa, c.bounds.gamma)}};
  write_artifact(c, "_region.json", j.dump(2) + "\n", out);
  out << "right endpoint " << io::format_double(lb.numerator_root) << "  cap " << io::format_double(curve.cap2)
      << '\n';
  if (lb.discrepancy() != 0.0) {
    out << "note: closed-form caption endpoint " << io::format_double(lb.caption)
        << " differs from the root of the sector condition by " << io::format_double(lb.discrepancy()) << '\n';
  }
  return kOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ResolvedModel m = resolve(c);
  const StabilityCertificate cert = run_certify(c, m);
  write_artifact(c, "_certificate.json", certificate_document(c, cert).dump(2) + "\n", out);
  summarize(cert, out);
  if (cert.verdict != Verdict::Certified) return exit_for(cert.verdict);

  const int n = m.system.modes();
  const int dim = c.sim.dim.value_or(12);
  double dt = 1e-3, t_final = 10.0;
  if (c.opa) {
    dt = 1e-3 / std::max({c.opa->kappa1, c.opa->kappa2, c.opa->chi * dim});
    t_final = 10.0 / std::min(c.opa->kappa1, c.opa->kappa2);
  }
  fock::EvolveOptions opts;
  opts.dt = c.sim.dt.value_or(dt);
  opts.t_final = c.sim.t_final.value_or(t_final);

  std::vector<Complex> alpha = c.sim.alpha;
  if (alpha.empty()) alpha.assign(n, Complex(0.5, 0.0));
  if (static_cast<int>(alpha.size()) != n) throw ConfigError("sim.alpha needs one amplitude per mode");

  const fock::TruncatedAlgebra alg(n, dim);
  const DoubledMatrices d = doubled_matrices(m.system);
  const CMatrix H = fock::system_hamiltonian(alg, m.system, m.series);
  const CVector psi = fock::coherent_product(alg, alpha);
  fock::FockTrajectory traj =
      fock::lindblad_evolve(alg, H, fock::coupling_operators(alg, d), psi * psi.adjoint(), opts);
  const fock::BoundCheck check = fock::check_ms_bound(traj, cert.c1, cert.c2, cert.c3);
  write_artifact(c, "_trajectory.csv", io::trajectory_csv(traj, check.slack), out);
  out << "mean-square bound " << (check.pass ? "holds" : "VIOLATED") << ", worst slack "
      << io::format_double(check.worst_margin) << '\n';
  if (!check.pass) err << "simulated trajectory exceeds the certified bound\n";
  return check.pass ? kOk : kCheckFailed;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const std::vector<SweepRow> rows = sweep(c);
  std::string csv = c.sweep.parameter + ",verdict,hinf_reduced,c1,c2,c3,error\n";
  for (const SweepRow& r : rows) {
    csv += io::format_double(r.value) + ',' + r.verdict + ',' + io::format_double(r.hinf) + ',' +
           io::format_double(r.c1) + ',' + io::format_double(r.c2) + ',' + io::format_double(r.c3) + ',' +
           r.error + '\n';
  }
  write_artifact(c, "_sweep.csv", csv, out);
  return kOk;
}

int cmd_identities(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ResolvedModel m = resolve(c);
  std::mt19937_64 rng(c.seed);
  err << "seed " << c.seed << '\n';
  const CMatrix P = random_block_positive(m.system.modes(), rng);
  const fock::TruncatedAlgebra alg(m.system.modes(), c.sim.dim.value_or(6));
  const fock::IdentityReport report = fock::check_commutator_identities(alg, m.system, P, m.series);
  json j = io::to_json(report);
  j["seed"] = c.seed;
  j["P"] = io::to_json(P);
  write_artifact(c, "_identities.json", j.dump(2) + "\n", out);
  for (const auto& [name, r] : report.residuals) out << name << ' ' << io::format_double(r) << '\n';
  return report.worst() <= 1e-10 ? kOk : kCheckFailed;
}

int cmd_gamma(const RunConfig& c, std::ostream& out) {
  const ResolvedModel m = resolve(c);
  const auto hw = is_hurwitz(build_F(doubled_matrices(m.system).M, doubled_matrices(m.system).N));
  if (!hw.hurwitz) {
    out << "F is not Hurwitz (spectral abscissa " << io::format_double(hw.abscissa) << ")\n";
    return kFailedHurwitz;
  }
  const double g = gamma_search(m.system, c.bounds.delta1, c.bounds.delta2, c.tol);
  json j = {{"gamma_min", g}, {"tol", c.tol}};
  write_artifact(c, "_gamma.json", j.dump(2) + "\n", out);
  out << "minimal gamma " << io::format_double(g) << '\n';
  return kOk;
}

}  // namespace

double gamma_search(const LinearQuantumSystem& sys, double /*delta1*/, double /*delta2*/, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const DoubledMatrices d = doubled_matrices(sys);
  const CMatrix F = build_F(d.M, d.N);
  if (!is_hurwitz(F).hurwitz) throw NumericalError("gamma search needs a Hurwitz F");
  // The norms do not depend on gamma; only the threshold gamma/2 moves.
  const double norm = hinf_condition(d, F, 1.0).reduced;
  if (norm == 0.0) return 0.0;
  auto passes = [&](double gamma) { return norm < gamma / 2.0; };
  double lo = 0.0, hi = 1.0;
  while (!passes(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<SweepRow> sweep(const RunConfig& config) {
  const SweepConfig& s = config.sweep;
  std::vector<double> values;
  for (int k = 0; k < s.steps; ++k) {
    values.push_back(s.steps == 1 ? s.from : s.from + (s.to - s.from) * k / (s.steps - 1));
  }
  auto one = [&config, &s](double value) {
    SweepRow row;
    row.value = value;
    RunConfig c = config;
    if (s.parameter == "gamma") c.bounds.gamma = value;
    else if (s.parameter == "delta1") c.bounds.delta1 = value;
    else if (s.parameter == "delta2") c.bounds.delta2 = value;
    else if (s.parameter == "kappa1") c.opa->kappa1 = value;
    else if (s.parameter == "kappa2") c.opa->kappa2 = value;
    else if (s.parameter == "chi") c.opa->chi = value;
    try {
      c.bounds.validate();
      if (c.opa) c.opa->validate();
      CertifyOptions opts;
      opts.eps = c.eps;
      const StabilityCertificate cert = certify(resolve(c).system, c.bounds, opts);
      row.verdict = std::string(to_string(cert.verdict));
      row.hinf = cert.hinf_reduced;
      row.c1 = cert.c1;
      row.c2 = cert.c2;
      row.c3 = cert.c3;
    } catch (const std::exception& e) {
      row.verdict = "Error";
      row.error = e.what();
      std::replace(row.error.begin(), row.error.end(), ',', ';');
    }
    return row;
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = config.workers > 0 ? static_cast<std::size_t>(config.workers) : hw;
  std::vector<SweepRow> rows(values.size());
  for (std::size_t begin = 0; begin < values.size(); begin += workers) {
    const std::size_t end = std::min(values.size(), begin + workers);
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t k = begin; k < end; ++k) batch.push_back(std::async(std::launch::async, one, values[k]));
    for (std::size_t k = begin; k < end; ++k) rows[k] = batch[k - begin].get();
  }
  return rows;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::Validate: return cmd_validate(config, out, err);
      case Command::Certify: return cmd_certify(config, out);
      case Command::OpaRegion: return cmd_region(config, out);
      case Command::Simulate: return cmd_simulate(config, out, err);
      case Command::Sweep: return cmd_sweep(config, out);
      case Command::CheckIdentities: return cmd_identities(config, out, err);
      case Command::GammaSearch: return cmd_gamma(config, out);
    }
  } catch (const WriteError& e) {
    err << "error: " << e.what() << '\n';
    return kCannotWrite;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const StageError& e) {
    err << "error: " << e.what() << '\n';
    return e.stage() == "validate_system" ? kConfigError : kInternalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace qrstab::cli
