// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QRSTAB_CLI_HPP
#define QRSTAB_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrstab/model.hpp"
#include "qrstab/opa.hpp"
#include "qrstab/perturbation.hpp"

namespace qrstab::cli {

enum ExitCode : int {
  kOk = 0,
  kFailedHurwitz = 1,
  kFailedSmallGain = 2,
  kCheckFailed = 3,
  kConfigError = 64,
  kCannotWrite = 66,
  kInternalError = 70,
};

enum class Command { Validate, Certify, OpaRegion, Simulate, Sweep, CheckIdentities, GammaSearch };

Command command_from_string(const std::string& s);
std::string to_string(Command c);

struct SimConfig {
  std::optional<int> dim;  // simulate: 12, check-identities: 6
  std::optional<double> dt;
  std::optional<double> t_final;
  std::vector<Complex> alpha;  // coherent amplitude per mode; default 0.5 each
};

struct SweepConfig {
  std::string parameter = "gamma";
  double from = 1.0;
  double to = 10.0;
  int steps = 10;
};

struct RunConfig {
  Command command = Command::Certify;
  std::optional<opa::OpaParams> opa;
  std::optional<LinearQuantumSystem> system;
  std::optional<PerturbationSeries> series;
  SectorBounds bounds;
  SimConfig sim;
  SweepConfig sweep;
  int grid = 50;
  int samples = 200;
  std::optional<double> eps;
  double tol = 1e-6;
  std::string output = "qrstab";
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency
};

/// Command-line values; each set field overrides the config document.
struct Overrides {
  std::optional<double> kappa1, kappa2, chi, gamma, delta1, delta2, dt, t_final, eps, tol;
  std::optional<int> dim, grid, samples, steps;
  std::optional<std::string> out, sweep_param;
  std::optional<double> sweep_from, sweep_to;
  std::optional<std::uint64_t> seed;
};

/// Builds a config from an optional JSON document and flag overrides. Throws
/// ConfigError on missing or out-of-range fields.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig make_config(Command command, const std::optional<nlohmann::json>& doc,
                      const Overrides& flags);

/// Executes the command, writing artifacts under `config.output` and
/// diagnostics to `err`. Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Smallest gamma (within tol) passing the H-infinity condition; 0 when the
/// norm vanishes. Throws NumericalError when F is not Hurwitz.
double gamma_search(const LinearQuantumSystem& sys, double delta1, double delta2, double tol);

struct SweepRow {
  double value = 0.0;
  std::string verdict;
  double hinf = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  std::string error;
};

/// Runs certification at `steps` evenly spaced parameter values on a worker
/// pool; rows come back in input order.
std::vector<SweepRow> sweep(const RunConfig& config);

}  // namespace qrstab::cli

#endif  // QRSTAB_CLI_HPP
