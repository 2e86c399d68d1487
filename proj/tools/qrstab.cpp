// Copyright 2026 The qrstab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "qrstab/cli.hpp"
#include "qrstab/io.hpp"

int main(int argc, char** argv) {
  using namespace qrstab;

  CLI::App app{"Robust mean-square stability certificates for uncertain nonlinear open quantum systems"};
  app.require_subcommand(1);

  std::string config_path;
  cli::Overrides flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config document");
    sub->add_option("--kappa1", flags.kappa1, "OPA fundamental mirror coupling");
    sub->add_option("--kappa2", flags.kappa2, "OPA second-harmonic mirror coupling");
    sub->add_option("--chi", flags.chi, "OPA chi(2) strength");
    sub->add_option("--gamma", flags.gamma, "sector gain");
    sub->add_option("--delta1", flags.delta1, "sector offset of the first-derivative bound");
    sub->add_option("--delta2", flags.delta2, "bound on the second derivatives");
    sub->add_option("--dim", flags.dim, "Fock truncation per mode");
    sub->add_option("--dt", flags.dt, "integrator step");
    sub->add_option("--t-final", flags.t_final, "simulated time span");
    sub->add_option("--grid", flags.grid, "sector scan cells per axis");
    sub->add_option("--samples", flags.samples, "region curve samples");
    sub->add_option("--eps", flags.eps, "Riccati regularization");
    sub->add_option("--tol", flags.tol, "gamma search tolerance");
    sub->add_option("--sweep-param", flags.sweep_param, "parameter swept by `sweep`");
    sub->add_option("--from", flags.sweep_from, "sweep start");
    sub->add_option("--to", flags.sweep_to, "sweep end");
    sub->add_option("--steps", flags.steps, "sweep points");
    sub->add_option("--out", flags.out, "output path prefix");
    sub->add_option("--seed", flags.seed, "seed for randomized checks");
  };

  const char* names[][2] = {
      {"validate", "check system symmetries and series self-adjointness"},
      {"certify", "compute the stability certificate"},
      {"opa-region", "OPA admissible region curve and sector scan"},
      {"simulate", "certify, then check the bound against a Fock-space simulation"},
      {"sweep", "certify over a range of one parameter"},
      {"check-identities", "verify the commutator identities on a truncated Fock space"},
      {"gamma-search", "smallest certifiable gamma"},
  };
  for (const auto& [name, help] : names) add_common(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    std::optional<nlohmann::json> doc;
    if (!config_path.empty()) doc = io::read_json_file(config_path);
    const cli::RunConfig config = cli::make_config(cli::command_from_string(name), doc, flags);
    return cli::run(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kConfigError;
  }
}
