// Copyright 2026 The Authors.
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

// gcfl_sim: run federated experiments and parameter sweeps.
//
//   gcfl_sim run --config FILE [--out DIR] [--seed N] [--dry-run]
//                [--key value]...
//   gcfl_sim sweep --config FILE --param NAME --values v1,v2,... [...]
//
// Any dotted config key may be overridden with --key value (or --key=value).
// GCFL_OUTPUT_DIR overrides the configured output directory; --out wins
// over both.

#include <cstdlib>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gcfl/config.h"
#include "gcfl/errors.h"
#include "gcfl/experiment.h"

namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

Overrides ParseOverrides(const std::vector<std::string>& extras) {
  Overrides out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() <= 2) {
      throw gcfl::ConfigError("unexpected argument '" + arg + "'");
    }
    const std::string body = arg.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      out.emplace_back(body, extras[++i]);
    } else {
      throw gcfl::ConfigError("override '" + arg + "' is missing a value");
    }
  }
  return out;
}

struct CommonArgs {
  std::string config;
  std::string out;
  std::string seed;
  bool dry_run = false;
};

void AddCommon(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Experiment config file")
      ->required();
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--seed", args.seed, "Master seed");
  cmd->add_flag("--dry-run", args.dry_run,
                "Print the resolved config and exit");
  cmd->allow_extras();
}

gcfl::ExperimentConfig Resolve(const CommonArgs& args,
                               const std::vector<std::string>& extras) {
  Overrides overrides = ParseOverrides(extras);
  if (const char* env = std::getenv("GCFL_OUTPUT_DIR"); env && *env) {
    overrides.emplace_back("output_dir", env);
  }
  if (!args.out.empty()) overrides.emplace_back("output_dir", args.out);
  if (!args.seed.empty()) overrides.emplace_back("seed", args.seed);
  return gcfl::ParseConfigFile(args.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated learning simulator with gradient-matching coresets"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run every configured arm once");
  AddCommon(run, run_args);

  CommonArgs sweep_args;
  std::string param;
  std::string values;
  CLI::App* sweep = app.add_subcommand("sweep", "Repeat a run over values");
  AddCommon(sweep, sweep_args);
  sweep->add_option("--param", param, "Parameter to sweep")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const gcfl::ExperimentConfig cfg = Resolve(run_args, run->remaining());
      if (run_args.dry_run) {
        std::cout << gcfl::ToText(cfg);
        return 0;
      }
      return gcfl::Run(cfg, std::cerr);
    }
    const gcfl::ExperimentConfig cfg = Resolve(sweep_args, sweep->remaining());
    gcfl::SweepSpec spec{param, gcfl::SplitList(values)};
    spec.Validate();
    if (sweep_args.dry_run) {
      std::cout << gcfl::ToText(cfg) << "\n# sweep " << param << " over "
                << values << '\n';
      return 0;
    }
    return gcfl::Sweep(cfg, spec, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
