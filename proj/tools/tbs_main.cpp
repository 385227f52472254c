// Copyright 2026 The TBS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// tbs: run samplers over synthetic batch streams and verify their behaviour.
//
//   tbs simulate --alg rtbs-exp --decay exp:0.1 --n 1000 \
//                --stream constant:100 --k 500 --seed 1
//   tbs sweep --alg rtbs-exp,ttbs --n 100,1000 --b 100 ... --out dir
//   tbs verify [--check name]... [--runs R] [--seed S]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tbs/checks.hpp"
#include "tbs/partitioned.hpp"
#include "tbs/samplers.hpp"
#include "tbs/streams.hpp"
#include "tbs/types.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kDesignError = 3;

struct SimulateArgs {
  std::string alg;
  std::string decay = "exp:0";
  std::size_t n = 0;
  double nprime = 0.0;
  std::optional<double> b;
  double delta1 = 1e-3;
  double delta2 = 10.0;
  std::string stream;
  std::int64_t k = 0;
  std::uint64_t seed = 1;
  std::size_t partitions = 0;  // 0: single node
  std::string strategy = "centralized";
};

tbs::SamplerConfig to_config(const SimulateArgs& a) {
  tbs::SamplerConfig c;
  c.algorithm = tbs::parse_algorithm(a.alg);
  c.decay = tbs::DecayFn::parse(a.decay);
  c.n = a.n;
  c.n_prime = a.nprime;
  c.b = a.b.value_or(0.0);
  c.delta1 = a.delta1;
  c.delta2 = a.delta2;
  c.validate();
  return c;
}

void write_csv(std::ostream& os, const std::vector<tbs::TrajectoryRecord>& rows) {
  os << "k,W,C,rho,size,footprint_items,footprint_samples\n";
  os.precision(6);
  for (const auto& r : rows) {
    os << r.k << ',' << r.W << ',' << r.C << ',' << r.rho << ',' << r.size << ','
       << r.footprint_items << ',' << r.footprint_samples << '\n';
  }
}

std::vector<tbs::TrajectoryRecord> simulate(const SimulateArgs& a) {
  const tbs::SamplerConfig config = to_config(a);
  const auto spec = tbs::StreamSpec::parse(a.stream);
  if (a.k < 0) throw tbs::ConfigError("--k must be >= 0");
  tbs::RandomStream sizes_rng = tbs::size_stream(a.seed);
  const auto batches = tbs::batches_from_sizes(spec.sizes(a.k, sizes_rng));
  if (a.partitions == 0) return tbs::run(config, batches, a.seed);
  tbs::PartitionConfig pc;
  pc.partitions = a.partitions;
  pc.strategy = tbs::parse_strategy(a.strategy);
  return tbs::run_partitioned_rtbs(config, pc, batches, a.seed).trajectory;
}

void add_simulate_flags(CLI::App* cmd, SimulateArgs& a) {
  cmd->add_option("--alg", a.alg, "btbs, brs, ttbs, rtbs-exp, rtbs-gen or bchao")
      ->required();
  cmd->add_option("--decay", a.decay, "exp:<lambda>, poly:<s>:<d> or const");
  cmd->add_option("--n", a.n, "target or maximum sample size")->required();
  cmd->add_option("--nprime", a.nprime, "maximum sample weight (rtbs-gen)");
  cmd->add_option("--b", a.b, "assumed mean batch size (ttbs)");
  cmd->add_option("--delta1", a.delta1, "consolidation accuracy (rtbs-gen)");
  cmd->add_option("--delta2", a.delta2, "perturbed-item budget (rtbs-gen)");
  cmd->add_option("--stream", a.stream, "batch-size generator")->required();
  cmd->add_option("--k", a.k, "number of batches")->required();
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--partitions", a.partitions,
                  "simulated workers (rtbs-exp, rtbs-gen)");
  cmd->add_option("--strategy", a.strategy, "centralized or distributed");
}

struct SweepArgs {
  std::vector<std::string> alg;
  std::vector<std::string> decay = {"exp:0"};
  std::vector<std::size_t> n;
  std::vector<double> nprime = {0.0};
  std::vector<double> b;
  std::vector<double> delta1 = {1e-3};
  std::vector<double> delta2 = {10.0};
  std::vector<std::string> stream;
  std::vector<std::int64_t> k;
  std::vector<std::uint64_t> seed = {1};
  std::vector<std::size_t> partitions = {0};
  std::vector<std::string> strategy = {"centralized"};
  std::string out;
};

int sweep(const SweepArgs& s) {
  namespace fs = std::filesystem;
  fs::create_directories(s.out);
  std::ofstream index(fs::path(s.out) / "index.csv");
  index << "file,alg,decay,n,nprime,b,delta1,delta2,stream,k,seed,partitions,"
           "strategy\n";
  const std::vector<std::optional<double>> bs =
      s.b.empty() ? std::vector<std::optional<double>>{std::nullopt}
                  : std::vector<std::optional<double>>(s.b.begin(), s.b.end());
  std::size_t cell = 0;
  for (const auto& alg : s.alg)
    for (const auto& decay : s.decay)
      for (auto n : s.n)
        for (auto nprime : s.nprime)
          for (const auto& b : bs)
            for (auto d1 : s.delta1)
              for (auto d2 : s.delta2)
                for (const auto& stream : s.stream)
                  for (auto k : s.k)
                    for (auto seed : s.seed)
                      for (auto parts : s.partitions)
                        for (const auto& strategy : s.strategy) {
                          SimulateArgs a{alg, decay, n,      nprime, b,     d1,
                                         d2,  stream, k, seed,   parts, strategy};
                          char name[32];
                          std::snprintf(name, sizeof(name), "cell_%05zu.csv", cell++);
                          std::ofstream os(fs::path(s.out) / name);
                          write_csv(os, simulate(a));
                          index << name << ',' << alg << ',' << decay << ',' << n
                                << ',' << nprime << ','
                                << (b ? std::to_string(*b) : std::string()) << ','
                                << d1 << ',' << d2 << ',' << stream << ',' << k
                                << ',' << seed << ',' << parts << ',' << strategy
                                << '\n';
                        }
  return 0;
}

int verify(const std::vector<std::string>& names, std::size_t runs,
           std::uint64_t seed) {
  std::vector<std::string> todo = names;
  if (todo.empty()) {
    for (const auto& c : tbs::check_registry()) todo.push_back(c.name);
  }
  tbs::CheckOptions options;
  options.runs = runs;
  options.seed = seed;
  bool all = true;
  for (const auto& name : todo) {
    for (const auto& r : tbs::run_check(name, options)) {
      std::printf("%-52s predicted=%-12.6g observed=%-12.6g tolerance=%-12.6g %s\n",
                  r.name.c_str(), r.predicted, r.observed, r.tolerance,
                  r.pass ? "PASS" : "FAIL");
      std::fflush(stdout);
      all = all && r.pass;
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-biased stream sampling"};
  app.require_subcommand(1);

  SimulateArgs sim;
  std::string out;
  auto* simulate_cmd = app.add_subcommand("simulate", "write one CSV trajectory");
  add_simulate_flags(simulate_cmd, sim);
  simulate_cmd->add_option("--out", out, "output file (default: stdout)");

  SweepArgs sw;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "one CSV per combination of flag values");
  sweep_cmd->add_option("--alg", sw.alg)->required()->delimiter(',');
  sweep_cmd->add_option("--decay", sw.decay)->delimiter(',');
  sweep_cmd->add_option("--n", sw.n)->required()->delimiter(',');
  sweep_cmd->add_option("--nprime", sw.nprime)->delimiter(',');
  sweep_cmd->add_option("--b", sw.b)->delimiter(',');
  sweep_cmd->add_option("--delta1", sw.delta1)->delimiter(',');
  sweep_cmd->add_option("--delta2", sw.delta2)->delimiter(',');
  // Stream specs contain ':' but never ','.
  sweep_cmd->add_option("--stream", sw.stream)->required()->delimiter(',');
  sweep_cmd->add_option("--k", sw.k)->required()->delimiter(',');
  sweep_cmd->add_option("--seed", sw.seed)->delimiter(',');
  sweep_cmd->add_option("--partitions", sw.partitions)->delimiter(',');
  sweep_cmd->add_option("--strategy", sw.strategy)->delimiter(',');
  sweep_cmd->add_option("--out", sw.out, "output directory")->required();

  std::vector<std::string> checks;
  std::size_t runs = 0;
  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "run the verification suite");
  verify_cmd->add_option("--check", checks, "check name (repeatable)");
  verify_cmd->add_option("--runs", runs, "replicas per Monte Carlo check");
  verify_cmd->add_option("--seed", verify_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) {
      const auto rows = simulate(sim);
      if (out.empty()) {
        write_csv(std::cout, rows);
      } else {
        std::ofstream os(out);
        write_csv(os, rows);
      }
      return 0;
    }
    if (*sweep_cmd) return sweep(sw);
    return verify(checks, runs, verify_seed);
  } catch (const tbs::TestDesignError& e) {
    std::cerr << "test design error: " << e.what() << '\n';
    return kDesignError;
  } catch (const tbs::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const tbs::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const tbs::UnsupportedDecay& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
