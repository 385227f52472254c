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

#include "tbs/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "tbs/analysis.hpp"
#include "tbs/decay.hpp"
#include "tbs/latent_oracle.hpp"
#include "tbs/partitioned.hpp"
#include "tbs/random.hpp"
#include "tbs/samplers.hpp"
#include "tbs/streams.hpp"
#include "tbs/types.hpp"

namespace tbs {

namespace {

using Results = std::vector<CheckResult>;

std::size_t replicas(const CheckOptions& o, std::size_t fallback) {
  return o.runs != 0 ? o.runs : fallback;
}

CheckResult within(std::string name, double predicted, double observed,
                   double tolerance) {
  return {std::move(name), predicted, observed, tolerance,
          std::fabs(observed - predicted) <= tolerance};
}

CheckResult at_most(std::string name, double bound, double observed) {
  return {std::move(name), bound, observed, 0.0, observed <= bound};
}

SamplerConfig config(Algorithm a, const std::string& decay, std::size_t n) {
  SamplerConfig c;
  c.algorithm = a;
  c.decay = DecayFn::parse(decay);
  c.n = n;
  return c;
}

std::vector<Batch> constant_batches(std::size_t size, std::size_t count) {
  return batches_from_sizes(std::vector<std::size_t>(count, size));
}

// One line per target: estimate against predicted inclusion probabilities.
void inclusion_lines(Results& out, const std::string& name,
                     const std::vector<InclusionEstimate>& est,
                     const std::vector<double>& predicted) {
  for (std::size_t t = 0; t < est.size(); ++t) {
    out.push_back(within(name + "[i=" + std::to_string(arrival_index(est[t].item)) +
                             "]",
                         predicted[t], est[t].p_hat, est[t].ci_half_width));
  }
}

Results latent_exact(const CheckOptions&) {
  const Rational thetas[] = {Rational(1, 10), Rational(1, 4), Rational(1, 3),
                             Rational(1, 2),  Rational(7, 8), Rational(9, 10)};
  const Rational fracs[] = {Rational(0), Rational(1, 4), Rational(1, 2),
                            Rational(3, 5), Rational(7, 10)};
  const auto make = [](std::size_t full, const Rational& fr, ItemId base) {
    std::vector<ItemId> items;
    for (std::size_t i = 0; i < full; ++i) items.push_back(base + i);
    std::optional<ItemId> partial;
    if (fr > 0) partial = base + 50;
    return ExactLatent::make(items, partial, Rational(full) + fr);
  };
  const auto prob = [](const std::map<ItemId, Rational>& m, ItemId x) {
    const auto it = m.find(x);
    return it == m.end() ? Rational(0) : it->second;
  };
  std::size_t cases = 0;
  std::size_t bad = 0;
  for (std::size_t full = 0; full <= 5; ++full) {
    for (const auto& fr : fracs) {
      if (full == 0 && fr == 0) continue;
      const ExactLatent l = make(full, fr, 1);
      const auto before = inclusion_probabilities(l);
      for (const auto& theta : thetas) {
        ++cases;
        const OutcomeMap out = enumerate_downsample(l, theta);
        const auto after = inclusion_probabilities(out);
        bool ok = total_probability(out) == 1;
        for (const auto& [o, p] : out) ok = ok && o.weight == theta * l.weight;
        for (const auto& [x, p] : before) ok = ok && prob(after, x) == theta * p;
        if (!ok) ++bad;
      }
    }
  }
  for (std::size_t a1 = 0; a1 <= 5; ++a1) {
    for (std::size_t a2 = 0; a2 <= 5; ++a2) {
      for (const auto& f1 : fracs) {
        for (const auto& f2 : fracs) {
          ++cases;
          const ExactLatent l1 = make(a1, f1, 100);
          const ExactLatent l2 = make(a2, f2, 200);
          const OutcomeMap out = enumerate_union(l1, l2);
          const auto after = inclusion_probabilities(out);
          bool ok = total_probability(out) == 1;
          for (const auto& [o, p] : out) ok = ok && o.weight == l1.weight + l2.weight;
          for (const auto* l : {&l1, &l2}) {
            for (const auto& [x, p] : inclusion_probabilities(*l)) {
              ok = ok && prob(after, x) == p;
            }
          }
          if (!ok) ++bad;
        }
      }
    }
  }
  return {within("latent-exact[" + std::to_string(cases) + " cases]", 0.0,
                 static_cast<double>(bad), 0.0)};
}

Results brs_uniformity(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 100000);
  const SamplerConfig c = config(Algorithm::kBrs, "const", 2);
  const auto batches = batches_from_sizes({2, 2});
  std::vector<ItemId> all;
  for (const auto& b : batches) all.insert(all.end(), b.items.begin(), b.items.end());
  std::map<std::pair<ItemId, ItemId>, std::size_t> cell;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      cell.emplace(std::make_pair(all[i], all[j]), cell.size());
    }
  }
  std::vector<std::size_t> counts(cell.size(), 0);
  for (std::size_t r = 0; r < runs; ++r) {
    auto s = make_sampler(c, o.seed, r);
    for (const auto& b : batches) s->step(b);
    auto x = s->sample();
    if (x.size() != 2) throw InvariantViolation("brs sample has wrong size");
    std::sort(x.begin(), x.end());
    ++counts[cell.at({x[0], x[1]})];
  }
  const auto chi = chi_square_uniformity(counts);
  return {at_most("brs-uniformity[chi2]", chi.critical, chi.statistic)};
}

Results btbs_inclusion(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 100000);
  const SamplerConfig c = config(Algorithm::kBtbs, "exp:0.5", 5);
  const auto batches = constant_batches(5, 10);
  const std::vector<ItemId> targets = {make_item_id(9, 0), make_item_id(7, 0),
                                       make_item_id(4, 0)};
  std::vector<double> p;
  for (ItemId x : targets) p.push_back(c.decay.at(10 - arrival_index(x)));
  Results out;
  inclusion_lines(out, "btbs-inclusion",
                  estimate_inclusion(c, batches, targets, runs, o.seed), p);
  return out;
}

Results ttbs_inclusion(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 100000);
  SamplerConfig c = config(Algorithm::kTtbs, "poly:2:0", 10);
  c.b = 10.0;
  const auto batches = constant_batches(10, 10);
  const double q = 10.0 * gamma(c.decay) / c.b;
  const std::vector<ItemId> targets = {make_item_id(10, 0), make_item_id(8, 0),
                                       make_item_id(5, 0)};
  std::vector<double> p;
  for (ItemId x : targets) p.push_back(q * c.decay.at(10 - arrival_index(x)));
  Results out;
  inclusion_lines(out, "ttbs-inclusion",
                  estimate_inclusion(c, batches, targets, runs, o.seed), p);
  return out;
}

// Replica means and variances of C_k at the requested steps.
struct Moments {
  std::vector<double> mean;
  std::vector<double> var;
};

Moments size_moments(const SamplerConfig& c, const std::vector<Batch>& batches,
                     const std::vector<std::int64_t>& steps, std::size_t runs,
                     std::uint64_t seed) {
  std::vector<double> s1(steps.size(), 0.0);
  std::vector<double> s2(steps.size(), 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    auto s = make_sampler(c, seed, r);
    for (const auto& b : batches) {
      s->step(b);
      for (std::size_t j = 0; j < steps.size(); ++j) {
        if (b.index == steps[j]) {
          const double v = s->record().C;
          s1[j] += v;
          s2[j] += v * v;
        }
      }
    }
  }
  Moments m;
  const double n = static_cast<double>(runs);
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const double mean = s1[j] / n;
    m.mean.push_back(mean);
    m.var.push_back((s2[j] - n * mean * mean) / (n - 1.0));
  }
  return m;
}

Results ttbs_mean_check(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 10000);
  SamplerConfig c = config(Algorithm::kTtbs, "poly:2:0", 100);
  c.b = 100.0;
  const std::vector<std::int64_t> steps = {1, 5, 20};
  const auto m = size_moments(c, constant_batches(100, 20), steps, runs, o.seed);
  const auto consts = DecayConstants::compute(c.decay, 64);
  Results out;
  for (std::size_t j = 0; j < steps.size(); ++j) {
    out.push_back(within("ttbs-mean[k=" + std::to_string(steps[j]) + "]",
                         ttbs_mean(steps[j], 100.0, consts), m.mean[j],
                         kSigmas * std::sqrt(m.var[j] / static_cast<double>(runs))));
  }
  return out;
}

Results ttbs_variance(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 10000);
  SamplerConfig c = config(Algorithm::kTtbs, "exp:0.1", 1000);
  c.b = 200.0;
  const auto consts = DecayConstants::compute(c.decay);
  const auto k = static_cast<std::int64_t>(std::ceil(10.0 / consts.gamma));
  const auto m = size_moments(c, constant_batches(200, static_cast<std::size_t>(k)),
                              {k}, runs, o.seed);
  const double pred = ttbs_var_limit(1000.0, 200.0, consts);
  return {within("ttbs-variance[k=" + std::to_string(k) + "]", pred, m.var[0],
                 0.1 * pred)};
}

Results rtbs_exp_inclusion_check(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 10000);
  const auto batches = constant_batches(10, 30);
  const std::vector<ItemId> targets = {make_item_id(29, 0), make_item_id(25, 0),
                                       make_item_id(15, 0)};
  Results out;
  for (std::size_t n : {20, 200}) {
    const SamplerConfig c = config(Algorithm::kRtbsExp, "exp:0.1", n);
    const double w = total_weights(c.decay, std::vector<std::size_t>(30, 10)).back();
    std::vector<double> p;
    for (ItemId x : targets) {
      p.push_back(rtbs_exp_inclusion(static_cast<double>(n), w,
                                     c.decay.at(30 - arrival_index(x))));
    }
    inclusion_lines(out,
                    std::string("rtbs-exp-inclusion[") +
                        (w > static_cast<double>(n) ? "saturated" : "unsaturated") +
                        "]",
                    estimate_inclusion(c, batches, targets, runs, o.seed), p);
  }
  return out;
}

Results rtbs_exp_bounds(const CheckOptions& o) {
  const SamplerConfig c = config(Algorithm::kRtbsExp, "exp:0.1", 1000);
  RandomStream sizes_rng = size_stream(o.seed);
  const auto batches =
      batches_from_sizes(StreamSpec::parse("uniform:0:200").sizes(10000, sizes_rng));
  double worst_rel = 0.0;
  std::size_t worst_size = 0;
  run(c, batches, o.seed, 0, [&](const TrajectoryRecord& r, const Sampler&) {
    const double target = r.rho * r.W;
    if (target > 0.0) worst_rel = std::max(worst_rel, std::fabs(r.C - target) / target);
    worst_size = std::max(worst_size, r.size);
  });
  return {at_most("rtbs-exp-bounds[C=rho*W]", 1e-6, worst_rel),
          at_most("rtbs-exp-bounds[size<=n]", 1000.0,
                  static_cast<double>(worst_size))};
}

Results classic_reservoir(const CheckOptions& o) {
  const SamplerConfig c = config(Algorithm::kRtbsExp, "exp:0", 10);
  double worst = 0.0;
  run(c, constant_batches(1, 1000), o.seed, 0,
      [&](const TrajectoryRecord& r, const Sampler&) {
        const double want = std::min(1.0, 10.0 / static_cast<double>(r.k));
        worst = std::max(worst, std::fabs(r.rho - want));
      });
  return {within("classic-reservoir[rho=min(1,n/k)]", 0.0, worst, 0.0)};
}

Results rtbs_gen_structure(const CheckOptions& o) {
  SamplerConfig c = config(Algorithm::kRtbsGen, "poly:2:10", 1000);
  c.n_prime = 2000.0;
  const std::int64_t horizon = 6000;
  const auto spec = StreamSpec::parse("periodic:100:300:2000");
  RandomStream unused = size_stream(o.seed);
  const auto sizes = spec.sizes(horizon, unused);
  const auto batches = batches_from_sizes(sizes);
  std::vector<double> f(static_cast<std::size_t>(horizon) + 1);
  for (std::int64_t j = 0; j <= horizon; ++j) f[static_cast<std::size_t>(j)] = c.decay.at(j);

  double worst_ratio = 0.0;  // max of rho_k f_{k-i} / (rho_{k-1} f_{k-1-i})
  std::int64_t worst_lag_excess = std::numeric_limits<std::int64_t>::min();
  std::int64_t final_n = 0;
  double worst_perturbed = 0.0;
  std::size_t under_cap = 0, over_cap = 0, fired = 0, recovered = 0;
  double w_max = 0.0;
  std::size_t b_star = 0;
  run(c, batches, o.seed, 0, [&](const TrajectoryRecord& r, const Sampler& s) {
    const RtbsGenStatus st = *s.gen_status();
    const std::int64_t k = r.k;
    for (std::int64_t i = st.m; i < k; ++i) {
      const double ratio = (st.rho * f[static_cast<std::size_t>(k - i)]) /
                           (st.rho_prev * f[static_cast<std::size_t>(k - 1 - i)]);
      worst_ratio = std::max(worst_ratio, ratio);
    }
    b_star = std::max(b_star, sizes[static_cast<std::size_t>(k - 1)]);
    const std::int64_t n_bound =
        tail_index(c.decay, c.delta2 / static_cast<double>(b_star));
    final_n = n_bound;
    worst_lag_excess = std::max(worst_lag_excess, (k - st.m) - n_bound);
    double perturbed = 0.0;
    for (std::int64_t i = 1; i < st.m; ++i) {
      perturbed += static_cast<double>(sizes[static_cast<std::size_t>(i - 1)]) *
                   f[static_cast<std::size_t>(k - i)];
    }
    worst_perturbed = std::max(worst_perturbed, perturbed);
    w_max = std::max(w_max, r.W);
    if (w_max <= c.n_prime && r.rho != 1.0) ++under_cap;
    if (w_max > c.n_prime && r.rho < (c.n_prime / w_max) * (1.0 - 1e-12)) ++over_cap;
    if (k > 1 && st.rho_star_binding) {
      ++fired;
      if (r.rho > st.rho_prev) ++recovered;
    }
  });
  return {
      at_most("rtbs-gen-structure[monotone rho*f]", 1.0 + 1e-9, worst_ratio),
      at_most("rtbs-gen-structure[k-m<=N]", static_cast<double>(final_n),
              static_cast<double>(final_n + worst_lag_excess)),
      {"rtbs-gen-structure[perturbed weight<delta2]", c.delta2, worst_perturbed, 0.0,
       worst_perturbed < c.delta2},
      within("rtbs-gen-structure[rho=1 while W<=n']", 0.0, static_cast<double>(under_cap), 0.0),
      within("rtbs-gen-structure[rho>=n'/max W]", 0.0, static_cast<double>(over_cap), 0.0),
      {"rtbs-gen-structure[rho grows after clamps]", static_cast<double>(fired),
       static_cast<double>(recovered), 0.0, fired > 0 && recovered == fired},
  };
}

Results consolidation_sizing(const CheckOptions&) {
  const DecayFn fn = DecayFn::parse("poly:2:0");
  const std::int64_t n = tail_index(fn, 100.0 / 1e4);
  return {within("consolidation-sizing[N+2]", 102.5, static_cast<double>(n + 2),
                 7.5)};
}

Results exp_through_general(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 10000);
  const auto batches = constant_batches(5, 100);
  const std::vector<ItemId> targets = {make_item_id(100, 0), make_item_id(90, 0),
                                       make_item_id(60, 0)};
  const auto e = estimate_inclusion(config(Algorithm::kRtbsExp, "exp:0.1", 20),
                                    batches, targets, runs, o.seed);
  const auto g = estimate_inclusion(config(Algorithm::kRtbsGen, "exp:0.1", 20),
                                    batches, targets, runs, o.seed + 1);
  Results out;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    out.push_back(within(
        "exp-through-general[i=" + std::to_string(arrival_index(targets[t])) + "]",
        e[t].p_hat, g[t].p_hat,
        std::hypot(e[t].ci_half_width, g[t].ci_half_width)));
  }
  return out;
}

Results bchao_violation(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 100000);
  const auto batches = constant_batches(1, 30);
  const std::vector<ItemId> targets = {make_item_id(30, 0), make_item_id(28, 0)};
  const double want = std::exp(-2.0);
  Results out;
  for (Algorithm a : {Algorithm::kBchao, Algorithm::kRtbsExp}) {
    const auto est =
        estimate_inclusion(config(a, "exp:1", 10), batches, targets, runs, o.seed);
    const auto ratio = ratio_estimate(est[1], est[0]);
    const bool deviates = std::fabs(ratio.ratio - want) > ratio.ci_half_width;
    const bool bchao = a == Algorithm::kBchao;
    out.push_back({"bchao-violation[" + std::string(algorithm_name(a)) +
                       (bchao ? " deviates]" : " holds]"),
                   want, ratio.ratio, ratio.ci_half_width,
                   bchao ? deviates : !deviates});
  }
  return out;
}

Results partitioned_equivalence(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 10000);
  const SamplerConfig c = config(Algorithm::kRtbsExp, "exp:0.1", 20);
  const auto batches = constant_batches(10, 50);
  const std::vector<ItemId> targets = {make_item_id(50, 0), make_item_id(47, 0),
                                       make_item_id(40, 0)};
  const double w = total_weights(c.decay, std::vector<std::size_t>(50, 10)).back();
  std::vector<double> p;
  for (ItemId x : targets) {
    p.push_back(rtbs_exp_inclusion(20.0, w, c.decay.at(50 - arrival_index(x))));
  }
  Results out;
  std::size_t moves = 0;
  for (Strategy strategy : {Strategy::kCentralized, Strategy::kDistributed}) {
    for (std::size_t m : {1, 2, 4}) {
      PartitionConfig pc;
      pc.partitions = m;
      pc.strategy = strategy;
      // A fresh seed per configuration keeps the estimates independent.
      const std::uint64_t seed = o.seed + 16 * static_cast<std::uint64_t>(strategy) + m;
      const auto est = estimate_inclusion(
          [&](std::uint64_t r) {
            auto res = run_partitioned_rtbs(c, pc, batches, seed, r);
            moves += res.cross_partition_moves;
            return res.realized;
          },
          targets, runs);
      double worst = 0.0;
      for (std::size_t t = 0; t < targets.size(); ++t) {
        worst = std::max(worst, std::fabs(est[t].p_hat - p[t]) /
                                    std::max(est[t].ci_half_width, 1e-12));
      }
      out.push_back(at_most("partitioned-equivalence[" +
                                std::string(strategy_name(strategy)) +
                                " m=" + std::to_string(m) + " |err|/ci]",
                            1.0, worst));
    }
  }
  out.push_back(within("partitioned-equivalence[cross-partition moves]", 0.0,
                       static_cast<double>(moves), 0.0));

  // m = 1 reproduces the single-node run exactly.
  std::size_t mismatches = 0;
  for (Algorithm a : {Algorithm::kRtbsExp, Algorithm::kRtbsGen}) {
    for (Strategy strategy : {Strategy::kCentralized, Strategy::kDistributed}) {
      for (std::uint64_t r = 0; r < 20; ++r) {
        SamplerConfig cc = c;
        cc.algorithm = a;
        auto single = make_sampler(cc, o.seed, r);
        PartitionConfig pc;
        pc.strategy = strategy;
        auto part = make_partitioned_sampler(cc, pc, o.seed, r);
        for (const auto& b : batches) {
          single->step(b);
          part->step(b);
          const auto x = single->record();
          const auto y = part->record();
          if (x.W != y.W || x.C != y.C || x.rho != y.rho || x.size != y.size ||
              single->sample() != part->sample()) {
            ++mismatches;
          }
        }
      }
    }
  }
  out.push_back(within("partitioned-equivalence[m=1 identical steps]", 0.0,
                       static_cast<double>(mismatches), 0.0));
  return out;
}

Results size_regimes(const CheckOptions& o) {
  const std::size_t n = 1000;
  SamplerConfig tt = config(Algorithm::kTtbs, "exp:0.1", n);
  tt.b = 100.0;
  const SamplerConfig rt = config(Algorithm::kRtbsExp, "exp:0.1", n);
  RandomStream unused = size_stream(o.seed);
  const std::size_t reps = 5;

  const auto grow = batches_from_sizes(
      StreamSpec::parse("growing:100:1.002:200").sizes(1000, unused));
  double tt_final = 0.0;
  std::size_t rt_max = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    tt_final += static_cast<double>(run(tt, grow, o.seed, r).back().size);
    for (const auto& rec : run(rt, grow, o.seed, r)) rt_max = std::max(rt_max, rec.size);
  }
  tt_final /= static_cast<double>(reps);

  const auto shrink = batches_from_sizes(
      StreamSpec::parse("decaying:100:0.8:200").sizes(300, unused));
  double tt_mean = 0.0;
  double rt_mean = 0.0;
  std::size_t cells = 0;
  for (std::size_t r = 0; r < 4 * reps; ++r) {
    const auto a = run(tt, shrink, o.seed, r);
    const auto b = run(rt, shrink, o.seed, r);
    for (std::size_t k = 200; k < a.size(); ++k) {
      tt_mean += static_cast<double>(a[k].size);
      rt_mean += static_cast<double>(b[k].size);
      ++cells;
    }
  }
  tt_mean /= static_cast<double>(cells);
  rt_mean /= static_cast<double>(cells);
  return {
      {"size-regimes[growing: ttbs final size > 2n]", 2.0 * n, tt_final, 0.0,
       tt_final > 2.0 * n},
      at_most("size-regimes[growing: rtbs size <= n]", static_cast<double>(n),
              static_cast<double>(rt_max)),
      {"size-regimes[decaying: rtbs mean >= ttbs mean]", tt_mean, rt_mean, 0.0,
       rt_mean >= tt_mean},
  };
}

Results binomial_downsampling(const CheckOptions& o) {
  const std::size_t runs = replicas(o, 100000);
  constexpr std::size_t kItems = 6;
  const Rational p(2, 5);
  // Exact: binomial count then a uniform subset gives every subset T the
  // probability p^|T| (1 - p)^(6 - |T|).
  std::size_t bad = 0;
  std::vector<double> cell_p;
  for (unsigned mask = 0; mask < (1u << kItems); ++mask) {
    const auto j = static_cast<std::size_t>(__builtin_popcount(mask));
    Rational choose(1);
    for (std::size_t i = 0; i < j; ++i) choose = choose * Rational(kItems - i) / Rational(i + 1);
    Rational pj(1), qj(1);
    for (std::size_t i = 0; i < j; ++i) pj *= p;
    for (std::size_t i = j; i < kItems; ++i) qj *= (1 - p);
    const Rational two_stage = (choose * pj * qj) / choose;
    Rational coins(1);
    for (std::size_t i = 0; i < kItems; ++i) coins *= (mask >> i) & 1u ? p : 1 - p;
    if (two_stage != coins) ++bad;
    cell_p.push_back(coins.convert_to<double>());
  }
  RandomStream rng(o.seed, 7);
  std::vector<std::size_t> counts(cell_p.size(), 0);
  const std::vector<unsigned> items = {0, 1, 2, 3, 4, 5};
  for (std::size_t r = 0; r < runs; ++r) {
    std::vector<unsigned> v = items;
    retain_random(v, rng.binomial(kItems, 0.4), rng);
    unsigned mask = 0;
    for (unsigned x : v) mask |= 1u << x;
    ++counts[mask];
  }
  const auto chi = chi_square_test(counts, cell_p);
  return {within("binomial-downsampling[exact mismatches]", 0.0,
                 static_cast<double>(bad), 0.0),
          at_most("binomial-downsampling[chi2]", chi.critical, chi.statistic)};
}

}  // namespace

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> registry = {
      {"latent-exact", latent_exact},
      {"brs-uniformity", brs_uniformity},
      {"btbs-inclusion", btbs_inclusion},
      {"ttbs-inclusion", ttbs_inclusion},
      {"ttbs-mean", ttbs_mean_check},
      {"ttbs-variance", ttbs_variance},
      {"rtbs-exp-inclusion", rtbs_exp_inclusion_check},
      {"rtbs-exp-bounds", rtbs_exp_bounds},
      {"classic-reservoir", classic_reservoir},
      {"rtbs-gen-structure", rtbs_gen_structure},
      {"consolidation-sizing", consolidation_sizing},
      {"exp-through-general", exp_through_general},
      {"bchao-violation", bchao_violation},
      {"partitioned-equivalence", partitioned_equivalence},
      {"size-regimes", size_regimes},
      {"binomial-downsampling", binomial_downsampling},
  };
  return registry;
}

std::vector<CheckResult> run_check(const std::string& name,
                                   const CheckOptions& options) {
  if (options.runs != 0 && options.runs < kMinInclusionRuns) {
    throw TestDesignError("--runs " + std::to_string(options.runs) +
                          " is under-powered; use at least " +
                          std::to_string(kMinInclusionRuns));
  }
  for (const auto& c : check_registry()) {
    if (c.name == name) return c.run(options);
  }
  throw ConfigError("unknown check '" + name + "'");
}

}  // namespace tbs
