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


// Acceptance suite: one PASS/FAIL line per criterion. Each criterion runs the
// library's verification checks and, where a check carries a predicted value,
// recomputes that value here from first principles.

#include <gsl/gsl_sf_zeta.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "tbs/checks.hpp"

namespace {

using tbs::CheckResult;
using Results = std::vector<CheckResult>;

// Returns an empty string when the predictions agree, else a reason.
using Oracle = std::function<std::string(const Results&)>;

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> checks;
  Oracle oracle;
};

int tag_value(const std::string& name, const std::string& key) {
  const auto at = name.find("[" + key + "=");
  if (at == std::string::npos) return -1;
  return std::stoi(name.substr(at + key.size() + 2));
}

bool close(double a, double b, double rel = 1e-9) {
  return std::fabs(a - b) <= rel * std::max(1.0, std::fabs(b));
}

std::string expect_predictions(const Results& rs, const std::string& prefix,
                               const std::function<double(const CheckResult&)>& want) {
  std::size_t seen = 0;
  for (const auto& r : rs) {
    if (r.name.rfind(prefix, 0) != 0) continue;
    ++seen;
    const double w = want(r);
    if (!close(r.predicted, w)) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s: predicted %.12g, oracle %.12g",
                    r.name.c_str(), r.predicted, w);
      return buf;
    }
  }
  return seen == 0 ? "no results for " + prefix : "";
}

// sum_{j >= n} 1 / (j + 1)^2.
double quadratic_tail(std::int64_t n) {
  return gsl_sf_hzeta(2.0, static_cast<double>(n) + 1.0);
}

// Total weight of `count` batches of `size` items under exp(-lambda age).
double geometric_weight(double lambda, int count, double size) {
  double w = 0.0;
  for (int a = 0; a < count; ++a) w += size * std::exp(-lambda * a);
  return w;
}

std::vector<Criterion> criteria() {
  const double zeta2 = gsl_sf_zeta_int(2);
  return {
      {1, "latent-sample exactness", {"latent-exact"}, nullptr},
      {2, "batched reservoir uniformity", {"brs-uniformity"}, nullptr},
      {3,
       "bernoulli and targeted-size inclusion",
       {"btbs-inclusion", "ttbs-inclusion"},
       [zeta2](const Results& rs) {
         std::string e = expect_predictions(rs, "btbs-inclusion", [](const CheckResult& r) {
           return std::exp(-0.5 * (10 - tag_value(r.name, "i")));
         });
         if (!e.empty()) return e;
         // q = n gamma / b with gamma = 1 / zeta(2), n = b = 10.
         return expect_predictions(rs, "ttbs-inclusion", [zeta2](const CheckResult& r) {
           const double age = 10 - tag_value(r.name, "i");
           return (1.0 / zeta2) / ((1.0 + age) * (1.0 + age));
         });
       }},
      {4,
       "targeted-size mean",
       {"ttbs-mean"},
       [zeta2](const Results& rs) {
         return expect_predictions(rs, "ttbs-mean", [zeta2](const CheckResult& r) {
           double s = 0.0;
           for (int j = 1; j <= tag_value(r.name, "k"); ++j) s += 1.0 / (j * j);
           return 100.0 * s / zeta2;
         });
       }},
      {5,
       "targeted-size variance limit",
       {"ttbs-variance"},
       [](const Results& rs) {
         const double g = 1.0 - std::exp(-0.1);
         if (tag_value(rs.front().name, "k") != static_cast<int>(std::ceil(10.0 / g))) {
           return std::string("unexpected horizon in ") + rs.front().name;
         }
         const double b = 200.0;
         const double q = 1000.0 * g / b;
         return expect_predictions(rs, "ttbs-variance", [&](const CheckResult&) {
           return b * q / g - b * q * q / (1.0 - std::exp(-0.2));
         });
       }},
      {6,
       "reservoir exponential exactness",
       {"rtbs-exp-inclusion", "rtbs-exp-bounds"},
       [](const Results& rs) {
         const double w = geometric_weight(0.1, 30, 10.0);
         return expect_predictions(rs, "rtbs-exp-inclusion", [w](const CheckResult& r) {
           const double n = r.name.find("[saturated]") != std::string::npos ? 20.0 : 200.0;
           return std::min(1.0, n / w) * std::exp(-0.1 * (30 - tag_value(r.name, "i")));
         });
       }},
      {7, "classic reservoir reduction", {"classic-reservoir"}, nullptr},
      {8, "general reservoir structure", {"rtbs-gen-structure"}, nullptr},
      {9,
       "consolidation sizing",
       {"consolidation-sizing"},
       [](const Results& rs) {
         std::int64_t n = 1;
         while (quadratic_tail(n) > 100.0 / 1e4) ++n;
         const double bound = static_cast<double>(n + 2);
         if (bound < 95.0 || bound > 110.0) return std::string("oracle N+2 out of range");
         if (rs.front().observed != bound) {
           return "library N+2 = " + std::to_string(rs.front().observed) +
                  ", oracle " + std::to_string(bound);
         }
         return std::string();
       }},
      {10, "exponential through general", {"exp-through-general"}, nullptr},
      {11,
       "weighted reservoir contract violation",
       {"bchao-violation"},
       [](const Results& rs) {
         return expect_predictions(rs, "bchao-violation",
                                   [](const CheckResult&) { return std::exp(-2.0); });
       }},
      {12, "partitioned equivalence", {"partitioned-equivalence"}, nullptr},
      {13, "sample-size regimes", {"size-regimes"}, nullptr},
      {14, "binomial downsampling", {"binomial-downsampling"}, nullptr},
  };
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  tbs::CheckOptions options;
  int failed = 0;
  for (const auto& c : criteria()) {
    const auto start = Clock::now();
    Results results;
    std::string problem;
    try {
      for (const auto& name : c.checks) {
        for (auto& r : tbs::run_check(name, options)) results.push_back(std::move(r));
      }
      if (c.oracle) problem = c.oracle(results);
    } catch (const std::exception& e) {
      problem = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    bool pass = problem.empty() && !results.empty();
    for (const auto& r : results) {
      pass = pass && r.pass;
      std::printf("    %-56s predicted=%-12.6g observed=%-12.6g tolerance=%-10.4g %s\n",
                  r.name.c_str(), r.predicted, r.observed, r.tolerance,
                  r.pass ? "ok" : "out of tolerance");
    }
    if (!problem.empty()) std::printf("    oracle: %s\n", problem.c_str());
    std::printf("criterion %2d %-40s %s (%.1f s)\n", c.id, c.title.c_str(),
                pass ? "PASS" : "FAIL", secs);
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::printf("%d of 14 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
