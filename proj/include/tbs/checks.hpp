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

// The verification suite behind `tbs verify`. Each check runs a fixed
// scenario and reports one or more (predicted, observed, tolerance) lines.

#ifndef TBS_CHECKS_HPP_
#define TBS_CHECKS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tbs {

struct CheckResult {
  std::string name;
  double predicted = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CheckOptions {
  std::size_t runs = 0;  // 0 keeps each check's default replica count
  std::uint64_t seed = 1;
};

struct CheckInfo {
  std::string name;
  std::function<std::vector<CheckResult>(const CheckOptions&)> run;
};

const std::vector<CheckInfo>& check_registry();

// Throws ConfigError for an unknown name and TestDesignError when the
// requested replica count is too small.
std::vector<CheckResult> run_check(const std::string& name,
                                   const CheckOptions& options);

}  // namespace tbs

#endif  // TBS_CHECKS_HPP_
