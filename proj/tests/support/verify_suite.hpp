// Copyright 2026 The cclmarl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CCLMARL_TESTS_VERIFY_SUITE_HPP_
#define CCLMARL_TESTS_VERIFY_SUITE_HPP_

#include <functional>
#include <string>
#include <vector>

namespace ccl::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

CheckResult ccl_kernel_oracle(int instances = 500);
CheckResult oem_oracle(int instances = 500);
CheckResult shaping_bounds(int samples = 100000);
CheckResult counterfactual_identity();
CheckResult digamma_exact(unsigned max_n = 10000);
CheckResult gradient_checks();
CheckResult heatmap_accounting();

struct NamedCheck {
  std::string id;
  std::function<CheckResult()> run;
};

// The quick oracle and invariant checks, in a fixed order.
std::vector<NamedCheck> fast_checks();

std::string format_line(const std::string& id, const CheckResult& r);

}  // namespace ccl::verify

#endif  // CCLMARL_TESTS_VERIFY_SUITE_HPP_
