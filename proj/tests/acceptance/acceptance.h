// Copyright 2026 The SPCC Authors. All Rights Reserved.
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


// Gating checks for the codec. Each returns a verdict and a one-line
// detail; acceptance_main prints them.

#ifndef SPCC_TESTS_ACCEPTANCE_ACCEPTANCE_H_
#define SPCC_TESTS_ACCEPTANCE_ACCEPTANCE_H_

#include <filesystem>
#include <string>

namespace spcc::acceptance {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Double precision.
Verdict GradientCorrectness();
Verdict GeometryOracles();
Verdict DetachContract();

// Single precision.
Verdict ShapeAudit();
Verdict EntropyCoding();
Verdict Scalability();
Verdict EndToEnd(const std::filesystem::path& work);
Verdict SweepShape(const std::filesystem::path& work);

}  // namespace spcc::acceptance

#endif  // SPCC_TESTS_ACCEPTANCE_ACCEPTANCE_H_
