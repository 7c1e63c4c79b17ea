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


// Runs the acceptance criteria and prints one PASS/FAIL line each.
//
//   spcc_acceptance [--work DIR] [N ...]
//
// With no numbers every criterion runs. 9 is informational and only runs
// when SPCC_MODELNET40 names an OFF corpus.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <unistd.h>

#include "acceptance.h"

namespace fs = std::filesystem;
using spcc::acceptance::Verdict;

namespace {

Verdict LargeScaleSmoke(const fs::path& work) {
  const char* corpus = std::getenv("SPCC_MODELNET40");
  if (corpus == nullptr) return {true, "not run; set SPCC_MODELNET40 to an OFF corpus"};
  const fs::path out = work / "modelnet40";
  const std::string cmd = std::string(SPCC_BINARY) + " train --preset full --dataset '" + corpus +
                          "' --lambda-t 0.25 --epochs 30 --out '" + out.string() + "'";
  const int code = std::system(cmd.c_str());
  return {true, "full preset run exited " + std::to_string(code) + "; metrics in " +
                    (out / "metrics.jsonl").string()};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else {
      selected.insert(std::stoi(arg));
    }
  }
  if (work.empty()) work = fs::temp_directory_path() / ("spcc_acceptance_" + std::to_string(getpid()));
  fs::create_directories(work);

  const std::function<Verdict()> criteria[] = {
      spcc::acceptance::ShapeAudit,
      spcc::acceptance::GradientCorrectness,
      spcc::acceptance::GeometryOracles,
      spcc::acceptance::EntropyCoding,
      spcc::acceptance::Scalability,
      spcc::acceptance::DetachContract,
      [&] { return spcc::acceptance::EndToEnd(work); },
      [&] { return spcc::acceptance::SweepShape(work); },
  };
  int failed = 0;
  for (int n = 1; n <= 8; ++n) {
    if (!selected.empty() && !selected.count(n)) continue;
    Verdict v;
    try {
      v = criteria[n - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", v.pass ? "PASS" : "FAIL", n, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  if (selected.count(9)) {
    const Verdict v = LargeScaleSmoke(work);
    std::printf("INFO criterion 9: %s\n", v.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
