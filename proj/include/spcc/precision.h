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

#ifndef SPCC_PRECISION_H_
#define SPCC_PRECISION_H_

#include <type_traits>

// The numeric core compiles once per precision. Each build sits in its own
// inline namespace so a single binary can link both.
#if defined(SPCC_DOUBLE_PRECISION)
#define SPCC_PRECISION_NS f64
#else
#define SPCC_PRECISION_NS f32
#endif

#define SPCC_NAMESPACE_BEGIN \
  namespace spcc {           \
  inline namespace SPCC_PRECISION_NS {
#define SPCC_NAMESPACE_END \
  }                        \
  }

SPCC_NAMESPACE_BEGIN

#if defined(SPCC_DOUBLE_PRECISION)
using Real = double;
#else
using Real = float;
#endif

inline constexpr bool kDoublePrecision = std::is_same_v<Real, double>;

SPCC_NAMESPACE_END

#endif  // SPCC_PRECISION_H_
