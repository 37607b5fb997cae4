//
// Copyright 2026 The purdest Authors
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
//

#ifndef PURDEST_PURDEST_HPP_
#define PURDEST_PURDEST_HPP_

#include "purdest/dataset.hpp"
#include "purdest/errors.hpp"
#include "purdest/estimator.hpp"
#include "purdest/harness.hpp"
#include "purdest/learner.hpp"
#include "purdest/mechanisms.hpp"
#include "purdest/metrics.hpp"
#include "purdest/random.hpp"
#include "purdest/report_io.hpp"
#include "purdest/tailbounds.hpp"

#endif  // PURDEST_PURDEST_HPP_
