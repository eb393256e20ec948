// Copyright 2026 The Dualchain Authors
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

#ifndef DUALCHAIN_DUALCHAIN_HPP_
#define DUALCHAIN_DUALCHAIN_HPP_

#include "dualchain/chainsim.hpp"
#include "dualchain/core.hpp"
#include "dualchain/dynamics.hpp"
#include "dualchain/equilibrium.hpp"
#include "dualchain/error.hpp"
#include "dualchain/ingest.hpp"
#include "dualchain/payoff.hpp"

#endif  // DUALCHAIN_DUALCHAIN_HPP_
