// Copyright 2026 The CEDL Authors.
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
//
// Shared auction framework types: signatures, allocations and trades.

#ifndef CEDL_CORE_HPP_
#define CEDL_CORE_HPP_

#include <map>
#include <string>
#include <vector>

#include "cedl/base.hpp"
#include "cedl/tbbl.hpp"

namespace cedl {

// Holdings of goods per agent; entries are non-negative.
using JointAllocation = IntMatrix;
// Per-agent, per-good net trade; positive means receiving units.
using JointTrade = IntMatrix;

// The static frame of an exchange: who trades, which goods, over which
// integer range, with which abstract bid actions, plus the declared
// state vocabulary (propositions and variables).
struct AuctionSignature {
  int agents = 0;
  int goods = 0;
  IntRange range;
  std::vector<BidTree> actions;
  std::vector<std::string> propositions;
  std::vector<std::string> variables;
  // Optional display names for goods (parse/print sugar only).
  std::map<Good, std::string> good_names;

  bool operator==(const AuctionSignature&) const = default;
};

// Names of the predefined state variables.
std::string payment_var(Agent i);
std::string alloc_var(Agent i, Good j);
std::string trade_var(Agent i, Good j);

// The predefined variables payment_i, alloc_i_j, trade_i_j for the given
// dimensions, in agent-major, good-minor order.
std::vector<std::string> predefined_variables(int agents, int goods);

// Structural well-formedness of a signature; violations are returned as
// messages, an empty vector means valid. Checked: positive dimensions,
// 0 ∈ I, a nonempty action set containing the no-op bid, every numeric
// constant of every action within I (interval bounds within [0, z_max]),
// and presence of the predefined variables.
std::vector<std::string> validate_signature(const AuctionSignature& sig);

// Whether every agent can cover the units it gives away:
// trade[i][j] + alloc[i][j] >= 0 for all i, j.
bool is_feasible(const JointTrade& trade, const JointAllocation& alloc);

// Whether goods neither appear nor vanish: per good, trades sum to 0.
bool is_balanced(const JointTrade& trade);

// Semantic tree equivalence over the signature's range and goods.
bool trees_equivalent(const BidTree& a, const BidTree& b,
                      const AuctionSignature& sig,
                      std::size_t budget = 1u << 20,
                      std::vector<Int>* witness = nullptr);

}  // namespace cedl

#endif  // CEDL_CORE_HPP_
