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

#ifndef CEDL_PROTOCOLS_HPP_
#define CEDL_PROTOCOLS_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cedl/core.hpp"
#include "cedl/logic.hpp"
#include "cedl/stm.hpp"
#include "cedl/tbbl.hpp"

namespace cedl {

// One-shot combinatorial exchange: all agents bid once, the winner
// determination problem is solved, trades and payments are applied, and the
// auction terminates.  The initial allocation fixes each agent's endowment.
struct CeInstance {
  AuctionSignature signature;
  IntMatrix initial_allocation;  // agents x goods, entries in [0, max].
};

// Simultaneous ascending auction over single units: a uniform price clock
// rises until every good is either sold or attracts no bids.
struct SaaInstance {
  AuctionSignature signature;  // actions are derived, only noop is required.
  Int start = 0;               // opening price for every good.
  Int increment = 1;           // price step per round.
};

// Throw InputError when an instance is malformed (bad signature, allocation
// shape or range, or a degenerate price clock).
void validate_instance(const CeInstance& instance);
void validate_instance(const SaaInstance& instance);

// State-transition models.  `solver_budget` bounds the work done by each
// embedded winner-determination call.
std::unique_ptr<StModel> build_ce(const CeInstance& instance,
                                  std::size_t solver_budget = 1u << 24);
std::unique_ptr<StModel> build_vcg(const CeInstance& instance,
                                   std::size_t solver_budget = 1u << 24);
std::unique_ptr<StModel> build_saa(const SaaInstance& instance);

// The ascending-auction bid that offers price `prices[j - 1]` for one unit of
// each good j with a nonzero entry: an or-combination of single-unit leaves.
BidTree saa_bid(const std::vector<Int>& prices);

// Inverse of saa_bid: recover the price vector when `tree` has that shape
// for `goods` goods, nullopt otherwise.  The all-zero offer is a distinct
// tree from noop; noop yields nullopt.
std::optional<std::vector<Int>> saa_bid_prices(const BidTree& tree, Good goods);

// State-component names specific to the ascending auction.
std::string saa_price_var(Good j);             // "price_<j>"
std::string saa_sold_prop(Good j);             // "sold_<j>"
std::string saa_bid_prop(Agent i, Good j);     // "bid_<i>_<j>"

// A named rule of a protocol description.  Instantiated rule families share
// one name, so reports group naturally.
struct Rule {
  std::string name;
  Formula formula;
};

// Rule sets describing the protocols.  Rules quantified over integer
// constants are instantiated over value grids derived from the instance
// (reachable prices, feasible payments); `full_range` switches to the whole
// declared range instead.  Throws BudgetError when the instantiation would
// exceed `max_rules`.
std::vector<Rule> ruleset_ce(const CeInstance& instance,
                             bool full_range = false,
                             std::size_t max_rules = 1u << 17);
std::vector<Rule> ruleset_vcg(const CeInstance& instance,
                              bool full_range = false,
                              std::size_t max_rules = 1u << 17);
std::vector<Rule> ruleset_saa(const SaaInstance& instance,
                              bool full_range = false,
                              std::size_t max_rules = 1u << 17);

// Verdict for one rule checked against a model.
struct RuleReport {
  std::string name;
  Verdict verdict;
};

// Check every rule against the model over one shared exploration.  A model
// conforms to the description when every report is valid.
std::vector<RuleReport> check_model_of(const StModel& model,
                                       const std::vector<Rule>& rules,
                                       std::size_t horizon,
                                       std::size_t path_cap = 1u << 21,
                                       std::size_t solver_budget = 1u << 24);

}  // namespace cedl

#endif  // CEDL_PROTOCOLS_HPP_
