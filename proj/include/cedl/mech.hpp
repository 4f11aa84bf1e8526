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

#ifndef CEDL_MECH_HPP_
#define CEDL_MECH_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cedl/logic.hpp"
#include "cedl/stm.hpp"

namespace cedl {

// Private valuations: one table per agent from individual trade vectors
// (goods in ascending order) to values. Unlisted trades fall back to the
// baseline when one is declared, otherwise looking them up is an error.
struct ValuationProfile {
  std::vector<std::map<std::vector<Int>, Int>> tables;
  std::optional<Int> baseline;

  Int value(Agent i, const std::vector<Int>& trade) const;
};

// Monotonicity and range violations as messages; empty means valid. When
// the trade domain I^m is small the whole function (including baseline
// fallbacks) is checked; otherwise listed entries are compared pairwise.
std::vector<std::string> validate_profile(const ValuationProfile& profile,
                                          const AuctionSignature& sig);

// A random profile that is monotone by construction and total over I^m,
// deterministic in the seed. Requires a small trade domain.
ValuationProfile random_monotone_profile(const AuctionSignature& sig,
                                         std::uint64_t seed);

enum class PropertyVerdict { kHolds, kCounterexample, kInconclusive };

struct PropertyReport {
  std::string property;
  PropertyVerdict verdict = PropertyVerdict::kInconclusive;
  // For counterexamples: the offending run. For inconclusive verdicts a
  // diagnostic prefix may point at an unfinished run.
  std::optional<Counterexample> counterexample;
  Agent agent = 0;  // the deviating agent for individual rationality
  CheckStats stats;
  std::string note;

  bool holds() const { return verdict == PropertyVerdict::kHolds; }
};

// Budget balance: add(payment_1, ..., payment_n) = 0 at every stage of
// every path up to the horizon. Holds only when additionally every path
// reached its terminal loop within the horizon (complete coverage);
// otherwise a pass is inconclusive.
PropertyReport check_bb(const StModel& model, std::size_t horizon,
                        std::size_t cap = 1u << 21,
                        std::size_t solver_budget = 1u << 24);

// No-deficit: add(payment_1, ..., payment_n) >= 0, same regime.
PropertyReport check_no_deficit(const StModel& model, std::size_t horizon,
                                std::size_t cap = 1u << 21,
                                std::size_t solver_budget = 1u << 24);

// Individual rationality for one agent: at every reachable stage there is
// a legal deviation (keeping the other agents' actions) whose outcome does
// not lower the agent's utility value(trade_i) - payment_i. The profile
// must be monotone.
PropertyReport check_ir(const StModel& model, Agent i,
                        const ValuationProfile& profile, std::size_t horizon,
                        std::size_t cap = 1u << 21);

// Termination: every path reaches a terminal loop within the horizon.
// Never reports a counterexample; an unfinished run is inconclusive.
PropertyReport check_termination(const StModel& model, std::size_t horizon,
                                 std::size_t cap = 1u << 21);

// Playability: every agent has a legal action at every reachable
// non-terminal state within the horizon.
PropertyReport check_playability(const StModel& model, std::size_t horizon,
                                 std::size_t cap = 1u << 21);

}  // namespace cedl

#endif  // CEDL_MECH_HPP_
