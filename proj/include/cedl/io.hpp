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
// JSON file formats: auction instances, scripted bids, valuation profiles
// and run traces.
//
// Instance files:
//   { "protocol": "ce" | "vcg" | "saa",
//     "signature": { "agents": n, "goods": m, "range": [lo, hi],
//                    "good_names": ["a", ...],          // optional
//                    "actions": ["<0,1,0>", ...] },     // tree strings
//     "initial_allocation": [[...], ...],               // ce and vcg
//     "start": s, "inc": d }                            // saa
// The no-op bid is added to the action set when missing; "actions" may be
// omitted entirely for saa instances.
//
// Bids files: stages x agents matrix of tree strings; a flat array is a
// single stage; {"stages": [...]} is also accepted.
//
// Valuations files:
//   { "baseline": b,                                    // optional
//     "agents": [ [ [[q1, ..., qm], value], ... ], ... ] }
//
// Traces are arrays of {stage, state: {props, vars}, joint_action} with
// the final entry carrying no joint_action.

#ifndef CEDL_IO_HPP_
#define CEDL_IO_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cedl/mech.hpp"
#include "cedl/protocols.hpp"
#include "cedl/stm.hpp"

namespace cedl {

struct LoadedInstance {
  std::string protocol;  // "ce", "vcg" or "saa"
  std::optional<CeInstance> exchange;
  std::optional<SaaInstance> ascending;

  const AuctionSignature& signature() const {
    return exchange ? exchange->signature : ascending->signature;
  }
};

// Throws InputError on unreadable files, JSON errors, or shape errors.
LoadedInstance parse_instance(const std::string& text);
LoadedInstance load_instance(const std::string& path);

std::unique_ptr<StModel> build_model(const LoadedInstance& inst,
                                     std::size_t solver_budget = 1u << 24);
std::vector<Rule> build_ruleset(const LoadedInstance& inst,
                                bool full_range = false,
                                std::size_t max_rules = 1u << 17);

std::vector<JointAction> parse_bids(const std::string& text,
                                    const AuctionSignature& sig);
std::vector<JointAction> load_bids(const std::string& path,
                                   const AuctionSignature& sig);

ValuationProfile parse_valuations(const std::string& text);
ValuationProfile load_valuations(const std::string& path);

// Serialization; trees are printed in the surface syntax using the
// signature's good names, so emitted strings parse back.
std::string state_to_json(const StModel& model, const State& w);
std::string trace_to_json(const StModel& model, const Path& p);

}  // namespace cedl

#endif  // CEDL_IO_HPP_
