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

#include "cedl/core.hpp"

#include <algorithm>

namespace cedl {

std::string payment_var(Agent i) { return "payment_" + std::to_string(i); }

std::string alloc_var(Agent i, Good j) {
  return "alloc_" + std::to_string(i) + "_" + std::to_string(j);
}

std::string trade_var(Agent i, Good j) {
  return "trade_" + std::to_string(i) + "_" + std::to_string(j);
}

std::vector<std::string> predefined_variables(int agents, int goods) {
  std::vector<std::string> vars;
  for (Agent i = 1; i <= agents; ++i) vars.push_back(payment_var(i));
  for (Agent i = 1; i <= agents; ++i)
    for (Good j = 1; j <= goods; ++j) vars.push_back(alloc_var(i, j));
  for (Agent i = 1; i <= agents; ++i)
    for (Good j = 1; j <= goods; ++j) vars.push_back(trade_var(i, j));
  return vars;
}

namespace {

void check_tree_constants(const BidTree& t, const IntRange& range,
                          int goods, std::vector<std::string>& out,
                          const std::string& label) {
  if (t.is_leaf()) {
    const auto& l = t.as_leaf();
    if (!range.contains(l.quantity))
      out.push_back(label + ": leaf quantity " + std::to_string(l.quantity) +
                    " constant out of range");
    if (!range.contains(l.value))
      out.push_back(label + ": leaf value " + std::to_string(l.value) +
                    " constant out of range");
    if (l.good > goods)
      out.push_back(label + ": leaf good " + std::to_string(l.good) +
                    " exceeds good count");
    return;
  }
  const auto& n = t.as_node();
  if (n.min_sat < 0 || n.max_sat > range.max_value)
    out.push_back(label + ": interval bound outside [0, z_max]");
  if (!range.contains(n.value))
    out.push_back(label + ": node value " + std::to_string(n.value) +
                  " constant out of range");
  for (const BidTree& c : n.children)
    check_tree_constants(c, range, goods, out, label);
}

}  // namespace

std::vector<std::string> validate_signature(const AuctionSignature& sig) {
  std::vector<std::string> out;
  if (sig.agents < 1) out.push_back("agent count must be >= 1");
  if (sig.goods < 1) out.push_back("good count must be >= 1");
  if (sig.range.min_value > 0 || sig.range.max_value < 0)
    out.push_back("0 ∉ I: range [" + std::to_string(sig.range.min_value) +
                  ", " + std::to_string(sig.range.max_value) +
                  "] must contain 0");
  if (sig.actions.empty()) out.push_back("action set is empty");
  if (std::find(sig.actions.begin(), sig.actions.end(), noop()) ==
      sig.actions.end())
    out.push_back("action set does not contain the no-op bid <0,1,0>");
  for (std::size_t k = 0; k < sig.actions.size(); ++k)
    check_tree_constants(sig.actions[k], sig.range, sig.goods, out,
                         "action " + std::to_string(k));
  for (const std::string& v : predefined_variables(sig.agents, sig.goods))
    if (std::find(sig.variables.begin(), sig.variables.end(), v) ==
        sig.variables.end())
      out.push_back("predefined variable " + v + " missing");
  return out;
}

bool is_feasible(const JointTrade& trade, const JointAllocation& alloc) {
  if (trade.agents() != alloc.agents() || trade.goods() != alloc.goods())
    throw InputError("trade and allocation dimensions differ");
  for (Agent i = 1; i <= trade.agents(); ++i)
    for (Good j = 1; j <= trade.goods(); ++j)
      if (trade.at(i, j) + alloc.at(i, j) < 0) return false;
  return true;
}

bool is_balanced(const JointTrade& trade) {
  for (Good j = 1; j <= trade.goods(); ++j) {
    Int sum = 0;
    for (Agent i = 1; i <= trade.agents(); ++i) sum += trade.at(i, j);
    if (sum != 0) return false;
  }
  return true;
}

bool trees_equivalent(const BidTree& a, const BidTree& b,
                      const AuctionSignature& sig, std::size_t budget,
                      std::vector<Int>* witness) {
  return trees_equivalent(a, b, sig.range, sig.goods, budget, witness);
}

}  // namespace cedl
