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

#include "cedl/wd.hpp"

#include <algorithm>
#include <limits>

namespace cedl {

namespace {

using internal::SatPattern;

// Per-agent pattern with its per-good trade lower bound
// lb_j = max(demand_j, -alloc_j, z_min). Any balanced trade >= lb
// componentwise (and <= z_max) extends the pattern to a full solution.
struct AgentPattern {
  const SatPattern* pattern;
  std::vector<Int> lower;
};

struct Search {
  int n;
  int m;
  Int z_max;
  std::size_t budget;
  std::size_t steps = 0;

  // Owns the enumerated patterns; agent_patterns point into it.
  std::vector<std::vector<SatPattern>> patterns_store;
  std::vector<std::vector<AgentPattern>> agent_patterns;
  // Per agent: componentwise minimum of lower over its patterns, and the
  // maximal pattern value; both drive pruning.
  std::vector<std::vector<Int>> min_lower;
  std::vector<Int> max_value;
  // Suffix sums over agents k..n-1.
  std::vector<std::vector<Int>> suffix_min_lower;
  std::vector<Int> suffix_max_value;

  std::vector<const AgentPattern*> chosen;
  std::vector<Int> lower_sum;
  Int value_sum = 0;

  bool have_best = false;
  Int best_value = 0;
  std::vector<Int> best_trade_flat;
  std::vector<const SatPattern*> best_patterns;

  void tick() {
    if (++steps > budget)
      throw BudgetError("winner determination budget exceeded (" +
                        std::to_string(budget) + " steps)");
  }

  // Lexicographically maximal balanced trade extending the chosen
  // patterns: per good, earlier agents take the most the later lower
  // bounds allow.
  std::vector<Int> lex_max_trade() const {
    std::vector<Int> flat(static_cast<std::size_t>(n) *
                          static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      Int partial = 0;
      Int future_lb = lower_sum[static_cast<std::size_t>(j)];
      for (int i = 0; i < n; ++i) {
        Int lb = chosen[static_cast<std::size_t>(i)]
                     ->lower[static_cast<std::size_t>(j)];
        future_lb -= lb;
        Int take = std::min(z_max, -partial - future_lb);
        flat[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
             static_cast<std::size_t>(j)] = take;
        partial += take;
      }
    }
    return flat;
  }

  void at_leaf() {
    for (int j = 0; j < m; ++j)
      if (lower_sum[static_cast<std::size_t>(j)] > 0) return;
    std::vector<Int> flat = lex_max_trade();
    if (!have_best || value_sum > best_value ||
        (value_sum == best_value &&
         std::lexicographical_compare(best_trade_flat.begin(),
                                      best_trade_flat.end(), flat.begin(),
                                      flat.end()))) {
      have_best = true;
      best_value = value_sum;
      best_trade_flat = std::move(flat);
      best_patterns.clear();
      for (const AgentPattern* ap : chosen) best_patterns.push_back(ap->pattern);
    }
  }

  void descend(int k) {
    tick();
    if (k == n) { at_leaf(); return; }
    for (const AgentPattern& ap : agent_patterns[static_cast<std::size_t>(k)]) {
      tick();
      // Objective bound: strictly worse completions cannot contain an
      // optimal trade, ties must survive for the lexicographic reduction.
      if (have_best &&
          value_sum + ap.pattern->value +
                  suffix_max_value[static_cast<std::size_t>(k + 1)] <
              best_value)
        continue;
      bool feasible = true;
      for (int j = 0; j < m; ++j) {
        Int bound = lower_sum[static_cast<std::size_t>(j)] +
                    ap.lower[static_cast<std::size_t>(j)] +
                    suffix_min_lower[static_cast<std::size_t>(k + 1)]
                                    [static_cast<std::size_t>(j)];
        if (bound > 0) { feasible = false; break; }
      }
      if (!feasible) continue;
      chosen.push_back(&ap);
      for (int j = 0; j < m; ++j)
        lower_sum[static_cast<std::size_t>(j)] +=
            ap.lower[static_cast<std::size_t>(j)];
      value_sum += ap.pattern->value;
      descend(k + 1);
      value_sum -= ap.pattern->value;
      for (int j = 0; j < m; ++j)
        lower_sum[static_cast<std::size_t>(j)] -=
            ap.lower[static_cast<std::size_t>(j)];
      chosen.pop_back();
    }
  }
};

}  // namespace

WdSolution solve_wd(const std::vector<BidTree>& bids,
                    const JointAllocation& alloc,
                    const AuctionSignature& sig, std::size_t budget) {
  int n = static_cast<int>(bids.size());
  if (n != sig.agents)
    throw InputError("expected " + std::to_string(sig.agents) + " bids, got " +
                     std::to_string(n));
  if (alloc.agents() != n || alloc.goods() != sig.goods)
    throw InputError("allocation dimensions do not match the signature");
  for (Agent i = 1; i <= n; ++i)
    for (Good j = 1; j <= sig.goods; ++j)
      if (alloc.at(i, j) < 0)
        throw InputError("allocation of agent " + std::to_string(i) +
                         " for good " + std::to_string(j) + " is negative");

  Search s;
  s.n = n;
  s.m = sig.goods;
  s.z_max = sig.range.max_value;
  s.budget = budget;
  s.patterns_store.resize(static_cast<std::size_t>(n));
  s.agent_patterns.resize(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    s.patterns_store[static_cast<std::size_t>(i)] =
        internal::enumerate_patterns(bids[static_cast<std::size_t>(i)],
                                     sig.goods, budget);
    for (const SatPattern& p : s.patterns_store[static_cast<std::size_t>(i)]) {
      AgentPattern ap;
      ap.pattern = &p;
      ap.lower.resize(static_cast<std::size_t>(sig.goods));
      bool usable = true;
      for (Good j = 1; j <= sig.goods; ++j) {
        Int lb = std::max({p.demand[static_cast<std::size_t>(j - 1)],
                           -alloc.at(i + 1, j), sig.range.min_value});
        if (lb > sig.range.max_value) { usable = false; break; }
        ap.lower[static_cast<std::size_t>(j - 1)] = lb;
      }
      if (usable) s.agent_patterns[static_cast<std::size_t>(i)].push_back(ap);
    }
    if (s.agent_patterns[static_cast<std::size_t>(i)].empty())
      throw InputError("agent " + std::to_string(i + 1) +
                       " has no admissible satisfaction pattern");
  }

  // Pruning tables.
  s.min_lower.assign(static_cast<std::size_t>(n),
                     std::vector<Int>(static_cast<std::size_t>(sig.goods), 0));
  s.max_value.assign(static_cast<std::size_t>(n),
                     std::numeric_limits<Int>::min());
  for (int i = 0; i < n; ++i) {
    auto& mins = s.min_lower[static_cast<std::size_t>(i)];
    mins.assign(static_cast<std::size_t>(sig.goods),
                std::numeric_limits<Int>::max());
    for (const AgentPattern& ap : s.agent_patterns[static_cast<std::size_t>(i)]) {
      for (int j = 0; j < sig.goods; ++j)
        mins[static_cast<std::size_t>(j)] =
            std::min(mins[static_cast<std::size_t>(j)],
                     ap.lower[static_cast<std::size_t>(j)]);
      s.max_value[static_cast<std::size_t>(i)] =
          std::max(s.max_value[static_cast<std::size_t>(i)], ap.pattern->value);
    }
  }
  s.suffix_min_lower.assign(
      static_cast<std::size_t>(n + 1),
      std::vector<Int>(static_cast<std::size_t>(sig.goods), 0));
  s.suffix_max_value.assign(static_cast<std::size_t>(n + 1), 0);
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j < sig.goods; ++j)
      s.suffix_min_lower[static_cast<std::size_t>(i)]
                        [static_cast<std::size_t>(j)] =
          s.suffix_min_lower[static_cast<std::size_t>(i + 1)]
                            [static_cast<std::size_t>(j)] +
          s.min_lower[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    s.suffix_max_value[static_cast<std::size_t>(i)] =
        s.suffix_max_value[static_cast<std::size_t>(i + 1)] +
        s.max_value[static_cast<std::size_t>(i)];
  }

  s.lower_sum.assign(static_cast<std::size_t>(sig.goods), 0);
  s.descend(0);
  if (!s.have_best)
    throw InputError("no feasible joint solution exists");

  WdSolution sol;
  sol.trade = JointTrade(n, sig.goods);
  sol.trade.flat() = s.best_trade_flat;
  sol.objective = s.best_value;
  for (const SatPattern* p : s.best_patterns)
    sol.sats.push_back(SatAssignment{p->bits});
  return sol;
}

JointTrade tie_break(const std::vector<JointTrade>& candidates) {
  if (candidates.empty()) throw InputError("tie_break over an empty set");
  const JointTrade* best = &candidates[0];
  for (const JointTrade& c : candidates) {
    if (c.agents() != best->agents() || c.goods() != best->goods())
      throw InputError("tie_break candidates have mixed dimensions");
    if (std::lexicographical_compare(best->flat().begin(), best->flat().end(),
                                     c.flat().begin(), c.flat().end()))
      best = &c;
  }
  return *best;
}

Int vcg_payment(const std::vector<BidTree>& bids,
                const JointAllocation& alloc, Agent i,
                const AuctionSignature& sig, std::size_t budget) {
  WdSolution with = solve_wd(bids, alloc, sig, budget);
  std::vector<BidTree> without_bids = bids;
  without_bids[static_cast<std::size_t>(i - 1)] = noop();
  JointAllocation without_alloc = alloc;
  for (Good j = 1; j <= sig.goods; ++j) without_alloc.at(i, j) = 0;
  WdSolution without = solve_wd(without_bids, without_alloc, sig, budget);

  Int own_value = 0;
  Int discount = 0;
  for (Agent r = 1; r <= sig.agents; ++r) {
    auto value_of = [&](const std::vector<BidTree>& bs, const WdSolution& sol) {
      auto tv = trade_value(bs[static_cast<std::size_t>(r - 1)],
                            sol.trade.row(r), budget);
      if (!tv.has_value())
        throw EvalError("winner determination returned an infeasible trade");
      return tv->value;
    };
    Int v_with = value_of(bids, with);
    Int v_without = value_of(without_bids, without);
    if (r == i) own_value = v_with;
    // The discount sums over every agent; for r == i the counterfactual
    // bid is noop, whose trade value is zero.
    discount += v_with - v_without;
  }
  return own_value - discount;
}

}  // namespace cedl
