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

#include "cedl/mech.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cedl/core.hpp"

namespace cedl {
namespace {

// Walks every trade vector of I^m in odometer order; returns false without
// visiting anything when the domain exceeds the cap.
template <typename Visit>
bool for_each_trade(const IntRange& r, int goods, Visit visit,
                    std::size_t cap = 1u << 18) {
  double domain = 1.0;
  for (int j = 0; j < goods; ++j) domain *= static_cast<double>(r.size());
  if (domain > static_cast<double>(cap)) return false;
  std::vector<Int> trade(static_cast<std::size_t>(goods), r.min_value);
  for (;;) {
    visit(trade);
    int k = goods - 1;
    while (k >= 0 && trade[static_cast<std::size_t>(k)] == r.max_value)
      trade[static_cast<std::size_t>(k--)] = r.min_value;
    if (k < 0) return true;
    ++trade[static_cast<std::size_t>(k)];
  }
}

bool leq_componentwise(const std::vector<Int>& a, const std::vector<Int>& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > b[k]) return false;
  return true;
}

Term payment_sum(int agents) {
  std::vector<Term> parts;
  for (Agent i = 1; i <= agents; ++i) parts.push_back(t_var(payment_var(i)));
  return parts.size() == 1 ? parts[0] : t_add(parts);
}

PropertyReport from_verdict(std::string property, Verdict v) {
  PropertyReport report;
  report.property = std::move(property);
  report.stats = v.stats;
  if (!v.valid) {
    report.verdict = PropertyVerdict::kCounterexample;
    report.counterexample = std::move(v.counterexample);
  } else if (v.stats.complete_coverage) {
    report.verdict = PropertyVerdict::kHolds;
  } else {
    report.verdict = PropertyVerdict::kInconclusive;
    report.note = "inconclusive: a run is still live at the horizon";
  }
  return report;
}

// Reads agent i's trade row from the state.
std::vector<Int> trade_row(const State& w, Agent i, int goods) {
  std::vector<Int> row(static_cast<std::size_t>(goods));
  for (Good j = 1; j <= goods; ++j)
    row[static_cast<std::size_t>(j - 1)] = w.var(trade_var(i, j));
  return row;
}

// Diagnostic prefix for an inconclusive bounded check: a run that is still
// live at the horizon, or one that is stuck with no continuation.
std::optional<Counterexample> live_run(const ModelGraph& graph,
                                       std::size_t horizon) {
  for (int id = 0; id < static_cast<int>(graph.state_count()); ++id) {
    if (graph.terminal(id)) continue;
    const bool at_frontier = graph.min_stage(id) == horizon;
    const bool stuck = graph.transitions(id).empty() &&
                       graph.min_stage(id) <= horizon;
    if (!at_frontier && !stuck) continue;
    Counterexample c;
    c.prefix = graph.least_prefix(id);
    c.stage = graph.min_stage(id);
    c.formula = stuck ? "the run cannot continue" : "the run has not ended";
    return c;
  }
  return std::nullopt;
}

}  // namespace

Int ValuationProfile::value(Agent i, const std::vector<Int>& trade) const {
  if (i < 1 || static_cast<std::size_t>(i) > tables.size())
    throw InputError("no valuation table for agent " + std::to_string(i));
  const auto& table = tables[static_cast<std::size_t>(i - 1)];
  const auto it = table.find(trade);
  if (it != table.end()) return it->second;
  if (baseline) return *baseline;
  std::string shown;
  for (Int v : trade) shown += (shown.empty() ? "" : ",") + std::to_string(v);
  throw EvalError("valuation of agent " + std::to_string(i) +
                  " is undefined at trade (" + shown + ")");
}

std::vector<std::string> validate_profile(const ValuationProfile& profile,
                                          const AuctionSignature& sig) {
  std::vector<std::string> out;
  if (profile.tables.size() != static_cast<std::size_t>(sig.agents)) {
    out.push_back("profile lists " + std::to_string(profile.tables.size()) +
                  " agents, expected " + std::to_string(sig.agents));
    return out;
  }
  for (Agent i = 1; i <= sig.agents; ++i) {
    const auto& table = profile.tables[static_cast<std::size_t>(i - 1)];
    for (const auto& [trade, v] : table) {
      if (trade.size() != static_cast<std::size_t>(sig.goods))
        out.push_back("agent " + std::to_string(i) +
                      " lists a trade over " + std::to_string(trade.size()) +
                      " goods, expected " + std::to_string(sig.goods));
      else if (!sig.range.contains(v))
        out.push_back("agent " + std::to_string(i) + " values a trade at " +
                      std::to_string(v) + ", outside the range");
      for (Int q : trade)
        if (!sig.range.contains(q))
          out.push_back("agent " + std::to_string(i) +
                        " lists a trade entry outside the range");
    }
    if (!out.empty()) continue;
    if (profile.baseline && !sig.range.contains(*profile.baseline))
      out.push_back("baseline " + std::to_string(*profile.baseline) +
                    " is outside the range");
    // Monotonicity: exact over the whole domain when it is small, else
    // pairwise over the listed entries.
    const Agent agent = i;
    const bool exact = for_each_trade(
        sig.range, sig.goods, [&](const std::vector<Int>& trade) {
          try {
            const Int here = profile.value(agent, trade);
            for (Good j = 1; j <= sig.goods; ++j) {
              if (trade[static_cast<std::size_t>(j - 1)] ==
                  sig.range.max_value)
                continue;
              std::vector<Int> up = trade;
              ++up[static_cast<std::size_t>(j - 1)];
              if (profile.value(agent, up) < here) {
                out.push_back("agent " + std::to_string(agent) +
                              " is not monotone at good " +
                              std::to_string(j));
                return;
              }
            }
          } catch (const EvalError&) {
            out.push_back("agent " + std::to_string(agent) +
                          " has no value (and no baseline) for some trade");
          }
        });
    if (!exact) {
      for (auto a = table.begin(); a != table.end(); ++a)
        for (auto b = std::next(a); b != table.end(); ++b) {
          if (leq_componentwise(a->first, b->first) && a->second > b->second)
            out.push_back("agent " + std::to_string(i) +
                          " is not monotone over the listed trades");
          if (leq_componentwise(b->first, a->first) && b->second > a->second)
            out.push_back("agent " + std::to_string(i) +
                          " is not monotone over the listed trades");
        }
    }
    // One message per agent is enough.
    if (!out.empty()) return out;
  }
  return out;
}

ValuationProfile random_monotone_profile(const AuctionSignature& sig,
                                         std::uint64_t seed) {
  ValuationProfile profile;
  profile.tables.resize(static_cast<std::size_t>(sig.agents));
  std::mt19937_64 gen(seed);
  for (Agent i = 1; i <= sig.agents; ++i) {
    auto& table = profile.tables[static_cast<std::size_t>(i - 1)];
    // Sweep the domain in odometer order and set each value to the maximum
    // over the immediate predecessors plus a small random step, clipped to
    // the range. Any such function is monotone.
    const bool ok = for_each_trade(
        sig.range, sig.goods, [&](const std::vector<Int>& trade) {
          Int floor = sig.range.min_value;
          for (Good j = 1; j <= sig.goods; ++j) {
            if (trade[static_cast<std::size_t>(j - 1)] == sig.range.min_value)
              continue;
            std::vector<Int> down = trade;
            --down[static_cast<std::size_t>(j - 1)];
            floor = std::max(floor, table.at(down));
          }
          const Int step = static_cast<Int>(gen() % 3);
          table[trade] = std::min(sig.range.max_value,
                                  checked_add(floor, step));
        });
    if (!ok)
      throw InputError(
          "the trade domain is too large for a generated profile");
  }
  return profile;
}

PropertyReport check_bb(const StModel& model, std::size_t horizon,
                        std::size_t cap, std::size_t solver_budget) {
  const Formula f = f_eq(payment_sum(model.agents()), t_const(0));
  return from_verdict("bb",
                      globally_true(model, f, horizon, cap, solver_budget));
}

PropertyReport check_no_deficit(const StModel& model, std::size_t horizon,
                                std::size_t cap, std::size_t solver_budget) {
  const Term sum = payment_sum(model.agents());
  const Formula f = f_or({f_cmp(CmpOp::kGt, sum, t_const(0)),
                          f_eq(sum, t_const(0))});
  return from_verdict("no-deficit",
                      globally_true(model, f, horizon, cap, solver_budget));
}

PropertyReport check_ir(const StModel& model, Agent i,
                        const ValuationProfile& profile, std::size_t horizon,
                        std::size_t cap) {
  if (i < 1 || i > model.agents())
    throw InputError("agent " + std::to_string(i) + " out of range");
  {
    const auto errors = validate_profile(profile, model.signature());
    if (!errors.empty()) throw InputError("invalid profile: " + errors[0]);
  }
  PropertyReport report;
  report.property = "ir";
  report.agent = i;
  const int goods = model.goods();
  ModelGraph graph(model, horizon);
  report.stats.states_explored = graph.state_count();
  report.stats.path_count = graph.path_count(cap);
  report.stats.complete_coverage = graph.all_paths_terminate();
  const auto utility = [&](const State& w) {
    return checked_sub(profile.value(i, trade_row(w, i, goods)),
                       w.var(payment_var(i)));
  };
  const auto succ_state = [&](int successor) -> const State& {
    return graph.state(successor < 0 ? graph.initial_id() : successor);
  };
  for (int id = 0; id < static_cast<int>(graph.state_count()); ++id) {
    if (graph.min_stage(id) + 1 > horizon) continue;
    const Int now = utility(graph.state(id));
    const auto& transitions = graph.transitions(id);
    for (const auto& tr : transitions) {
      // A deviation keeps every other agent's choice at this stage.
      bool safe = false;
      for (const auto& dev : transitions) {
        bool same_others = true;
        for (std::size_t r = 0; r < dev.action_index.size(); ++r)
          if (r != static_cast<std::size_t>(i - 1) &&
              dev.action_index[r] != tr.action_index[r])
            same_others = false;
        if (!same_others) continue;
        ++report.stats.evaluations;
        if (utility(succ_state(dev.successor)) >= now) {
          safe = true;
          break;
        }
      }
      if (!safe) {
        report.verdict = PropertyVerdict::kCounterexample;
        Counterexample c;
        c.prefix = graph.least_prefix(id);
        c.prefix.actions.push_back(graph.joint_action(id, tr.action_index));
        c.prefix.states.push_back(succ_state(tr.successor));
        c.stage = graph.min_stage(id);
        c.formula = "every legal action of agent " + std::to_string(i) +
                    " lowers its utility";
        report.counterexample = std::move(c);
        return report;
      }
    }
  }
  if (report.stats.complete_coverage) {
    report.verdict = PropertyVerdict::kHolds;
  } else {
    report.verdict = PropertyVerdict::kInconclusive;
    report.note = "inconclusive: a run is still live at the horizon";
    report.counterexample = live_run(graph, horizon);
  }
  return report;
}

PropertyReport check_termination(const StModel& model, std::size_t horizon,
                                 std::size_t cap) {
  PropertyReport report;
  report.property = "termination";
  ModelGraph graph(model, horizon);
  report.stats.states_explored = graph.state_count();
  report.stats.path_count = graph.path_count(cap);
  report.stats.complete_coverage = graph.all_paths_terminate();
  if (report.stats.complete_coverage) {
    report.verdict = PropertyVerdict::kHolds;
  } else {
    report.verdict = PropertyVerdict::kInconclusive;
    report.note = "inconclusive: horizon too small";
    report.counterexample = live_run(graph, horizon);
  }
  return report;
}

PropertyReport check_playability(const StModel& model, std::size_t horizon,
                                 std::size_t cap) {
  PropertyReport report;
  report.property = "playability";
  ModelGraph graph(model, horizon);
  report.stats.states_explored = graph.state_count();
  report.stats.path_count = graph.path_count(cap);
  report.stats.complete_coverage = graph.all_paths_terminate();
  for (int id = 0; id < static_cast<int>(graph.state_count()); ++id) {
    if (graph.min_stage(id) > horizon) continue;
    if (graph.terminal(id)) continue;
    const auto& legal = graph.legal(id);
    for (Agent i = 1; i <= model.agents(); ++i) {
      ++report.stats.evaluations;
      if (!legal[static_cast<std::size_t>(i - 1)].empty()) continue;
      report.verdict = PropertyVerdict::kCounterexample;
      report.agent = i;
      Counterexample c;
      c.prefix = graph.least_prefix(id);
      c.stage = graph.min_stage(id);
      c.formula = "agent " + std::to_string(i) + " has no legal action";
      report.counterexample = std::move(c);
      return report;
    }
  }
  if (report.stats.complete_coverage) {
    report.verdict = PropertyVerdict::kHolds;
  } else {
    report.verdict = PropertyVerdict::kInconclusive;
    report.note = "inconclusive: a run is still live at the horizon";
    report.counterexample = live_run(graph, horizon);
  }
  return report;
}

}  // namespace cedl
