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
// Release gate: one pass/fail line per shipped guarantee, nonzero exit when
// any of them is violated. The command-line binary and the fixture files
// are located through CEDL_BIN and CEDL_FIXTURES (with build-time
// fallbacks).

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cedl/io.hpp"
#include "cedl/logic.hpp"
#include "cedl/mech.hpp"
#include "cedl/protocols.hpp"
#include "cedl/stm.hpp"
#include "cedl/tbbl.hpp"
#include "cedl/wd.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace cedl;
using cedl::testing::brute_solve_wd;
using cedl::testing::brute_trade_value;
using cedl::testing::BruteWd;
using cedl::testing::random_formula;
using cedl::testing::random_term;
using cedl::testing::random_tree;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n << ": "
            << what << std::endl;
  if (!ok) ++failures;
}

std::string location(const char* env, const char* fallback) {
  const char* v = std::getenv(env);
  return v && *v ? v : fallback;
}

std::string binary() { return location("CEDL_BIN", CEDL_BIN_PATH); }
std::string fixture(const std::string& name) {
  return location("CEDL_FIXTURES", CEDL_FIXTURES_PATH) + ("/" + name);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// 1. A scripted run of the worked two-good exchange settles the unique
//    tie-broken trade and the matching allocations, quickly.
bool settled_exchange_run(std::string& detail) {
  const std::string trace =
      (std::filesystem::temp_directory_path() /
       ("cedl_acceptance_" + std::to_string(::getpid()) + ".json"))
          .string();
  const std::string command = "'" + binary() + "' run --instance '" +
                              fixture("two-good-exchange.json") + "' --bids '" +
                              fixture("two-good-exchange-bids.json") + "' --out '" + trace +
                              "' > /dev/null 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(command.c_str());
  const double elapsed = seconds_since(t0);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    detail = "run exited with status " + std::to_string(status);
    return false;
  }
  const auto js = nlohmann::json::parse(slurp(trace));
  std::filesystem::remove(trace);
  const auto& vars = js.back().at("state").at("vars");
  const bool trade_ok = vars.at("trade_1_1").get<Int>() == 2 &&
                        vars.at("trade_1_2").get<Int>() == -1 &&
                        vars.at("trade_2_1").get<Int>() == -2 &&
                        vars.at("trade_2_2").get<Int>() == 1;
  const bool alloc_ok = vars.at("alloc_1_1").get<Int>() == 2 &&
                        vars.at("alloc_1_2").get<Int>() == 0 &&
                        vars.at("alloc_2_1").get<Int>() == 0 &&
                        vars.at("alloc_2_2").get<Int>() == 1;
  detail = "elapsed " + std::to_string(elapsed) + " s";
  return trade_ok && alloc_ok && elapsed < 1.0;
}

// 2. The incentive-payment variant books payments (1, -2) summing to -1,
//    refuting both budget balance and no-deficit with explicit witnesses.
bool deficit_counterexamples(std::string& detail) {
  const auto inst = load_instance(fixture("surplus-vcg.json"));
  const auto model = build_model(inst);
  const std::size_t horizon = model->default_horizon();
  bool ok = true;
  for (const PropertyReport& r :
       {check_bb(*model, horizon), check_no_deficit(*model, horizon)}) {
    if (r.verdict != PropertyVerdict::kCounterexample ||
        !r.counterexample.has_value()) {
      detail = r.property + " produced no counterexample";
      return false;
    }
    const State& w = r.counterexample->prefix.state_at(r.counterexample->stage);
    const Int p1 = w.var(payment_var(1));
    const Int p2 = w.var(payment_var(2));
    if (p1 != 1 || p2 != -2 || p1 + p2 != -1) {
      detail = r.property + " witness payments (" + std::to_string(p1) +
               ", " + std::to_string(p2) + ")";
      ok = false;
    }
  }
  return ok;
}

// 3. Both protocol descriptions are fully valid on their toy instances,
//    with every path explored to its terminal loop, inside the time box.
bool protocol_conformance(std::string& detail) {
  const auto ce_inst = load_instance(fixture("toy-ce.json"));
  const auto sa_inst = load_instance(fixture("two-good-clock.json"));
  struct Case {
    const char* label;
    std::unique_ptr<StModel> model;
    std::vector<Rule> rules;
  };
  Case cases[2] = {
      {"exchange", build_ce(*ce_inst.exchange), ruleset_ce(*ce_inst.exchange)},
      {"clock", build_saa(*sa_inst.ascending), ruleset_saa(*sa_inst.ascending)}};
  for (Case& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports =
        check_model_of(*c.model, c.rules, c.model->default_horizon());
    const double elapsed = seconds_since(t0);
    for (const RuleReport& r : reports) {
      if (!r.verdict.valid || !r.verdict.stats.complete_coverage) {
        detail = std::string(c.label) + " rule " + r.name + " not fully valid";
        return false;
      }
    }
    if (elapsed >= 60.0) {
      detail = std::string(c.label) + " took " + std::to_string(elapsed) + " s";
      return false;
    }
    detail += std::string(detail.empty() ? "" : ", ") + c.label + " " +
              std::to_string(reports.size()) + " rules in " +
              std::to_string(elapsed) + " s";
  }
  return true;
}

// 4. On the surplus toy the exchange never runs a deficit yet fails budget
//    balance with a witness; the clock toy never runs a deficit either.
bool balance_laws(std::string& detail) {
  const auto ce = build_model(load_instance(fixture("toy-ce.json")));
  const PropertyReport nd = check_no_deficit(*ce, ce->default_horizon());
  if (nd.verdict != PropertyVerdict::kHolds ||
      !nd.stats.complete_coverage) {
    detail = "exchange no-deficit did not hold exhaustively";
    return false;
  }
  const PropertyReport bb = check_bb(*ce, ce->default_horizon());
  if (bb.verdict != PropertyVerdict::kCounterexample ||
      !bb.counterexample.has_value()) {
    detail = "exchange budget balance was not refuted";
    return false;
  }
  const State& w =
      bb.counterexample->prefix.state_at(bb.counterexample->stage);
  if (w.var(payment_var(1)) + w.var(payment_var(2)) <= 0) {
    detail = "budget-balance witness has no positive surplus";
    return false;
  }
  const auto sa = build_model(load_instance(fixture("two-good-clock.json")));
  const PropertyReport sand = check_no_deficit(*sa, sa->default_horizon());
  if (sand.verdict != PropertyVerdict::kHolds ||
      !sand.stats.complete_coverage) {
    detail = "clock no-deficit did not hold exhaustively";
    return false;
  }
  return true;
}

// 5. The exact solver agrees with brute-force enumeration on objective and
//    tie-broken trade for 200 seeded instances.
bool solver_matches_oracle(std::string& detail) {
  std::mt19937_64 rng(501);
  const auto pick = [&rng](Int lo, Int hi) {
    return std::uniform_int_distribution<Int>(lo, hi)(rng);
  };
  for (int k = 0; k < 200; ++k) {
    AuctionSignature sig;
    sig.agents = static_cast<Agent>(pick(1, 3));
    sig.goods = static_cast<Good>(pick(1, 2));
    sig.range = {pick(-3, -1), pick(1, 3)};
    sig.actions = {noop()};
    sig.variables = predefined_variables(sig.agents, sig.goods);
    JointAction bids;
    for (Agent i = 1; i <= sig.agents; ++i)
      bids.push_back(random_tree(rng, sig.goods, 7, -2, 2,
                                 sig.range.min_value, sig.range.max_value));
    IntMatrix alloc(sig.agents, sig.goods);
    for (Agent i = 1; i <= sig.agents; ++i)
      for (Good j = 1; j <= sig.goods; ++j) alloc.at(i, j) = pick(0, 2);
    const WdSolution sol = solve_wd(bids, alloc, sig);
    const BruteWd brute = brute_solve_wd(bids, alloc, sig);
    bool same = sol.objective == brute.objective;
    for (Agent i = 1; same && i <= sig.agents; ++i)
      for (Good j = 1; same && j <= sig.goods; ++j)
        same = sol.trade.at(i, j) == brute.trade.at(i, j);
    if (!same) {
      detail = "divergence at seeded instance " + std::to_string(k);
      return false;
    }
  }
  detail = "200 instances";
  return true;
}

// 6. Tree evaluation agrees with exhaustive enumeration over satisfaction
//    assignments for 500 seeded pairs, infeasible trades included.
bool evaluation_matches_oracle(std::string& detail) {
  std::mt19937_64 rng(601);
  const auto pick = [&rng](Int lo, Int hi) {
    return std::uniform_int_distribution<Int>(lo, hi)(rng);
  };
  int infeasible = 0;
  for (int k = 0; k < 500; ++k) {
    const int goods = static_cast<int>(pick(1, 2));
    const BidTree t = random_tree(rng, goods, 12, -3, 3, -5, 5);
    std::vector<Int> trade;
    for (int j = 0; j < goods; ++j) trade.push_back(pick(-4, 4));
    const auto got = trade_value(t, trade);
    const auto want = brute_trade_value(t, trade);
    if (got.has_value() != want.has_value() ||
        (got && got->value != *want)) {
      detail = "divergence at seeded pair " + std::to_string(k);
      return false;
    }
    if (!want) ++infeasible;
  }
  detail = "500 pairs, " + std::to_string(infeasible) + " infeasible";
  return infeasible > 0;
}

// 7. Every agent always has a harmless action under 10 seeded monotone
//    valuation profiles on both toy models.
bool rationality_holds(std::string& detail) {
  const auto ce = build_model(load_instance(fixture("toy-ce.json")));
  const auto sa = build_model(load_instance(fixture("two-good-clock.json")));
  for (const StModel* m : {ce.get(), sa.get()}) {
    for (Agent i = 1; i <= m->agents(); ++i) {
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto profile = random_monotone_profile(m->signature(), seed);
        const PropertyReport r =
            check_ir(*m, i, profile, m->default_horizon());
        if (r.verdict != PropertyVerdict::kHolds) {
          detail = m->name() + " agent " + std::to_string(i) + " seed " +
                   std::to_string(seed) + ": " +
                   (r.verdict == PropertyVerdict::kCounterexample
                        ? "counterexample"
                        : "inconclusive");
          return false;
        }
      }
    }
  }
  detail = "2 models x 2 agents x 10 profiles";
  return true;
}

// 8. Clock-auction structure: at most one winner per good everywhere, all
//    legal bids are single-unit buyer bids, the model stays playable and
//    terminating, and the scripted two-round sale ends at payments (2, 3).
bool clock_structure(std::string& detail) {
  const auto inst = load_instance(fixture("two-good-clock.json"));
  const auto model = build_model(inst);
  const std::size_t horizon = model->default_horizon();
  const ModelGraph graph(*model, horizon);
  const int goods = model->goods();

  for (std::size_t id = 0; id < graph.state_count(); ++id) {
    const State& w = graph.state(static_cast<int>(id));
    for (Good j = 1; j <= goods; ++j) {
      int winners = 0;
      for (Agent i = 1; i <= model->agents(); ++i) {
        const Int z = w.var(trade_var(i, j));
        if (z != 0 && z != 1) {
          detail = "trade entry outside {0,1}";
          return false;
        }
        winners += static_cast<int>(z);
      }
      if (winners > 1) {
        detail = "good " + std::to_string(j) + " sold twice";
        return false;
      }
    }
    if (graph.terminal(static_cast<int>(id))) continue;
    for (Agent i = 1; i <= model->agents(); ++i) {
      for (const BidTree& t : graph.legal(static_cast<int>(id))
                                  [static_cast<std::size_t>(i - 1)]) {
        if (!check_restriction(i, t, Restriction::kBuyer, goods) ||
            !check_restriction(i, t, Restriction::kUnit, goods)) {
          detail = "a legal bid violates the buyer or unit restriction";
          return false;
        }
      }
    }
  }
  if (!graph.all_paths_terminate()) {
    detail = "a path survives the horizon";
    return false;
  }
  if (check_playability(*model, horizon).verdict != PropertyVerdict::kHolds ||
      check_termination(*model, horizon).verdict != PropertyVerdict::kHolds) {
    detail = "playability or termination did not hold";
    return false;
  }

  const auto stages =
      load_bids(fixture("two-good-clock-bids.json"), model->signature());
  State w = model->initial_state();
  for (const JointAction& d : stages) w = step(*model, w, d);
  if (!model->is_terminal(w) || w.var(payment_var(1)) != 2 ||
      w.var(payment_var(2)) != 3) {
    detail = "scripted sale did not end at payments (2, 3)";
    return false;
  }
  detail = std::to_string(graph.state_count()) + " reachable states";
  return true;
}

// 9. Printing then parsing is the identity on 500 random trees and 200
//    random formulas.
bool round_trips(std::string& detail) {
  std::mt19937_64 rng(901);
  for (int k = 0; k < 500; ++k) {
    const BidTree t = random_tree(rng, 3, 9, -3, 3, -6, 6);
    if (!(parse_bid_tree(print_bid_tree(t)) == t)) {
      detail = "tree " + std::to_string(k) + ": " + print_bid_tree(t);
      return false;
    }
  }
  AuctionSignature sig;
  sig.agents = 2;
  sig.goods = 2;
  sig.range = {-5, 5};
  sig.actions = {noop()};
  sig.propositions = {"bidRound", "sold_1"};
  sig.variables = predefined_variables(2, 2);
  for (int k = 0; k < 200; ++k) {
    const Formula f = random_formula(rng, sig, 3);
    if (!(parse_formula(print_formula(f)) == f)) {
      detail = "formula " + std::to_string(k) + ": " + print_formula(f);
      return false;
    }
  }
  detail = "500 trees, 200 formulas";
  return true;
}

template <typename Fn>
void criterion(int n, const std::string& what, Fn&& fn) {
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(n, ok, what + (detail.empty() ? "" : " (" + detail + ")"));
}

}  // namespace

int main() {
  criterion(1, "scripted exchange run settles trade (2,-1,-2,1) in under 1 s",
            settled_exchange_run);
  criterion(2, "incentive payments (1,-2) refute budget balance & no-deficit",
            deficit_counterexamples);
  criterion(3, "protocol descriptions verify exhaustively in under 60 s",
            protocol_conformance);
  criterion(4, "no-deficit holds, budget balance fails with witness",
            balance_laws);
  criterion(5, "winner determination matches brute force",
            solver_matches_oracle);
  criterion(6, "tree evaluation matches exhaustive enumeration",
            evaluation_matches_oracle);
  criterion(7, "individual rationality holds on seeded monotone profiles",
            rationality_holds);
  criterion(8, "clock auction structure and scripted sale check out",
            clock_structure);
  criterion(9, "printer and parser round-trip trees and formulas",
            round_trips);
  if (failures == 0) {
    std::cout << "all criteria passed" << std::endl;
    return 0;
  }
  std::cout << failures << " criterion(s) failed" << std::endl;
  return 1;
}
