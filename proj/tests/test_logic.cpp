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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "cedl/logic.hpp"
#include "cedl/protocols.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cedl;

namespace {

CeInstance one_good_instance() {
  CeInstance inst;
  inst.signature.agents = 2;
  inst.signature.goods = 1;
  inst.signature.range = {-5, 5};
  inst.signature.actions = {noop(), BidTree::leaf(1, 1, 2),
                            BidTree::leaf(-1, 1, -1)};
  inst.signature.variables = predefined_variables(2, 1);
  inst.initial_allocation = IntMatrix(2, 1);
  inst.initial_allocation.at(2, 1) = 1;
  return inst;
}

Path traded_path(const StModel& model) {
  Path p;
  p.states.push_back(model.initial_state());
  const JointAction d = {BidTree::leaf(1, 1, 2), BidTree::leaf(-1, 1, -1)};
  p.actions.push_back(d);
  p.states.push_back(step(model, p.states[0], d));
  p.actions.push_back({noop(), noop()});
  p.states.push_back(step(model, p.states[1], {noop(), noop()}));
  return p;
}

}  // namespace

TEST_CASE("term evaluation covers the arithmetic core") {
  const auto model = build_ce(one_good_instance());
  const State w = model->initial_state();
  CHECK(eval_term(*model, w, t_const(7)) == 7);
  CHECK(eval_term(*model, w, t_var("alloc_2_1")) == 1);
  CHECK(eval_term(*model, w, t_add({t_const(2), t_const(3)})) == 5);
  CHECK(eval_term(*model, w, t_sub(t_const(2), t_const(3))) == -1);
  CHECK(eval_term(*model, w, t_min({t_const(2), t_const(-3)})) == -3);
  CHECK(eval_term(*model, w, t_max({t_const(2), t_const(-3)})) == 2);
  CHECK(eval_term(*model, w, t_times({t_const(2), t_const(-3)})) == -6);
  CHECK(eval_term(*model, w,
                  t_add({t_const(1), t_const(2), t_const(3)})) == 6);
  CHECK_THROWS_AS(eval_term(*model, w, t_var("nothing")), EvalError);
}

TEST_CASE("tree terms evaluate through the solvers") {
  const auto model = build_ce(one_good_instance());
  const State w = model->initial_state();
  const BidTree buy = BidTree::leaf(1, 1, 2);
  const BidTree sell = BidTree::leaf(-1, 1, -1);

  CHECK(eval_term(*model, w, t_value(1, buy)) == 2);
  CHECK(eval_term(*model, w, t_qtd(1, buy, 1)) == 1);
  CHECK(eval_term(*model, w, t_qtd(1, buy, 2)) == 0);

  // Trade value at an explicit trade vector.
  CHECK(eval_term(*model, w, t_value_at(1, buy, {t_const(1)})) == 2);
  CHECK(eval_term(*model, w, t_value_at(1, buy, {t_const(0)})) == 0);
  CHECK_THROWS_AS(eval_term(*model, w, t_value_at(1, buy, {t_const(-1)})),
                  EvalError);

  // Winner determination embedded in a term: the unit moves.
  const std::vector<BidTree> bids = {buy, sell};
  const std::vector<Term> alloc = {t_const(0), t_const(1)};
  CHECK(eval_term(*model, w, t_win(1, 1, bids, alloc)) == 1);
  CHECK(eval_term(*model, w, t_win(2, 1, bids, alloc)) == -1);
}

TEST_CASE("formula satisfaction along a worked path") {
  const auto model = build_ce(one_good_instance());
  const Path p = traded_path(*model);

  CHECK(holds(*model, p, 0, f_initial()));
  CHECK_FALSE(holds(*model, p, 1, f_initial()));
  CHECK(holds(*model, p, 1, f_terminal()));
  CHECK(holds(*model, p, 0, f_prop("bidRound")));
  CHECK(holds(*model, p, 0, f_does(1, BidTree::leaf(1, 1, 2))));
  CHECK_FALSE(holds(*model, p, 0, f_does(1, noop())));
  CHECK(holds(*model, p, 0, f_legal(1, noop())));
  CHECK_FALSE(holds(*model, p, 1, f_legal(1, BidTree::leaf(1, 1, 2))));
  CHECK(holds(*model, p, 0,
              f_next(f_eq(t_var("trade_1_1"), t_const(1)))));
  CHECK(holds(*model, p, 0, f_rest(1, Restriction::kBuyer,
                                   BidTree::leaf(1, 1, 2))));
  CHECK(holds(*model, p, 1, f_eq(t_var("payment_1"), t_const(2))));
  CHECK(holds(*model, p, 1, f_cmp(CmpOp::kGt, t_var("payment_1"),
                                  t_var("payment_2"))));
  CHECK(holds(*model, p, 0, f_implies(f_terminal(), f_false())));
  CHECK(holds(*model, p, 1, f_iff(f_terminal(), f_true())));
}

TEST_CASE("the next operator reads the stationary loop") {
  const auto model = build_ce(one_good_instance());
  const Path p = traded_path(*model);
  // Far beyond the recorded suffix the terminal state repeats.
  CHECK(holds(*model, p, 2, f_next(f_terminal())));
  CHECK(holds(*model, p, 1, f_next(f_next(f_next(f_terminal())))));

  Path open;
  open.states.push_back(model->initial_state());
  CHECK_THROWS_AS(holds(*model, open, 0, f_next(f_terminal())), EvalError);
}

TEST_CASE("rewriting to the core connectives preserves truth") {
  const auto model = build_ce(one_good_instance());
  const Path p = traded_path(*model);
  std::mt19937_64 rng(41);
  const AuctionSignature& sig = model->signature();
  for (int k = 0; k < 120; ++k) {
    const Formula f = testing::random_formula(rng, sig, 3);
    const Formula g = elaborate(f);
    for (std::size_t t = 0; t <= 2; ++t) {
      bool a = false, b = false;
      bool ea = false, eb = false;
      try {
        a = holds(*model, p, t, f);
      } catch (const EvalError&) {
        ea = true;
      }
      try {
        b = holds(*model, p, t, g);
      } catch (const EvalError&) {
        eb = true;
      }
      CHECK(ea == eb);
      if (!ea) CHECK(a == b);
    }
  }
}

TEST_CASE("bounded validity scans every reachable stage") {
  const auto model = build_ce(one_good_instance());

  const Verdict tautology = globally_true(
      *model, f_eq(t_var("payment_1"), t_var("payment_1")), 2);
  CHECK(tautology.valid);
  CHECK(tautology.stats.complete_coverage);
  CHECK(tautology.stats.states_explored > 0);
  CHECK(tautology.stats.path_count == 9);

  // Balanced budgets fail exactly when the exchange books a surplus.
  const Verdict balance = globally_true(
      *model, f_eq(t_add({t_var("payment_1"), t_var("payment_2")}),
                   t_const(0)),
      2);
  REQUIRE_FALSE(balance.valid);
  REQUIRE(balance.counterexample.has_value());
  CHECK(balance.counterexample->stage == 1);
  const State& bad = balance.counterexample->prefix.state_at(
      balance.counterexample->stage);
  CHECK(bad.var("payment_1") + bad.var("payment_2") != 0);
  CHECK(validate_path(*model, balance.counterexample->prefix).empty());

  // The invariant that only the pass bid is legal at terminal states.
  const Verdict terminal_noop = globally_true(
      *model, f_implies(f_terminal(), f_legal(1, noop())), 2);
  CHECK(terminal_noop.valid);
}

TEST_CASE("several formulas share one exploration") {
  const auto model = build_ce(one_good_instance());
  const std::vector<Formula> fs = {
      f_true(), f_eq(t_var("alloc_2_1"), t_const(9)),
      f_implies(f_initial(), f_prop("bidRound"))};
  const auto verdicts = check_formulas(*model, fs, 2);
  REQUIRE(verdicts.size() == 3);
  CHECK(verdicts[0].valid);
  CHECK_FALSE(verdicts[1].valid);
  CHECK(verdicts[2].valid);
}

TEST_CASE("path caps abort oversized checks") {
  const auto model = build_ce(one_good_instance());
  CHECK_THROWS_AS(globally_true(*model, f_true(), 2, 2), BudgetError);
}

TEST_CASE("formula text round trip") {
  const char* samples[] = {
      "true",
      "false",
      "initial",
      "terminal",
      "bidRound",
      "not terminal",
      "next terminal",
      "terminal and not bidRound",
      "initial or terminal or bidRound",
      "initial -> not terminal",
      "initial <-> not terminal",
      "payment_1 = add(payment_2, 3)",
      "price < 8",
      "add(trade_1_1, trade_2_1) = 0",
      "sub(max(payment_1, 0), min(payment_2, 0)) > -9",
      "times(2, alloc_1_1) = 2",
      "legal_1(<1,1,2>)",
      "does_2(IC[1,2](<1,1,2>, <-1,1,-1>; 0))",
      "rest_1(buyer, <1,1,2>)",
      "rest_2(unit, <-1,1,-1>)",
      "value_1(<1,1,2>) = 2",
      "value_1(<1,1,2>; 1) = 2",
      "qtd_1(<1,1,2>, 1) = 1",
      "win_1_1(<1,1,2>, <-1,1,-1>; 0, 1) = 1",
      "next (initial and bidRound) -> price = 0 or price > 1",
  };
  for (const char* s : samples) {
    const Formula f = parse_formula(s);
    CHECK(print_formula(f) == s);
    CHECK(parse_formula(print_formula(f)) == f);
  }
}

TEST_CASE("comparison sugar expands to core comparisons") {
  const auto model = build_ce(one_good_instance());
  const Path p = traded_path(*model);
  const Formula ne = parse_formula("payment_1 != payment_2");
  const Formula le = parse_formula("payment_1 <= payment_2");
  const Formula ge = parse_formula("payment_1 >= payment_2");
  CHECK(holds(*model, p, 1, ne));
  CHECK_FALSE(holds(*model, p, 1, le));
  CHECK(holds(*model, p, 1, ge));
  CHECK(holds(*model, p, 0, le));
  CHECK(holds(*model, p, 0, ge));
}

TEST_CASE("random formulas round trip through text") {
  std::mt19937_64 rng(42);
  AuctionSignature sig;
  sig.agents = 2;
  sig.goods = 2;
  sig.range = {-8, 8};
  sig.actions = {noop()};
  sig.propositions = {"bidRound", "sold_1", "sold_2"};
  sig.variables = predefined_variables(2, 2);
  for (int k = 0; k < 200; ++k) {
    const Formula f = testing::random_formula(rng, sig, 3);
    const std::string text = print_formula(f);
    CHECK(parse_formula(text) == f);
  }
  for (int k = 0; k < 100; ++k) {
    const Term z = testing::random_term(rng, sig, 3);
    CHECK(parse_term(print_term(z)) == z);
  }
}

TEST_CASE("good names resolve in formula text") {
  const std::map<std::string, Good> to_good = {{"a", 1}, {"b", 2}};
  const std::map<Good, std::string> to_name = {{1, "a"}, {2, "b"}};
  const Formula f = parse_formula("qtd_1(<1,a,2>, b) = 0", &to_good);
  CHECK(print_formula(f, &to_name) == "qtd_1(<1,a,2>, b) = 0");
  CHECK(print_formula(f) == "qtd_1(<1,1,2>, 2) = 0");
}

TEST_CASE("connective chains keep their reading") {
  const Formula chain = parse_formula("initial and terminal and bidRound");
  const Formula grouped = parse_formula("(initial and terminal) and bidRound");
  const Formula nested = parse_formula("initial and (terminal and bidRound)");
  CHECK(print_formula(chain) == "initial and terminal and bidRound");
  CHECK_FALSE(chain == nested);
  CHECK(parse_formula(print_formula(grouped)) == grouped);
  CHECK(parse_formula(print_formula(nested)) == nested);
}
