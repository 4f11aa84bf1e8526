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
#include <memory>

#include "cedl/protocols.hpp"
#include "cedl/stm.hpp"
#include "doctest.h"

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

SaaInstance clock_instance() {
  SaaInstance inst;
  inst.signature.agents = 2;
  inst.signature.goods = 2;
  inst.signature.range = {-8, 8};
  inst.signature.actions = {noop()};
  inst.signature.variables = predefined_variables(2, 2);
  inst.start = 2;
  inst.increment = 1;
  return inst;
}

}  // namespace

TEST_CASE("states are valuations with structural equality") {
  State w;
  w.set_prop("open", true);
  w.set_var("price", 3);
  CHECK(w.prop("open"));
  CHECK_FALSE(w.prop("closed"));
  CHECK(w.var("price") == 3);
  CHECK_THROWS_AS(w.var("missing"), EvalError);

  State u = w;
  CHECK(u == w);
  u.set_var("price", 4);
  CHECK_FALSE(u == w);
  u.set_var("price", 3);
  CHECK(u == w);
  CHECK(StateHash{}(u) == StateHash{}(w));

  w.set_prop("open", false);
  CHECK_FALSE(w.prop("open"));
}

TEST_CASE("stepping validates legality") {
  const auto model = build_ce(one_good_instance());
  const State w0 = model->initial_state();
  CHECK_FALSE(model->is_terminal(w0));

  const auto acts = model->legal_actions(w0, 1);
  CHECK(acts.size() == 3);
  CHECK(model->is_legal(w0, 1, noop()));

  const State w1 = step(*model, w0, {BidTree::leaf(1, 1, 2),
                                     BidTree::leaf(-1, 1, -1)});
  CHECK(model->is_terminal(w1));
  CHECK(w1.var("trade_1_1") == 1);
  CHECK(w1.var("alloc_1_1") == 1);
  CHECK(w1.var("alloc_2_1") == 0);

  // Terminal states admit only the pass bid and loop.
  CHECK(model->legal_actions(w1, 1) == std::vector<BidTree>{noop()});
  CHECK_THROWS_AS(step(*model, w1, {BidTree::leaf(1, 1, 2), noop()}),
                  IllegalActionError);
  CHECK(step(*model, w1, {noop(), noop()}) == w1);
}

TEST_CASE("paths index stationary suffixes") {
  const auto model = build_ce(one_good_instance());
  Path p;
  p.states.push_back(model->initial_state());
  const JointAction d = {noop(), noop()};
  p.actions.push_back(d);
  p.states.push_back(step(*model, p.states[0], d));
  p.actions.push_back(d);
  p.states.push_back(step(*model, p.states[1], d));

  CHECK(p.length() == 2);
  CHECK(p.ends_terminal(*model));
  CHECK(p.state_at(1) == p.states[1]);
  CHECK(p.state_at(7) == p.states[2]);
  CHECK(p.action_at(7) == d);
  CHECK(is_complete(*model, p));
}

TEST_CASE("path validation reports each defect") {
  const auto model = build_ce(one_good_instance());
  Path good;
  good.states.push_back(model->initial_state());
  const JointAction d = {BidTree::leaf(1, 1, 2), BidTree::leaf(-1, 1, -1)};
  good.actions.push_back(d);
  good.states.push_back(step(*model, good.states[0], d));
  CHECK(validate_path(*model, good).empty());

  Path wrong_start = good;
  wrong_start.states[0].set_var("payment_1", 9);
  CHECK_FALSE(validate_path(*model, wrong_start).empty());

  Path wrong_succ = good;
  wrong_succ.states[1].set_var("payment_1", 9);
  CHECK_FALSE(validate_path(*model, wrong_succ).empty());

  Path illegal = good;
  illegal.actions[0] = {BidTree::leaf(5, 1, 5), noop()};
  CHECK_FALSE(validate_path(*model, illegal).empty());

  Path truncated = good;
  truncated.actions.push_back(d);
  CHECK_FALSE(validate_path(*model, truncated).empty());
}

TEST_CASE("path enumeration covers the branching structure") {
  const auto model = build_ce(one_good_instance());
  // Nine joint bids at the start, each reaching a terminal state whose
  // only continuation is the loop.
  const auto paths = enumerate_paths(*model, 2);
  CHECK(paths.size() == 9);
  CHECK(paths.size() == count_paths(*model, 2, 1u << 20));
  for (const Path& p : paths) {
    CHECK(validate_path(*model, p).empty());
    CHECK(p.ends_terminal(*model));
  }
  CHECK_THROWS_AS(enumerate_paths(*model, 2, 2), BudgetError);
}

TEST_CASE("the reachability closure interns every state once") {
  const auto model = build_ce(one_good_instance());
  ModelGraph g(*model, 2);
  CHECK(g.initial_id() == 0);
  CHECK(g.state(0) == model->initial_state());
  CHECK(g.min_stage(0) == 0);
  CHECK_FALSE(g.terminal(0));
  CHECK(g.all_paths_terminate());

  // Successors of the initial state are one stage in.
  std::size_t terminals = 0;
  for (std::size_t id = 1; id < g.state_count(); ++id)
    if (g.terminal(static_cast<int>(id))) ++terminals;
  CHECK(terminals > 0);

  for (const auto& tr : g.transitions(0)) {
    if (tr.successor < 0) continue;
    const JointAction d = g.joint_action(0, tr.action_index);
    CHECK(model->update(g.state(0), d) == g.state(tr.successor));
  }

  const Path p = g.least_prefix(static_cast<int>(g.state_count() - 1));
  CHECK(validate_path(*model, p).empty());
}

TEST_CASE("closures are deterministic") {
  const auto model = build_ce(one_good_instance());
  ModelGraph a(*model, 3);
  ModelGraph b(*model, 3);
  REQUIRE(a.state_count() == b.state_count());
  for (std::size_t id = 0; id < a.state_count(); ++id) {
    CHECK(a.state(static_cast<int>(id)) == b.state(static_cast<int>(id)));
    CHECK(a.transitions(static_cast<int>(id)).size() ==
          b.transitions(static_cast<int>(id)).size());
  }
  CHECK(a.path_count(1u << 20) == b.path_count(1u << 20));
}

TEST_CASE("model horizons reflect their protocols") {
  CHECK(build_ce(one_good_instance())->default_horizon() == 2);
  CHECK(build_saa(clock_instance())->default_horizon() == 8);
}

TEST_CASE("hash-equal states collide consistently") {
  const auto model = build_saa(clock_instance());
  ModelGraph g(*model, 8);
  // Interning the same model twice yields identical ids for a replnew walk.
  for (std::size_t id = 0; id < g.state_count(); ++id) {
    const State& w = g.state(static_cast<int>(id));
    CHECK(StateHash{}(w) == StateHash{}(State(w)));
  }
}
