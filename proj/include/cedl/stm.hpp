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
// Synchronous state-transition models of auction protocols: states carry a
// full valuation of propositions and variables, joint actions are one bid
// tree per agent, and paths record the run of a model.

#ifndef CEDL_STM_HPP_
#define CEDL_STM_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cedl/core.hpp"

namespace cedl {

// A state is its valuation: the set of true propositions (sorted) and the
// values of all declared variables (sorted by name). Equality is
// structural.
struct State {
  std::vector<std::string> props;
  std::vector<std::pair<std::string, Int>> vars;

  bool prop(const std::string& name) const;
  Int var(const std::string& name) const;  // throws EvalError if missing
  void set_prop(const std::string& name, bool value);
  void set_var(const std::string& name, Int value);

  bool operator==(const State&) const = default;
};

struct StateHash {
  std::size_t operator()(const State& w) const;
};

// One bid tree per agent, agent order.
using JointAction = std::vector<BidTree>;

// A synchronous game model: every agent moves at every stage, terminal
// states only loop. Implementations are immutable and safe for concurrent
// reads.
class StModel {
 public:
  virtual ~StModel() = default;

  virtual const AuctionSignature& signature() const = 0;
  virtual State initial_state() const = 0;
  virtual bool is_terminal(const State& w) const = 0;
  // Legal actions of one agent, in a deterministic order.
  virtual std::vector<BidTree> legal_actions(const State& w, Agent i) const = 0;
  virtual bool is_legal(const State& w, Agent i, const BidTree& action) const;
  // Successor state; pre: every component of d is legal at w. Terminal
  // states map to themselves under any legal joint action.
  virtual State update(const State& w, const JointAction& d) const = 0;
  virtual std::string name() const = 0;
  // Horizon within which every path of the model is expected to reach its
  // terminal loop; the default used by checkers.
  virtual std::size_t default_horizon() const { return 8; }

  int agents() const { return signature().agents; }
  int goods() const { return signature().goods; }
};

// Validated transition: throws IllegalActionError naming the first agent
// whose action is not legal at w.
State step(const StModel& model, const State& w, const JointAction& d);

// A finite run prefix: states[0..T] and actions[t] performed at states[t]
// for t < T. Paths returned by enumerate_paths stop one stage after the
// first terminal state (the loop step), or at the horizon.
struct Path {
  std::vector<State> states;
  std::vector<JointAction> actions;

  std::size_t length() const { return states.empty() ? 0 : states.size() - 1; }
  // Stationary reading: indexes beyond the recorded suffix repeat the last
  // state / last action when the path ended in a terminal loop.
  const State& state_at(std::size_t t) const;
  const JointAction& action_at(std::size_t t) const;
  bool ends_terminal(const StModel& model) const;
};

// Checks the path against the model: starts at the initial state, never
// revisits it, every action legal, every transition matches update, and
// terminal states only loop. Violations are returned as messages.
std::vector<std::string> validate_path(const StModel& model, const Path& p);

// Whether the path reached a terminal state.
bool is_complete(const StModel& model, const Path& p);

// Number of path prefixes of the given horizon, deduplicating the
// stationary suffix after a terminal state; saturates at cap.
std::size_t count_paths(const StModel& model, std::size_t horizon,
                        std::size_t cap);

// All path prefixes up to the horizon in lexicographic joint-action order,
// one representative continuation after a terminal state. Transitions that
// would revisit the initial state are not part of any path and are
// skipped. Throws BudgetError when more than cap paths exist (the message
// reports the count estimate).
std::vector<Path> enumerate_paths(const StModel& model, std::size_t horizon,
                                  std::size_t cap = 1u << 21);

// Reachability closure of a model up to a horizon: interned states and the
// full transition table, the backbone of exhaustive checking.
class ModelGraph {
 public:
  // Builds the closure; state_cap bounds exploration. States up to
  // lookahead stages past the horizon are expanded so that nested
  // next-operator formulas see real successors at the boundary.
  ModelGraph(const StModel& model, std::size_t horizon,
             std::size_t state_cap = 1u << 22, std::size_t lookahead = 4);

  const StModel& model() const { return model_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t state_count() const { return states_.size(); }
  const State& state(int id) const { return states_[static_cast<std::size_t>(id)]; }
  int initial_id() const { return 0; }
  bool terminal(int id) const { return terminal_[static_cast<std::size_t>(id)] != 0; }
  std::size_t min_stage(int id) const { return min_stage_[static_cast<std::size_t>(id)]; }

  // Per-agent legal actions at a state.
  const std::vector<std::vector<BidTree>>& legal(int id) const {
    return legal_[static_cast<std::size_t>(id)];
  }
  // Joint actions in lexicographic index order with their successor ids;
  // successor -1 marks a transition back to the initial state (on no path).
  struct Transition {
    std::vector<int> action_index;  // per-agent index into legal(id)
    int successor;
  };
  const std::vector<Transition>& transitions(int id) const {
    return transitions_[static_cast<std::size_t>(id)];
  }
  JointAction joint_action(int id, const std::vector<int>& action_index) const;

  // Lexicographically least path prefix reaching the state.
  Path least_prefix(int id) const;

  // True when no path can still be outside a terminal state at the
  // horizon.
  bool all_paths_terminate() const { return all_paths_terminate_; }
  // Path-prefix count at the horizon, saturated at cap.
  std::size_t path_count(std::size_t cap) const;

 private:
  const StModel& model_;
  std::size_t horizon_;
  std::vector<State> states_;
  std::unordered_map<State, int, StateHash> ids_;
  std::vector<std::uint8_t> terminal_;
  std::vector<std::size_t> min_stage_;
  std::vector<std::vector<std::vector<BidTree>>> legal_;
  std::vector<std::vector<Transition>> transitions_;
  std::vector<std::pair<int, std::vector<int>>> parent_;  // id -> (pred, action_index)
  bool all_paths_terminate_ = false;
};

}  // namespace cedl

#endif  // CEDL_STM_HPP_
