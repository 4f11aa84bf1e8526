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

#include "cedl/stm.hpp"

#include <algorithm>
#include <deque>

namespace cedl {

bool State::prop(const std::string& name) const {
  return std::binary_search(props.begin(), props.end(), name);
}

Int State::var(const std::string& name) const {
  auto it = std::lower_bound(
      vars.begin(), vars.end(), name,
      [](const auto& pair, const std::string& key) { return pair.first < key; });
  if (it == vars.end() || it->first != name)
    throw EvalError("undefined variable " + name);
  return it->second;
}

void State::set_prop(const std::string& name, bool value) {
  auto it = std::lower_bound(props.begin(), props.end(), name);
  bool present = it != props.end() && *it == name;
  if (value && !present) props.insert(it, name);
  if (!value && present) props.erase(it);
}

void State::set_var(const std::string& name, Int value) {
  auto it = std::lower_bound(
      vars.begin(), vars.end(), name,
      [](const auto& pair, const std::string& key) { return pair.first < key; });
  if (it != vars.end() && it->first == name)
    it->second = value;
  else
    vars.insert(it, {name, value});
}

std::size_t StateHash::operator()(const State& w) const {
  std::size_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (const auto& p : w.props) mix(std::hash<std::string>{}(p));
  for (const auto& [k, v] : w.vars) {
    mix(std::hash<std::string>{}(k));
    mix(std::hash<Int>{}(v));
  }
  return h;
}

bool StModel::is_legal(const State& w, Agent i, const BidTree& action) const {
  auto acts = legal_actions(w, i);
  return std::find(acts.begin(), acts.end(), action) != acts.end();
}

State step(const StModel& model, const State& w, const JointAction& d) {
  if (static_cast<int>(d.size()) != model.agents())
    throw InputError("joint action has " + std::to_string(d.size()) +
                     " components, expected " + std::to_string(model.agents()));
  for (Agent i = 1; i <= model.agents(); ++i)
    if (!model.is_legal(w, i, d[static_cast<std::size_t>(i - 1)]))
      throw IllegalActionError(
          i, "action " + print_bid_tree(d[static_cast<std::size_t>(i - 1)]) +
                 " is not legal in the current state");
  return model.update(w, d);
}

const State& Path::state_at(std::size_t t) const {
  if (states.empty()) throw InputError("empty path");
  return t < states.size() ? states[t] : states.back();
}

const JointAction& Path::action_at(std::size_t t) const {
  if (actions.empty()) throw InputError("path records no actions");
  return t < actions.size() ? actions[t] : actions.back();
}

bool Path::ends_terminal(const StModel& model) const {
  return !states.empty() && model.is_terminal(states.back());
}

std::vector<std::string> validate_path(const StModel& model, const Path& p) {
  std::vector<std::string> out;
  if (p.states.empty()) {
    out.push_back("path has no states");
    return out;
  }
  if (p.actions.size() + 1 != p.states.size())
    out.push_back("path must record exactly one action per transition");
  if (!(p.states.front() == model.initial_state()))
    out.push_back("stage 0 is not the initial state");
  for (std::size_t t = 1; t < p.states.size(); ++t)
    if (p.states[t] == model.initial_state())
      out.push_back("stage " + std::to_string(t) +
                    " revisits the initial state");
  std::size_t transitions = std::min(p.actions.size(), p.states.size() - 1);
  for (std::size_t t = 0; t < transitions; ++t) {
    const JointAction& d = p.actions[t];
    if (static_cast<int>(d.size()) != model.agents()) {
      out.push_back("stage " + std::to_string(t) +
                    ": joint action has the wrong arity");
      continue;
    }
    for (Agent i = 1; i <= model.agents(); ++i)
      if (!model.is_legal(p.states[t], i, d[static_cast<std::size_t>(i - 1)]))
        out.push_back("stage " + std::to_string(t) + ": agent " +
                      std::to_string(i) + " plays an illegal action");
    State expected = model.update(p.states[t], d);
    if (!(expected == p.states[t + 1]))
      out.push_back("stage " + std::to_string(t + 1) +
                    " does not match the update function");
    if (model.is_terminal(p.states[t]) && !(p.states[t + 1] == p.states[t]))
      out.push_back("stage " + std::to_string(t) +
                    ": terminal state does not loop");
  }
  return out;
}

bool is_complete(const StModel& model, const Path& p) {
  for (const State& w : p.states)
    if (model.is_terminal(w)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Model graph.

ModelGraph::ModelGraph(const StModel& model, std::size_t horizon,
                       std::size_t state_cap, std::size_t lookahead)
    : model_(model), horizon_(horizon) {
  auto intern = [&](const State& w, int pred,
                    const std::vector<int>& via) -> int {
    auto [it, inserted] = ids_.emplace(w, static_cast<int>(states_.size()));
    if (!inserted) return it->second;
    if (states_.size() >= state_cap)
      throw BudgetError("state cap exceeded while exploring the model (" +
                        std::to_string(state_cap) + " states)");
    states_.push_back(w);
    terminal_.push_back(model.is_terminal(w) ? 1 : 0);
    min_stage_.push_back(pred < 0 ? 0
                                  : min_stage_[static_cast<std::size_t>(pred)] + 1);
    parent_.push_back({pred, via});
    std::vector<std::vector<BidTree>> legal(
        static_cast<std::size_t>(model.agents()));
    for (Agent i = 1; i <= model.agents(); ++i)
      legal[static_cast<std::size_t>(i - 1)] = model.legal_actions(w, i);
    legal_.push_back(std::move(legal));
    transitions_.emplace_back();
    return it->second;
  };

  intern(model.initial_state(), -1, {});
  const State initial = states_[0];
  // Breadth-first in discovery order; min_stage is the BFS depth. Copies
  // of the current state and legal sets are taken because intern() grows
  // the underlying vectors.
  for (std::size_t id = 0; id < states_.size(); ++id) {
    if (min_stage_[id] >= horizon_ + lookahead) continue;
    const State here = states_[id];
    const auto legal = legal_[id];
    bool playable = true;
    for (const auto& acts : legal)
      if (acts.empty()) playable = false;
    if (!playable) continue;  // dead end, recorded with no transitions

    bool term = terminal_[id] != 0;
    std::vector<int> idx(legal.size(), 0);
    bool more = true;
    while (more) {
      State next;
      if (term) {
        next = here;
      } else {
        JointAction d;
        d.reserve(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
          d.push_back(legal[i][static_cast<std::size_t>(idx[i])]);
        next = model.update(here, d);
      }
      int succ = next == initial ? -1 : intern(next, static_cast<int>(id), idx);
      transitions_[id].push_back(Transition{idx, succ});
      more = false;
      for (std::size_t k = idx.size(); k-- > 0;) {
        if (static_cast<std::size_t>(idx[k]) + 1 < legal[k].size()) {
          ++idx[k];
          std::fill(idx.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                    idx.end(), 0);
          more = true;
          break;
        }
      }
    }
  }

  // A model run can still be live at the horizon iff a non-terminal state
  // is reachable at stage exactly horizon, or some reachable prefix gets
  // stuck in a non-terminal state with no continuation.
  std::vector<std::uint8_t> cur(states_.size(), 0), nxt;
  bool live = false;
  bool stuck = false;
  if (!terminal_[0]) { cur[0] = 1; live = true; }
  for (std::size_t t = 0; t < horizon_ && live && !stuck; ++t) {
    nxt.assign(states_.size(), 0);
    live = false;
    for (std::size_t id = 0; id < states_.size(); ++id) {
      if (!cur[id]) continue;
      bool has_successor = false;
      for (const Transition& tr : transitions_[id]) {
        if (tr.successor < 0) continue;
        has_successor = true;
        if (!terminal_[static_cast<std::size_t>(tr.successor)]) {
          nxt[static_cast<std::size_t>(tr.successor)] = 1;
          live = true;
        }
      }
      if (!has_successor) stuck = true;  // non-terminal dead end
    }
    cur.swap(nxt);
  }
  all_paths_terminate_ = !live && !stuck;
}

JointAction ModelGraph::joint_action(int id,
                                     const std::vector<int>& action_index) const {
  JointAction d;
  const auto& legal = legal_[static_cast<std::size_t>(id)];
  for (std::size_t i = 0; i < action_index.size(); ++i)
    d.push_back(legal[i][static_cast<std::size_t>(action_index[i])]);
  return d;
}

Path ModelGraph::least_prefix(int id) const {
  std::vector<int> chain;
  int cur = id;
  while (cur >= 0) {
    chain.push_back(cur);
    cur = parent_[static_cast<std::size_t>(cur)].first;
  }
  std::reverse(chain.begin(), chain.end());
  Path p;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    p.states.push_back(states_[static_cast<std::size_t>(chain[k])]);
    if (k + 1 < chain.size()) {
      const auto& [pred, idx] = parent_[static_cast<std::size_t>(chain[k + 1])];
      p.actions.push_back(joint_action(pred, idx));
    }
  }
  return p;
}

std::size_t ModelGraph::path_count(std::size_t cap) const {
  std::unordered_map<std::size_t, std::size_t> memo;
  std::function<std::size_t(int, std::size_t)> count =
      [&](int id, std::size_t stage) -> std::size_t {
    if (stage >= horizon_) return 1;
    if (terminal(id)) return 1;  // single representative continuation
    std::size_t key = static_cast<std::size_t>(id) * (horizon_ + 1) + stage;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::size_t total = 0;
    for (const Transition& tr :
         transitions_[static_cast<std::size_t>(id)]) {
      if (tr.successor < 0) continue;
      std::size_t sub = count(tr.successor, stage + 1);
      if (sub >= cap || total >= cap - sub) { total = cap; break; }
      total += sub;
    }
    if (total == 0) total = 1;  // dead end: the prefix itself
    memo[key] = total;
    return total;
  };
  return count(0, 0);
}

std::size_t count_paths(const StModel& model, std::size_t horizon,
                        std::size_t cap) {
  ModelGraph g(model, horizon);
  return g.path_count(cap);
}

// ---------------------------------------------------------------------------
// Literal path enumeration.

namespace {

void emit(const Path& p, std::size_t cap, std::vector<Path>& out) {
  if (out.size() >= cap)
    throw BudgetError("path cap exceeded (more than " + std::to_string(cap) +
                      " path prefixes)");
  out.push_back(p);
}

void enumerate_rec(const StModel& model, const State& initial, Path& p,
                   std::size_t horizon, std::size_t cap,
                   std::vector<Path>& out) {
  // Copied: recursive push_back below may reallocate p.states.
  const State w = p.states.back();
  bool term = model.is_terminal(w);
  std::size_t t = p.states.size() - 1;
  // Stop one stage after the first terminal state: the remaining suffix is
  // stationary, with a single representative continuation.
  bool looped =
      p.states.size() >= 2 && term && p.states[p.states.size() - 2] == w;
  if (t >= horizon || looped) {
    emit(p, cap, out);
    return;
  }
  std::vector<std::vector<BidTree>> legal(
      static_cast<std::size_t>(model.agents()));
  bool playable = true;
  for (Agent i = 1; i <= model.agents(); ++i) {
    legal[static_cast<std::size_t>(i - 1)] = model.legal_actions(w, i);
    if (legal[static_cast<std::size_t>(i - 1)].empty()) playable = false;
  }
  bool extended = false;
  if (playable) {
    std::vector<int> idx(legal.size(), 0);
    bool more = true;
    while (more) {
      JointAction d;
      d.reserve(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i)
        d.push_back(legal[i][static_cast<std::size_t>(idx[i])]);
      State next = term ? w : model.update(w, d);
      if (!(next == initial)) {
        extended = true;
        p.actions.push_back(d);
        p.states.push_back(std::move(next));
        enumerate_rec(model, initial, p, horizon, cap, out);
        p.states.pop_back();
        p.actions.pop_back();
      }
      if (term) break;  // representative continuation only
      more = false;
      for (std::size_t k = idx.size(); k-- > 0;) {
        if (static_cast<std::size_t>(idx[k]) + 1 < legal[k].size()) {
          ++idx[k];
          std::fill(idx.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                    idx.end(), 0);
          more = true;
          break;
        }
      }
    }
  }
  if (!extended) emit(p, cap, out);  // dead end: report the prefix
}

}  // namespace

std::vector<Path> enumerate_paths(const StModel& model, std::size_t horizon,
                                  std::size_t cap) {
  std::size_t estimate = count_paths(model, horizon, cap);
  if (estimate >= cap)
    throw BudgetError("path cap exceeded: at least " +
                      std::to_string(estimate) + " path prefixes at horizon " +
                      std::to_string(horizon));
  std::vector<Path> out;
  Path p;
  p.states.push_back(model.initial_state());
  enumerate_rec(model, model.initial_state(), p, horizon, cap, out);
  return out;
}

}  // namespace cedl
