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
// Terms and temporal formulas over auction states, their surface syntax,
// path-based semantics and a bounded exhaustive checker.

#ifndef CEDL_LOGIC_HPP_
#define CEDL_LOGIC_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cedl/stm.hpp"
#include "cedl/wd.hpp"

namespace cedl {

enum class TermKind {
  kConstant,
  kVariable,
  kAdd,
  kSub,
  kMin,
  kMax,
  kTimes,
  kWin,    // trade of (agent, good) under winner determination
  kValue,  // node value of a tree, or its trade value at a trade vector
  kQtd,    // quantity of a good at a tree's root
};

// Terms are state-local: they read variables of the current state only.
// Variadic arithmetic (n >= 2 operands) is left-associated sugar over the
// binary core.
struct Term {
  TermKind kind = TermKind::kConstant;
  Int constant = 0;
  std::string variable;
  Agent agent = 0;
  Good good = 0;
  // kWin: the n bid trees; kValue/kQtd: exactly one tree.
  std::vector<BidTree> trees;
  // Arithmetic operands; for kWin the n*m allocation terms (agent-major);
  // for kValue with a trade the m trade terms.
  std::vector<Term> args;

  bool operator==(const Term&) const = default;
};

Term t_const(Int v);
Term t_var(std::string name);
Term t_add(std::vector<Term> args);
Term t_sub(Term a, Term b);
Term t_min(std::vector<Term> args);
Term t_max(std::vector<Term> args);
Term t_times(std::vector<Term> args);
Term t_win(Agent i, Good j, std::vector<BidTree> bids, std::vector<Term> alloc);
Term t_value(Agent i, BidTree t);
Term t_value_at(Agent i, BidTree t, std::vector<Term> trade);
Term t_qtd(Agent i, BidTree t, Good j);

enum class FormulaKind {
  kTrue,
  kFalse,
  kProp,
  kInitial,
  kTerminal,
  kLegal,
  kDoes,
  kRest,
  kCmp,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kIff,
  kNext,
};

enum class CmpOp { kLt, kGt, kEq };

struct Formula {
  FormulaKind kind = FormulaKind::kTrue;
  std::string prop;
  Agent agent = 0;
  std::optional<BidTree> tree;  // legal / does / rest
  Restriction restriction = Restriction::kBuyer;
  CmpOp cmp = CmpOp::kEq;
  std::vector<Term> terms;  // kCmp: exactly two
  std::vector<Formula> children;

  bool operator==(const Formula&) const = default;
};

Formula f_true();
Formula f_false();
Formula f_prop(std::string name);
Formula f_initial();
Formula f_terminal();
Formula f_legal(Agent i, BidTree t);
Formula f_does(Agent i, BidTree t);
Formula f_rest(Agent i, Restriction r, BidTree t);
Formula f_cmp(CmpOp op, Term a, Term b);
Formula f_eq(Term a, Term b);
Formula f_not(Formula f);
Formula f_and(std::vector<Formula> fs);  // n >= 1, single child collapses
Formula f_or(std::vector<Formula> fs);
Formula f_implies(Formula a, Formula b);
Formula f_iff(Formula a, Formula b);
Formula f_next(Formula f);

// Rewrites derived connectives (or, implies, iff, true, false) into the
// not/and core; comparisons and atoms are untouched.
Formula elaborate(const Formula& f);

// Term evaluation at a state. Undefined variables, infeasible trade-value
// terms and arithmetic overflow raise EvalError; win terms run winner
// determination against the model's signature.
Int eval_term(const StModel& model, const State& w, const Term& z,
              std::size_t solver_budget = 1u << 24);

// Literal path semantics at stage t. The next operator beyond a path that
// ended in a terminal loop reads the stationary suffix; beyond a
// non-terminal end it raises EvalError("insufficient horizon").
bool holds(const StModel& model, const Path& path, std::size_t t,
           const Formula& f, std::size_t solver_budget = 1u << 24);

struct CheckStats {
  std::size_t states_explored = 0;
  std::size_t evaluations = 0;
  std::size_t path_count = 0;
  // Every path reaches a terminal loop within the horizon.
  bool complete_coverage = false;
};

struct Counterexample {
  Path prefix;
  std::size_t stage = 0;
  std::string formula;
};

struct Verdict {
  bool valid = false;
  std::optional<Counterexample> counterexample;
  CheckStats stats;

  explicit operator bool() const { return valid; }
};

// Bounded exhaustive check: valid iff the formula holds at every stage up
// to the horizon of every path. The model's reachable states are explored
// once and shared across stages; the counterexample, when one exists, is
// the first in deterministic enumeration order (discovery order of
// states, lexicographic joint-action order of transitions). Throws
// BudgetError when more than cap path prefixes exist.
Verdict globally_true(const StModel& model, const Formula& f,
                      std::size_t horizon, std::size_t cap = 1u << 21,
                      std::size_t solver_budget = 1u << 24);

// Same, for many formulas over one shared exploration.
std::vector<Verdict> check_formulas(const StModel& model,
                                    const std::vector<Formula>& formulas,
                                    std::size_t horizon,
                                    std::size_t cap = 1u << 21,
                                    std::size_t solver_budget = 1u << 24);

// Surface syntax. Formulas:
//   initial terminal true false  propositions by name
//   legal_i(tree) does_i(tree) rest_i(buyer|seller|good|unit, tree)
//   term < term, >, =, <=, >=, != (the latter three elaborate to or/=)
//   not f, next f, f and g, f or g, f -> g, f <-> g, parentheses
// Terms:
//   integers, variables, add/sub/min/max/times(t1, ..., tk),
//   win_i_j(tree, ..., tree; a11, ..., anm), value_i(tree),
//   value_i(tree; z1, ..., zm), qtd_i(tree, good)
Formula parse_formula(const std::string& text,
                      const std::map<std::string, Good>* good_names = nullptr);
Term parse_term(const std::string& text,
                const std::map<std::string, Good>* good_names = nullptr);

std::string print_formula(const Formula& f,
                          const std::map<Good, std::string>* good_names = nullptr);
std::string print_term(const Term& z,
                       const std::map<Good, std::string>* good_names = nullptr);

}  // namespace cedl

#endif  // CEDL_LOGIC_HPP_
