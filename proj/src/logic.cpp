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

#include "cedl/logic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_map>

#include "cedl/core.hpp"

namespace cedl {

// ---------------------------------------------------------------------------
// Builders. Variadic arithmetic left-associates into the binary core, so
// printing and parsing stay inverse to each other.

Term t_const(Int v) {
  Term z;
  z.kind = TermKind::kConstant;
  z.constant = v;
  return z;
}

Term t_var(std::string name) {
  Term z;
  z.kind = TermKind::kVariable;
  z.variable = std::move(name);
  return z;
}

namespace {

Term fold_binary(TermKind kind, std::vector<Term> args, const char* what) {
  if (args.size() < 2)
    throw InputError(std::string(what) + " needs at least two operands");
  Term acc = std::move(args[0]);
  for (std::size_t k = 1; k < args.size(); ++k) {
    Term z;
    z.kind = kind;
    z.args.push_back(std::move(acc));
    z.args.push_back(std::move(args[k]));
    acc = std::move(z);
  }
  return acc;
}

}  // namespace

Term t_add(std::vector<Term> args) {
  return fold_binary(TermKind::kAdd, std::move(args), "add");
}

Term t_sub(Term a, Term b) {
  Term z;
  z.kind = TermKind::kSub;
  z.args.push_back(std::move(a));
  z.args.push_back(std::move(b));
  return z;
}

Term t_min(std::vector<Term> args) {
  return fold_binary(TermKind::kMin, std::move(args), "min");
}

Term t_max(std::vector<Term> args) {
  return fold_binary(TermKind::kMax, std::move(args), "max");
}

Term t_times(std::vector<Term> args) {
  return fold_binary(TermKind::kTimes, std::move(args), "times");
}

Term t_win(Agent i, Good j, std::vector<BidTree> bids, std::vector<Term> alloc) {
  if (i < 1 || j < 1) throw InputError("win term needs agent, good >= 1");
  if (bids.empty()) throw InputError("win term needs at least one bid");
  if (alloc.size() % bids.size() != 0)
    throw InputError("win term needs one allocation term per agent and good");
  Term z;
  z.kind = TermKind::kWin;
  z.agent = i;
  z.good = j;
  z.trees = std::move(bids);
  z.args = std::move(alloc);
  return z;
}

Term t_value(Agent i, BidTree t) {
  if (i < 1) throw InputError("value term needs agent >= 1");
  Term z;
  z.kind = TermKind::kValue;
  z.agent = i;
  z.trees.push_back(std::move(t));
  return z;
}

Term t_value_at(Agent i, BidTree t, std::vector<Term> trade) {
  if (trade.empty()) throw InputError("trade-value term needs a trade vector");
  Term z = t_value(i, std::move(t));
  z.args = std::move(trade);
  return z;
}

Term t_qtd(Agent i, BidTree t, Good j) {
  if (i < 1 || j < 1) throw InputError("qtd term needs agent, good >= 1");
  Term z;
  z.kind = TermKind::kQtd;
  z.agent = i;
  z.good = j;
  z.trees.push_back(std::move(t));
  return z;
}

Formula f_true() { return Formula{}; }

Formula f_false() {
  Formula f;
  f.kind = FormulaKind::kFalse;
  return f;
}

Formula f_prop(std::string name) {
  Formula f;
  f.kind = FormulaKind::kProp;
  f.prop = std::move(name);
  return f;
}

Formula f_initial() {
  Formula f;
  f.kind = FormulaKind::kInitial;
  return f;
}

Formula f_terminal() {
  Formula f;
  f.kind = FormulaKind::kTerminal;
  return f;
}

Formula f_legal(Agent i, BidTree t) {
  Formula f;
  f.kind = FormulaKind::kLegal;
  f.agent = i;
  f.tree = std::move(t);
  return f;
}

Formula f_does(Agent i, BidTree t) {
  Formula f;
  f.kind = FormulaKind::kDoes;
  f.agent = i;
  f.tree = std::move(t);
  return f;
}

Formula f_rest(Agent i, Restriction r, BidTree t) {
  Formula f;
  f.kind = FormulaKind::kRest;
  f.agent = i;
  f.restriction = r;
  f.tree = std::move(t);
  return f;
}

Formula f_cmp(CmpOp op, Term a, Term b) {
  Formula f;
  f.kind = FormulaKind::kCmp;
  f.cmp = op;
  f.terms.push_back(std::move(a));
  f.terms.push_back(std::move(b));
  return f;
}

Formula f_eq(Term a, Term b) {
  return f_cmp(CmpOp::kEq, std::move(a), std::move(b));
}

Formula f_not(Formula f) {
  Formula g;
  g.kind = FormulaKind::kNot;
  g.children.push_back(std::move(f));
  return g;
}

namespace {

Formula junction(FormulaKind kind, std::vector<Formula> fs, const char* what) {
  if (fs.empty()) throw InputError(std::string(what) + " needs an operand");
  if (fs.size() == 1) return std::move(fs[0]);
  Formula f;
  f.kind = kind;
  f.children = std::move(fs);
  return f;
}

}  // namespace

Formula f_and(std::vector<Formula> fs) {
  return junction(FormulaKind::kAnd, std::move(fs), "and");
}

Formula f_or(std::vector<Formula> fs) {
  return junction(FormulaKind::kOr, std::move(fs), "or");
}

Formula f_implies(Formula a, Formula b) {
  Formula f;
  f.kind = FormulaKind::kImplies;
  f.children.push_back(std::move(a));
  f.children.push_back(std::move(b));
  return f;
}

Formula f_iff(Formula a, Formula b) {
  Formula f;
  f.kind = FormulaKind::kIff;
  f.children.push_back(std::move(a));
  f.children.push_back(std::move(b));
  return f;
}

Formula f_next(Formula f) {
  Formula g;
  g.kind = FormulaKind::kNext;
  g.children.push_back(std::move(f));
  return g;
}

// ---------------------------------------------------------------------------
// Elaboration into the not/and core.

Formula elaborate(const Formula& f) {
  auto elab_children = [&](FormulaKind kind) {
    Formula g;
    g.kind = kind;
    for (const Formula& c : f.children) g.children.push_back(elaborate(c));
    return g;
  };
  switch (f.kind) {
    case FormulaKind::kTrue:
      return f_eq(t_const(0), t_const(0));
    case FormulaKind::kFalse:
      return f_cmp(CmpOp::kLt, t_const(0), t_const(0));
    case FormulaKind::kOr: {
      std::vector<Formula> negated;
      for (const Formula& c : f.children) negated.push_back(f_not(elaborate(c)));
      return f_not(f_and(std::move(negated)));
    }
    case FormulaKind::kImplies:
      return f_not(f_and({elaborate(f.children[0]),
                          f_not(elaborate(f.children[1]))}));
    case FormulaKind::kIff: {
      Formula a = elaborate(f.children[0]);
      Formula b = elaborate(f.children[1]);
      return f_and({f_not(f_and({a, f_not(b)})), f_not(f_and({b, f_not(a)}))});
    }
    case FormulaKind::kNot:
      return f_not(elaborate(f.children[0]));
    case FormulaKind::kAnd:
      return elab_children(FormulaKind::kAnd);
    case FormulaKind::kNext:
      return f_next(elaborate(f.children[0]));
    default:
      return f;
  }
}

// ---------------------------------------------------------------------------
// Term evaluation.

namespace {

// Winner-determination results reused across evaluations; win terms are
// state-independent once their allocation arguments are evaluated.
struct WdCache {
  std::unordered_map<std::string, IntMatrix> trades;
};

Int eval_term_impl(const StModel& model, const State& w, const Term& z,
                   std::size_t budget, WdCache* cache) {
  auto arg = [&](std::size_t k) {
    return eval_term_impl(model, w, z.args[k], budget, cache);
  };
  switch (z.kind) {
    case TermKind::kConstant:
      return z.constant;
    case TermKind::kVariable:
      return w.var(z.variable);
    case TermKind::kAdd:
      return checked_add(arg(0), arg(1));
    case TermKind::kSub:
      return checked_sub(arg(0), arg(1));
    case TermKind::kMin:
      return std::min(arg(0), arg(1));
    case TermKind::kMax:
      return std::max(arg(0), arg(1));
    case TermKind::kTimes:
      return checked_mul(arg(0), arg(1));
    case TermKind::kWin: {
      const AuctionSignature& sig = model.signature();
      std::size_t n = static_cast<std::size_t>(sig.agents);
      std::size_t m = static_cast<std::size_t>(sig.goods);
      if (z.trees.size() != n)
        throw EvalError("win term carries " + std::to_string(z.trees.size()) +
                        " bids for " + std::to_string(n) + " agents");
      if (z.args.size() != n * m)
        throw EvalError("win term carries " + std::to_string(z.args.size()) +
                        " allocation terms, expected " + std::to_string(n * m));
      if (z.agent > sig.agents || z.good > sig.goods)
        throw EvalError("win term indexes agent " + std::to_string(z.agent) +
                        ", good " + std::to_string(z.good) +
                        " outside the signature");
      IntMatrix alloc(sig.agents, sig.goods);
      std::string key;
      for (std::size_t k = 0; k < z.args.size(); ++k) {
        Int v = arg(k);
        alloc.flat()[k] = v;
        key += std::to_string(v) + ",";
      }
      if (cache) {
        key += "|";
        for (const BidTree& t : z.trees) key += print_bid_tree(t) + "|";
        auto it = cache->trades.find(key);
        if (it != cache->trades.end()) return it->second.at(z.agent, z.good);
        WdSolution sol = solve_wd(z.trees, alloc, sig, budget);
        auto [jt, inserted] = cache->trades.emplace(key, sol.trade);
        return jt->second.at(z.agent, z.good);
      }
      WdSolution sol = solve_wd(z.trees, alloc, sig, budget);
      return sol.trade.at(z.agent, z.good);
    }
    case TermKind::kValue: {
      if (z.args.empty()) return z.trees[0].value();
      if (z.args.size() != static_cast<std::size_t>(model.goods()))
        throw EvalError("trade-value term carries " +
                        std::to_string(z.args.size()) +
                        " trade components, expected " +
                        std::to_string(model.goods()));
      std::vector<Int> trade;
      trade.reserve(z.args.size());
      for (std::size_t k = 0; k < z.args.size(); ++k) trade.push_back(arg(k));
      std::optional<TradeValue> tv = trade_value(z.trees[0], trade, budget);
      if (!tv)
        throw EvalError("trade value of " + print_bid_tree(z.trees[0]) +
                        " is infeasible for the given trade");
      return tv->value;
    }
    case TermKind::kQtd:
      return leaf_quantity(z.trees[0], NodeId{}, z.good);
  }
  throw EvalError("unknown term");
}

}  // namespace

Int eval_term(const StModel& model, const State& w, const Term& z,
              std::size_t solver_budget) {
  return eval_term_impl(model, w, z, solver_budget, nullptr);
}

// ---------------------------------------------------------------------------
// Literal path semantics.

namespace {

bool compare(CmpOp op, Int a, Int b) {
  switch (op) {
    case CmpOp::kLt:
      return a < b;
    case CmpOp::kGt:
      return a > b;
    case CmpOp::kEq:
      return a == b;
  }
  return false;
}

const State& path_state(const StModel& model, const Path& p, std::size_t t) {
  if (t < p.states.size()) return p.states[t];
  if (p.ends_terminal(model)) return p.states.back();
  throw EvalError("insufficient horizon: stage " + std::to_string(t) +
                  " lies beyond a path that has not terminated");
}

const JointAction& path_action(const StModel& model, const Path& p,
                               std::size_t t) {
  if (t < p.actions.size()) return p.actions[t];
  // Beyond the recorded suffix the path is stationary only when it ended in
  // a terminal loop; the loop action then repeats forever.
  bool loop_recorded = p.states.size() >= 2 &&
                       p.actions.size() + 1 == p.states.size() &&
                       p.states[p.states.size() - 2] == p.states.back() &&
                       p.ends_terminal(model);
  if (loop_recorded) return p.actions.back();
  throw EvalError("no action is recorded at stage " + std::to_string(t));
}

bool holds_impl(const StModel& model, const Path& p, std::size_t t,
                const Formula& f, std::size_t budget, WdCache* cache) {
  switch (f.kind) {
    case FormulaKind::kTrue:
      return true;
    case FormulaKind::kFalse:
      return false;
    case FormulaKind::kProp:
      return path_state(model, p, t).prop(f.prop);
    case FormulaKind::kInitial:
      return path_state(model, p, t) == model.initial_state();
    case FormulaKind::kTerminal:
      return model.is_terminal(path_state(model, p, t));
    case FormulaKind::kLegal:
      return model.is_legal(path_state(model, p, t), f.agent, *f.tree);
    case FormulaKind::kDoes: {
      const JointAction& d = path_action(model, p, t);
      if (f.agent < 1 || static_cast<std::size_t>(f.agent) > d.size())
        throw EvalError("does refers to agent " + std::to_string(f.agent) +
                        " outside the model");
      return d[static_cast<std::size_t>(f.agent - 1)] == *f.tree;
    }
    case FormulaKind::kRest:
      return check_restriction(f.agent, *f.tree, f.restriction, model.goods());
    case FormulaKind::kCmp: {
      const State& w = path_state(model, p, t);
      Int a = eval_term_impl(model, w, f.terms[0], budget, cache);
      Int b = eval_term_impl(model, w, f.terms[1], budget, cache);
      return compare(f.cmp, a, b);
    }
    case FormulaKind::kNot:
      return !holds_impl(model, p, t, f.children[0], budget, cache);
    case FormulaKind::kAnd:
      for (const Formula& c : f.children)
        if (!holds_impl(model, p, t, c, budget, cache)) return false;
      return true;
    case FormulaKind::kOr:
      for (const Formula& c : f.children)
        if (holds_impl(model, p, t, c, budget, cache)) return true;
      return false;
    case FormulaKind::kImplies:
      return !holds_impl(model, p, t, f.children[0], budget, cache) ||
             holds_impl(model, p, t, f.children[1], budget, cache);
    case FormulaKind::kIff:
      return holds_impl(model, p, t, f.children[0], budget, cache) ==
             holds_impl(model, p, t, f.children[1], budget, cache);
    case FormulaKind::kNext:
      return holds_impl(model, p, t + 1, f.children[0], budget, cache);
  }
  throw EvalError("unknown formula");
}

}  // namespace

bool holds(const StModel& model, const Path& path, std::size_t t,
           const Formula& f, std::size_t solver_budget) {
  WdCache cache;
  return holds_impl(model, path, t, f, solver_budget, &cache);
}

// ---------------------------------------------------------------------------
// Bounded exhaustive checking over the model graph.

namespace {

// How far a formula reads along a run: the largest state offset and the
// largest action offset it can touch (-1 when it reads no action).
struct Need {
  int state = 0;
  int action = -1;
};

Need need_of(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::kDoes:
      return {0, 0};
    case FormulaKind::kNext: {
      Need c = need_of(f.children[0]);
      return {c.state + 1, c.action < 0 ? -1 : c.action + 1};
    }
    case FormulaKind::kNot:
    case FormulaKind::kAnd:
    case FormulaKind::kOr:
    case FormulaKind::kImplies:
    case FormulaKind::kIff: {
      Need acc;
      for (const Formula& c : f.children) {
        Need n = need_of(c);
        acc.state = std::max(acc.state, n.state);
        acc.action = std::max(acc.action, n.action);
      }
      return acc;
    }
    default:
      return {0, -1};
  }
}

// Transitions a run must carry for the formula to be defined everywhere.
std::size_t run_length(const Formula& f) {
  Need n = need_of(f);
  return static_cast<std::size_t>(std::max(n.state, n.action + 1));
}

class Checker {
 public:
  Checker(const StModel& model, const ModelGraph& graph, std::size_t budget)
      : model_(model), graph_(graph), budget_(budget) {}

  std::size_t evaluations() const { return evals_; }

  Verdict check(const Formula& f, std::size_t horizon) {
    Verdict v;
    v.valid = true;
    std::size_t len = run_length(f);
    Run run;
    for (int id = 0; id < static_cast<int>(graph_.state_count()); ++id) {
      if (graph_.min_stage(id) > horizon) continue;
      run.ids.assign(1, id);
      run.steps.clear();
      if (!search(f, run, len, v)) break;  // counterexample found
    }
    return v;
  }

 private:
  struct Run {
    std::vector<int> ids;
    std::vector<const ModelGraph::Transition*> steps;
  };

  // Extends the run to the required length along real transitions and
  // evaluates the formula at its start. Returns false once a
  // counterexample is recorded.
  bool search(const Formula& f, Run& run, std::size_t len, Verdict& v) {
    if (run.steps.size() == len) {
      if (eval(f, run, 0)) return true;
      Counterexample cx;
      cx.stage = graph_.min_stage(run.ids[0]);
      cx.formula = print_formula(f);
      cx.prefix = graph_.least_prefix(run.ids[0]);
      for (std::size_t k = 0; k < run.steps.size(); ++k) {
        cx.prefix.actions.push_back(
            graph_.joint_action(run.ids[k], run.steps[k]->action_index));
        cx.prefix.states.push_back(graph_.state(run.ids[k + 1]));
      }
      v.valid = false;
      v.counterexample = std::move(cx);
      return false;
    }
    int id = run.ids.back();
    for (const ModelGraph::Transition& tr : graph_.transitions(id)) {
      if (tr.successor < 0) continue;  // not on any path
      run.ids.push_back(tr.successor);
      run.steps.push_back(&tr);
      bool ok = search(f, run, len, v);
      run.ids.pop_back();
      run.steps.pop_back();
      if (!ok) return false;
    }
    return true;
  }

  bool eval(const Formula& f, const Run& run, std::size_t off) {
    ++evals_;
    int sid = run.ids[off];
    bool local = state_local(f);
    if (local) {
      std::vector<std::int8_t>& memo = memo_[&f];
      if (memo.empty()) memo.assign(graph_.state_count(), 0);
      std::int8_t seen = memo[static_cast<std::size_t>(sid)];
      if (seen != 0) return seen == 2;
    }
    bool r = false;
    switch (f.kind) {
      case FormulaKind::kTrue:
        r = true;
        break;
      case FormulaKind::kFalse:
        r = false;
        break;
      case FormulaKind::kProp:
        r = graph_.state(sid).prop(f.prop);
        break;
      case FormulaKind::kInitial:
        r = sid == graph_.initial_id();
        break;
      case FormulaKind::kTerminal:
        r = graph_.terminal(sid);
        break;
      case FormulaKind::kLegal: {
        check_agent(f.agent);
        const auto& acts =
            graph_.legal(sid)[static_cast<std::size_t>(f.agent - 1)];
        r = std::find(acts.begin(), acts.end(), *f.tree) != acts.end();
        break;
      }
      case FormulaKind::kDoes: {
        check_agent(f.agent);
        const ModelGraph::Transition* tr = run.steps[off];
        const auto& acts =
            graph_.legal(run.ids[off])[static_cast<std::size_t>(f.agent - 1)];
        const BidTree& played = acts[static_cast<std::size_t>(
            tr->action_index[static_cast<std::size_t>(f.agent - 1)])];
        r = played == *f.tree;
        break;
      }
      case FormulaKind::kRest:
        r = check_restriction(f.agent, *f.tree, f.restriction, model_.goods());
        break;
      case FormulaKind::kCmp: {
        const State& w = graph_.state(sid);
        Int a = eval_term_impl(model_, w, f.terms[0], budget_, &wd_);
        Int b = eval_term_impl(model_, w, f.terms[1], budget_, &wd_);
        r = compare(f.cmp, a, b);
        break;
      }
      case FormulaKind::kNot:
        r = !eval(f.children[0], run, off);
        break;
      case FormulaKind::kAnd:
        r = true;
        for (const Formula& c : f.children)
          if (!eval(c, run, off)) {
            r = false;
            break;
          }
        break;
      case FormulaKind::kOr:
        r = false;
        for (const Formula& c : f.children)
          if (eval(c, run, off)) {
            r = true;
            break;
          }
        break;
      case FormulaKind::kImplies:
        r = !eval(f.children[0], run, off) || eval(f.children[1], run, off);
        break;
      case FormulaKind::kIff:
        r = eval(f.children[0], run, off) == eval(f.children[1], run, off);
        break;
      case FormulaKind::kNext:
        r = eval(f.children[0], run, off + 1);
        break;
    }
    if (local) memo_[&f][static_cast<std::size_t>(sid)] = r ? 2 : 1;
    return r;
  }

  bool state_local(const Formula& f) {
    auto it = local_.find(&f);
    if (it != local_.end()) return it->second;
    Need n = need_of(f);
    bool local = n.state == 0 && n.action < 0;
    local_.emplace(&f, local);
    return local;
  }

  void check_agent(Agent i) const {
    if (i < 1 || i > model_.agents())
      throw EvalError("formula refers to agent " + std::to_string(i) +
                      " outside the model");
  }

  const StModel& model_;
  const ModelGraph& graph_;
  std::size_t budget_;
  WdCache wd_;
  std::unordered_map<const Formula*, std::vector<std::int8_t>> memo_;
  std::unordered_map<const Formula*, bool> local_;
  std::size_t evals_ = 0;
};

}  // namespace

std::vector<Verdict> check_formulas(const StModel& model,
                                    const std::vector<Formula>& formulas,
                                    std::size_t horizon, std::size_t cap,
                                    std::size_t solver_budget) {
  std::size_t lookahead = 4;
  for (const Formula& f : formulas)
    lookahead = std::max(lookahead, run_length(f));
  ModelGraph graph(model, horizon, 1u << 22, lookahead);
  std::size_t n_paths = graph.path_count(cap);
  if (n_paths >= cap)
    throw BudgetError("path cap exceeded: at least " + std::to_string(n_paths) +
                      " path prefixes at horizon " + std::to_string(horizon));
  Checker checker(model, graph, solver_budget);
  std::vector<Verdict> out;
  out.reserve(formulas.size());
  std::size_t seen = 0;
  for (const Formula& f : formulas) {
    Verdict v = checker.check(f, horizon);
    v.stats.states_explored = graph.state_count();
    v.stats.evaluations = checker.evaluations() - seen;
    seen = checker.evaluations();
    v.stats.path_count = n_paths;
    v.stats.complete_coverage = graph.all_paths_terminate();
    out.push_back(std::move(v));
  }
  return out;
}

Verdict globally_true(const StModel& model, const Formula& f,
                      std::size_t horizon, std::size_t cap,
                      std::size_t solver_budget) {
  return check_formulas(model, {f}, horizon, cap, solver_budget)[0];
}

// ---------------------------------------------------------------------------
// Surface syntax.

namespace {

enum class Tok {
  kEnd,
  kInt,
  kIdent,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kComma,
  kSemi,
  kLt,     // <
  kGt,     // >
  kEq,     // =
  kLe,     // <=
  kGe,     // >=
  kNe,     // !=
  kArrow,  // ->
  kIff,    // <->
};

struct Token {
  Tok kind = Tok::kEnd;
  Int number = 0;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, 1, static_cast<int>(tok_.pos) + 1);
  }

  Token expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    return take();
  }

 private:
  void advance() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    tok_ = Token{};
    tok_.pos = pos_;
    if (pos_ >= text_.size()) {
      tok_.kind = Tok::kEnd;
      return;
    }
    char c = text_[pos_];
    auto starts_digit = [&](std::size_t at) {
      return at < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[at]));
    };
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && starts_digit(pos_ + 1))) {
      std::size_t end = pos_ + 1;
      while (starts_digit(end)) ++end;
      tok_.kind = Tok::kInt;
      try {
        tok_.number = std::stoll(text_.substr(pos_, end - pos_));
      } catch (const std::out_of_range&) {
        throw ParseError("integer literal out of range", 1,
                         static_cast<int>(pos_) + 1);
      }
      pos_ = end;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_'))
        ++end;
      tok_.kind = Tok::kIdent;
      tok_.text = text_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    auto two = [&](char second) {
      return pos_ + 1 < text_.size() && text_[pos_ + 1] == second;
    };
    switch (c) {
      case '(': tok_.kind = Tok::kLParen; ++pos_; return;
      case ')': tok_.kind = Tok::kRParen; ++pos_; return;
      case '[': tok_.kind = Tok::kLBracket; ++pos_; return;
      case ']': tok_.kind = Tok::kRBracket; ++pos_; return;
      case ',': tok_.kind = Tok::kComma; ++pos_; return;
      case ';': tok_.kind = Tok::kSemi; ++pos_; return;
      case '=': tok_.kind = Tok::kEq; ++pos_; return;
      case '<':
        if (two('-') && pos_ + 2 < text_.size() && text_[pos_ + 2] == '>') {
          tok_.kind = Tok::kIff;
          pos_ += 3;
        } else if (two('=')) {
          tok_.kind = Tok::kLe;
          pos_ += 2;
        } else {
          tok_.kind = Tok::kLt;
          ++pos_;
        }
        return;
      case '>':
        if (two('=')) {
          tok_.kind = Tok::kGe;
          pos_ += 2;
        } else {
          tok_.kind = Tok::kGt;
          ++pos_;
        }
        return;
      case '-':
        if (two('>')) {
          tok_.kind = Tok::kArrow;
          pos_ += 2;
          return;
        }
        throw ParseError("stray '-'", 1, static_cast<int>(pos_) + 1);
      case '!':
        if (two('=')) {
          tok_.kind = Tok::kNe;
          pos_ += 2;
          return;
        }
        throw ParseError("stray '!'", 1, static_cast<int>(pos_) + 1);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", 1,
                         static_cast<int>(pos_) + 1);
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  Token tok_;
};

// Splits trailing _<int> groups off an identifier: "win_1_2" -> ("win",
// {1, 2}); only splits groups that are pure digits.
std::pair<std::string, std::vector<int>> split_indices(const std::string& id) {
  std::vector<int> indices;
  std::string base = id;
  while (true) {
    std::size_t us = base.rfind('_');
    if (us == std::string::npos || us == 0 || us + 1 >= base.size()) break;
    bool digits = true;
    for (std::size_t k = us + 1; k < base.size(); ++k)
      if (!std::isdigit(static_cast<unsigned char>(base[k]))) digits = false;
    if (!digits) break;
    indices.insert(indices.begin(), std::stoi(base.substr(us + 1)));
    base.erase(us);
  }
  return {base, indices};
}

class Parser {
 public:
  Parser(const std::string& text, const std::map<std::string, Good>* names)
      : lex_(text), names_(names) {}

  Formula formula() {
    Formula f = parse_iff();
    if (lex_.peek().kind != Tok::kEnd) lex_.fail("trailing input");
    return f;
  }

  Term term() {
    Term z = parse_term();
    if (lex_.peek().kind != Tok::kEnd) lex_.fail("trailing input");
    return z;
  }

 private:
  // --- goods and trees over the shared token stream ---

  Good parse_good() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::kInt) {
      Int g = lex_.take().number;
      if (g < 1) lex_.fail("goods are numbered from 1");
      return static_cast<Good>(g);
    }
    if (t.kind == Tok::kIdent) {
      std::string name = lex_.take().text;
      if (names_) {
        auto it = names_->find(name);
        if (it == names_->end()) lex_.fail("unknown good '" + name + "'");
        return it->second;
      }
      if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'z')
        return static_cast<Good>(name[0] - 'a' + 1);
      lex_.fail("unknown good '" + name + "'");
    }
    lex_.fail("expected a good");
  }

  BidTree parse_tree() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::kLt) {
      lex_.take();
      Int q = lex_.expect(Tok::kInt, "a quantity").number;
      lex_.expect(Tok::kComma, "','");
      Good g = parse_good();
      lex_.expect(Tok::kComma, "','");
      Int v = lex_.expect(Tok::kInt, "a value").number;
      lex_.expect(Tok::kGt, "'>'");
      return BidTree::leaf(q, g, v);
    }
    if (t.kind != Tok::kIdent) lex_.fail("expected a bid tree");
    std::string head = lex_.take().text;
    std::optional<Int> min_sat, max_sat;
    if (head == "IC") {
      lex_.expect(Tok::kLBracket, "'['");
      min_sat = lex_.expect(Tok::kInt, "a child-count bound").number;
      lex_.expect(Tok::kComma, "','");
      max_sat = lex_.expect(Tok::kInt, "a child-count bound").number;
      lex_.expect(Tok::kRBracket, "']'");
    } else if (head != "XOR" && head != "AND" && head != "OR") {
      lex_.fail("expected a bid tree");
    }
    lex_.expect(Tok::kLParen, "'('");
    bool wrapped = lex_.peek().kind == Tok::kLParen;
    if (wrapped) lex_.take();
    std::vector<BidTree> children;
    children.push_back(parse_tree());
    while (lex_.peek().kind == Tok::kComma) {
      lex_.take();
      children.push_back(parse_tree());
    }
    if (wrapped) lex_.expect(Tok::kRParen, "')'");
    lex_.expect(Tok::kSemi, "';'");
    Int v = lex_.expect(Tok::kInt, "a value").number;
    lex_.expect(Tok::kRParen, "')'");
    try {
      if (head == "IC") return BidTree::ic(*min_sat, *max_sat, children, v);
      if (head == "XOR") return BidTree::xor_of(children, v);
      if (head == "AND") return BidTree::and_of(children, v);
      return BidTree::or_of(children, v);
    } catch (const InputError& e) {
      lex_.fail(e.what());
    }
  }

  // --- terms ---

  std::vector<Term> term_list(std::size_t at_least) {
    std::vector<Term> out;
    out.push_back(parse_term());
    while (lex_.peek().kind == Tok::kComma) {
      lex_.take();
      out.push_back(parse_term());
    }
    if (out.size() < at_least) lex_.fail("too few arguments");
    return out;
  }

  Term parse_term() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::kInt) return t_const(lex_.take().number);
    if (t.kind != Tok::kIdent) lex_.fail("expected a term");
    std::string id = lex_.take().text;
    bool call = lex_.peek().kind == Tok::kLParen;
    if (call && (id == "add" || id == "min" || id == "max" || id == "times")) {
      lex_.take();
      std::vector<Term> args = term_list(2);
      lex_.expect(Tok::kRParen, "')'");
      if (id == "add") return t_add(std::move(args));
      if (id == "min") return t_min(std::move(args));
      if (id == "max") return t_max(std::move(args));
      return t_times(std::move(args));
    }
    if (call && id == "sub") {
      lex_.take();
      std::vector<Term> args = term_list(2);
      if (args.size() != 2) lex_.fail("sub takes exactly two arguments");
      lex_.expect(Tok::kRParen, "')'");
      return t_sub(std::move(args[0]), std::move(args[1]));
    }
    auto [base, indices] = split_indices(id);
    if (call && base == "win" && indices.size() == 2) {
      lex_.take();
      std::vector<BidTree> bids;
      bids.push_back(parse_tree());
      while (lex_.peek().kind == Tok::kComma) {
        lex_.take();
        bids.push_back(parse_tree());
      }
      lex_.expect(Tok::kSemi, "';'");
      std::vector<Term> alloc = term_list(1);
      lex_.expect(Tok::kRParen, "')'");
      return t_win(indices[0], indices[1], std::move(bids), std::move(alloc));
    }
    if (call && base == "value" && indices.size() == 1) {
      lex_.take();
      BidTree tree = parse_tree();
      if (lex_.peek().kind == Tok::kSemi) {
        lex_.take();
        std::vector<Term> trade = term_list(1);
        lex_.expect(Tok::kRParen, "')'");
        return t_value_at(indices[0], std::move(tree), std::move(trade));
      }
      lex_.expect(Tok::kRParen, "')'");
      return t_value(indices[0], std::move(tree));
    }
    if (call && base == "qtd" && indices.size() == 1) {
      lex_.take();
      BidTree tree = parse_tree();
      lex_.expect(Tok::kComma, "','");
      Good j = parse_good();
      lex_.expect(Tok::kRParen, "')'");
      return t_qtd(indices[0], std::move(tree), j);
    }
    if (call) lex_.fail("unknown function '" + id + "'");
    return t_var(id);
  }

  // --- formulas ---

  Formula parse_iff() {
    Formula f = parse_implies();
    while (lex_.peek().kind == Tok::kIff) {
      lex_.take();
      f = f_iff(std::move(f), parse_implies());
    }
    return f;
  }

  Formula parse_implies() {
    Formula f = parse_or();
    if (lex_.peek().kind == Tok::kArrow) {
      lex_.take();
      return f_implies(std::move(f), parse_implies());  // right-assoc
    }
    return f;
  }

  Formula parse_or() {
    std::vector<Formula> fs;
    fs.push_back(parse_and());
    while (lex_.peek().kind == Tok::kIdent && lex_.peek().text == "or") {
      lex_.take();
      fs.push_back(parse_and());
    }
    return f_or(std::move(fs));
  }

  Formula parse_and() {
    std::vector<Formula> fs;
    fs.push_back(parse_unary());
    while (lex_.peek().kind == Tok::kIdent && lex_.peek().text == "and") {
      lex_.take();
      fs.push_back(parse_unary());
    }
    return f_and(std::move(fs));
  }

  Formula parse_unary() {
    if (lex_.peek().kind == Tok::kIdent) {
      if (lex_.peek().text == "not") {
        lex_.take();
        return f_not(parse_unary());
      }
      if (lex_.peek().text == "next") {
        lex_.take();
        return f_next(parse_unary());
      }
    }
    return parse_primary();
  }

  Formula parse_primary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::kLParen) {
      lex_.take();
      Formula f = parse_iff();
      lex_.expect(Tok::kRParen, "')'");
      return f;
    }
    if (t.kind == Tok::kIdent) {
      const std::string& id = t.text;
      if (id == "true") {
        lex_.take();
        return f_true();
      }
      if (id == "false") {
        lex_.take();
        return f_false();
      }
      if (id == "initial") {
        lex_.take();
        return f_initial();
      }
      if (id == "terminal") {
        lex_.take();
        return f_terminal();
      }
      auto [base, indices] = split_indices(id);
      if ((base == "legal" || base == "does" || base == "rest") &&
          indices.size() == 1) {
        std::string head = base;
        Agent agent = indices[0];
        lex_.take();
        lex_.expect(Tok::kLParen, "'('");
        if (head == "rest") {
          std::string rname = lex_.expect(Tok::kIdent, "a restriction").text;
          std::optional<Restriction> r = restriction_from_string(rname);
          if (!r) lex_.fail("unknown restriction '" + rname + "'");
          lex_.expect(Tok::kComma, "','");
          BidTree tree = parse_tree();
          lex_.expect(Tok::kRParen, "')'");
          return f_rest(agent, *r, std::move(tree));
        }
        BidTree tree = parse_tree();
        lex_.expect(Tok::kRParen, "')'");
        if (head == "legal") return f_legal(agent, std::move(tree));
        return f_does(agent, std::move(tree));
      }
    }
    return parse_comparison();
  }

  Formula parse_comparison() {
    Term a = parse_term();
    switch (lex_.peek().kind) {
      case Tok::kLt:
        lex_.take();
        return f_cmp(CmpOp::kLt, std::move(a), parse_term());
      case Tok::kGt:
        lex_.take();
        return f_cmp(CmpOp::kGt, std::move(a), parse_term());
      case Tok::kEq:
        lex_.take();
        return f_cmp(CmpOp::kEq, std::move(a), parse_term());
      case Tok::kLe: {
        lex_.take();
        Term b = parse_term();
        return f_or({f_cmp(CmpOp::kLt, a, b), f_cmp(CmpOp::kEq, a, b)});
      }
      case Tok::kGe: {
        lex_.take();
        Term b = parse_term();
        return f_or({f_cmp(CmpOp::kGt, a, b), f_cmp(CmpOp::kEq, a, b)});
      }
      case Tok::kNe: {
        lex_.take();
        Term b = parse_term();
        return f_or({f_cmp(CmpOp::kLt, a, b), f_cmp(CmpOp::kGt, a, b)});
      }
      default:
        // A bare identifier with no comparison is a proposition.
        if (a.kind == TermKind::kVariable) return f_prop(a.variable);
        lex_.fail("expected a comparison");
    }
  }

  Lexer lex_;
  const std::map<std::string, Good>* names_;
};

}  // namespace

Formula parse_formula(const std::string& text,
                      const std::map<std::string, Good>* good_names) {
  return Parser(text, good_names).formula();
}

Term parse_term(const std::string& text,
                const std::map<std::string, Good>* good_names) {
  return Parser(text, good_names).term();
}

// ---------------------------------------------------------------------------
// Printing.

namespace {

void print_term_rec(const Term& z, const std::map<Good, std::string>* names,
                    std::ostream& os) {
  auto good_str = [&](Good g) {
    if (names) {
      auto it = names->find(g);
      if (it != names->end()) return it->second;
    }
    return std::to_string(g);
  };
  auto args2 = [&](const char* head) {
    os << head << "(";
    print_term_rec(z.args[0], names, os);
    os << ", ";
    print_term_rec(z.args[1], names, os);
    os << ")";
  };
  switch (z.kind) {
    case TermKind::kConstant:
      os << z.constant;
      return;
    case TermKind::kVariable:
      os << z.variable;
      return;
    case TermKind::kAdd:
      args2("add");
      return;
    case TermKind::kSub:
      args2("sub");
      return;
    case TermKind::kMin:
      args2("min");
      return;
    case TermKind::kMax:
      args2("max");
      return;
    case TermKind::kTimes:
      args2("times");
      return;
    case TermKind::kWin: {
      os << "win_" << z.agent << "_" << z.good << "(";
      for (std::size_t k = 0; k < z.trees.size(); ++k) {
        if (k) os << ", ";
        os << print_bid_tree(z.trees[k], names);
      }
      os << "; ";
      for (std::size_t k = 0; k < z.args.size(); ++k) {
        if (k) os << ", ";
        print_term_rec(z.args[k], names, os);
      }
      os << ")";
      return;
    }
    case TermKind::kValue: {
      os << "value_" << z.agent << "(" << print_bid_tree(z.trees[0], names);
      if (!z.args.empty()) {
        os << "; ";
        for (std::size_t k = 0; k < z.args.size(); ++k) {
          if (k) os << ", ";
          print_term_rec(z.args[k], names, os);
        }
      }
      os << ")";
      return;
    }
    case TermKind::kQtd:
      os << "qtd_" << z.agent << "(" << print_bid_tree(z.trees[0], names)
         << ", " << good_str(z.good) << ")";
      return;
  }
}

// Precedence: iff 1, implies 2, or 3, and 4, not/next 5, atoms 6.
int precedence(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::kIff:
      return 1;
    case FormulaKind::kImplies:
      return 2;
    case FormulaKind::kOr:
      return 3;
    case FormulaKind::kAnd:
      return 4;
    case FormulaKind::kNot:
    case FormulaKind::kNext:
      return 5;
    default:
      return 6;
  }
}

void print_formula_rec(const Formula& f,
                       const std::map<Good, std::string>* names, int min_prec,
                       std::ostream& os) {
  int prec = precedence(f);
  bool paren = prec < min_prec;
  if (paren) os << "(";
  switch (f.kind) {
    case FormulaKind::kTrue:
      os << "true";
      break;
    case FormulaKind::kFalse:
      os << "false";
      break;
    case FormulaKind::kProp:
      os << f.prop;
      break;
    case FormulaKind::kInitial:
      os << "initial";
      break;
    case FormulaKind::kTerminal:
      os << "terminal";
      break;
    case FormulaKind::kLegal:
      os << "legal_" << f.agent << "(" << print_bid_tree(*f.tree, names) << ")";
      break;
    case FormulaKind::kDoes:
      os << "does_" << f.agent << "(" << print_bid_tree(*f.tree, names) << ")";
      break;
    case FormulaKind::kRest:
      os << "rest_" << f.agent << "(" << restriction_name(f.restriction)
         << ", " << print_bid_tree(*f.tree, names) << ")";
      break;
    case FormulaKind::kCmp: {
      print_term_rec(f.terms[0], names, os);
      os << (f.cmp == CmpOp::kLt ? " < " : f.cmp == CmpOp::kGt ? " > " : " = ");
      print_term_rec(f.terms[1], names, os);
      break;
    }
    case FormulaKind::kNot:
      os << "not ";
      print_formula_rec(f.children[0], names, 5, os);
      break;
    case FormulaKind::kNext:
      os << "next ";
      print_formula_rec(f.children[0], names, 5, os);
      break;
    case FormulaKind::kAnd:
      for (std::size_t k = 0; k < f.children.size(); ++k) {
        if (k) os << " and ";
        print_formula_rec(f.children[k], names, 5, os);
      }
      break;
    case FormulaKind::kOr:
      for (std::size_t k = 0; k < f.children.size(); ++k) {
        if (k) os << " or ";
        print_formula_rec(f.children[k], names, 4, os);
      }
      break;
    case FormulaKind::kImplies:
      print_formula_rec(f.children[0], names, 3, os);
      os << " -> ";
      print_formula_rec(f.children[1], names, 2, os);
      break;
    case FormulaKind::kIff:
      print_formula_rec(f.children[0], names, 2, os);
      os << " <-> ";
      print_formula_rec(f.children[1], names, 2, os);
      break;
  }
  if (paren) os << ")";
}

}  // namespace

std::string print_term(const Term& z,
                       const std::map<Good, std::string>* good_names) {
  std::ostringstream os;
  print_term_rec(z, good_names, os);
  return os.str();
}

std::string print_formula(const Formula& f,
                          const std::map<Good, std::string>* good_names) {
  std::ostringstream os;
  print_formula_rec(f, good_names, 0, os);
  return os.str();
}

}  // namespace cedl
