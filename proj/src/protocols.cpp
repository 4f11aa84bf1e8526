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

#include "cedl/protocols.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cedl/wd.hpp"

namespace cedl {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InputError(message);
}

void require_valid_signature(const AuctionSignature& sig) {
  const std::vector<std::string> errors = validate_signature(sig);
  if (errors.empty()) return;
  std::string joined;
  for (const auto& e : errors) {
    if (!joined.empty()) joined += "; ";
    joined += e;
  }
  throw InputError("invalid signature: " + joined);
}

void append_missing(std::vector<std::string>& dst,
                    const std::vector<std::string>& add) {
  for (const auto& s : add)
    if (std::find(dst.begin(), dst.end(), s) == dst.end()) dst.push_back(s);
}

// Every value of the range, in order.
std::vector<Int> full_grid(const IntRange& r) {
  std::vector<Int> out;
  for (Int v = r.min_value; v <= r.max_value; ++v) out.push_back(v);
  return out;
}

// Every value of a small range; endpoints, zero and an even sample of a
// large one.
std::vector<Int> grid_over(const IntRange& r, std::size_t limit = 64) {
  std::vector<Int> out;
  if (r.size() <= static_cast<Int>(limit)) {
    for (Int v = r.min_value; v <= r.max_value; ++v) out.push_back(v);
    return out;
  }
  std::set<Int> keep = {r.min_value, r.max_value};
  if (r.contains(0)) keep.insert(0);
  const Int step = std::max<Int>(1, r.size() / static_cast<Int>(limit - 2));
  for (Int v = r.min_value; v <= r.max_value; v += step) keep.insert(v);
  return {keep.begin(), keep.end()};
}

// Calls visit with every profile from options[0] x ... x options[k-1], in
// lexicographic order of the index vector.
template <typename T, typename Visit>
void product(const std::vector<std::vector<T>>& options, Visit visit) {
  for (const auto& o : options)
    if (o.empty()) return;
  std::vector<std::size_t> idx(options.size(), 0);
  for (;;) {
    std::vector<T> pick;
    pick.reserve(options.size());
    for (std::size_t k = 0; k < options.size(); ++k)
      pick.push_back(options[k][idx[k]]);
    visit(pick);
    std::size_t k = options.size();
    while (k > 0 && ++idx[k - 1] == options[k - 1].size()) idx[--k] = 0;
    if (k == 0) return;
  }
}

// One-shot exchange model. The single bidding round solves winner
// determination against the endowment; afterwards the state loops.
class CeModel : public StModel {
 public:
  CeModel(CeInstance inst, bool vcg, std::size_t solver_budget)
      : inst_(std::move(inst)), vcg_(vcg), solver_budget_(solver_budget) {
    validate_instance(inst_);
    sig_ = inst_.signature;
    append_missing(sig_.propositions, {"bidRound"});
    append_missing(sig_.variables,
                   predefined_variables(sig_.agents, sig_.goods));
    initial_.set_prop("bidRound", true);
    for (Agent i = 1; i <= sig_.agents; ++i) {
      initial_.set_var(payment_var(i), 0);
      for (Good j = 1; j <= sig_.goods; ++j) {
        initial_.set_var(alloc_var(i, j), inst_.initial_allocation.at(i, j));
        initial_.set_var(trade_var(i, j), 0);
      }
    }
  }

  const AuctionSignature& signature() const override { return sig_; }
  State initial_state() const override { return initial_; }

  bool is_terminal(const State& w) const override {
    return !w.prop("bidRound");
  }

  std::vector<BidTree> legal_actions(const State& w, Agent i) const override {
    require(i >= 1 && i <= sig_.agents,
            "agent " + std::to_string(i) + " out of range");
    if (is_terminal(w)) return {noop()};
    return sig_.actions;
  }

  State update(const State& w, const JointAction& d) const override {
    if (is_terminal(w)) return w;
    require(static_cast<int>(d.size()) == sig_.agents,
            "joint action holds " + std::to_string(d.size()) +
                " bids for " + std::to_string(sig_.agents) + " agents");
    IntMatrix alloc(sig_.agents, sig_.goods);
    for (Agent i = 1; i <= sig_.agents; ++i)
      for (Good j = 1; j <= sig_.goods; ++j)
        alloc.at(i, j) = w.var(alloc_var(i, j));
    const WdSolution sol = solve_wd(d, alloc, sig_, solver_budget_);
    State next = w;
    next.set_prop("bidRound", false);
    for (Agent i = 1; i <= sig_.agents; ++i) {
      for (Good j = 1; j <= sig_.goods; ++j) {
        next.set_var(trade_var(i, j), sol.trade.at(i, j));
        next.set_var(alloc_var(i, j),
                     checked_add(alloc.at(i, j), sol.trade.at(i, j)));
      }
      Int payment = 0;
      if (vcg_) {
        payment = vcg_payment(d, alloc, i, sig_, solver_budget_);
      } else {
        const auto tv = trade_value(d[static_cast<std::size_t>(i - 1)],
                                    sol.trade.row(i), solver_budget_);
        if (!tv)
          throw EvalError("winner determination returned a trade that is "
                          "infeasible for agent " + std::to_string(i));
        payment = tv->value;
      }
      next.set_var(payment_var(i), payment);
    }
    return next;
  }

  std::string name() const override { return vcg_ ? "vcg" : "ce"; }
  std::size_t default_horizon() const override { return 2; }

 private:
  CeInstance inst_;
  bool vcg_ = false;
  std::size_t solver_budget_;
  AuctionSignature sig_;
  State initial_;
};

// Simultaneous ascending auction model. Prices rise by a fixed increment;
// a good is sold once exactly one agent bids on it, and its price freezes.
class SaaModel : public StModel {
 public:
  explicit SaaModel(SaaInstance inst) : inst_(std::move(inst)) {
    validate_instance(inst_);
    sig_ = inst_.signature;
    std::vector<std::string> props;
    for (Good j = 1; j <= sig_.goods; ++j) props.push_back(saa_sold_prop(j));
    for (Agent i = 1; i <= sig_.agents; ++i)
      for (Good j = 1; j <= sig_.goods; ++j)
        props.push_back(saa_bid_prop(i, j));
    append_missing(sig_.propositions, props);
    std::vector<std::string> vars =
        predefined_variables(sig_.agents, sig_.goods);
    vars.push_back("price");
    for (Good j = 1; j <= sig_.goods; ++j) vars.push_back(saa_price_var(j));
    append_missing(sig_.variables, vars);
    initial_.set_var("price", inst_.start);
    for (Good j = 1; j <= sig_.goods; ++j)
      initial_.set_var(saa_price_var(j), inst_.start);
    for (Agent i = 1; i <= sig_.agents; ++i) {
      initial_.set_var(payment_var(i), 0);
      for (Good j = 1; j <= sig_.goods; ++j) {
        initial_.set_var(alloc_var(i, j), 0);
        initial_.set_var(trade_var(i, j), 0);
      }
    }
  }

  const AuctionSignature& signature() const override { return sig_; }
  State initial_state() const override { return initial_; }

  bool is_terminal(const State& w) const override {
    if (w == initial_) return false;
    for (Good j = 1; j <= sig_.goods; ++j) {
      if (w.prop(saa_sold_prop(j))) continue;
      for (Agent i = 1; i <= sig_.agents; ++i)
        if (w.prop(saa_bid_prop(i, j))) return false;
    }
    return true;
  }

  // Per good, an agent may offer 0 when it does not hold the good, the
  // current clock price while the good is unsold, or the frozen selling
  // price of a good it won. Offers must stay below max - increment.
  std::vector<BidTree> legal_actions(const State& w, Agent i) const override {
    require(i >= 1 && i <= sig_.agents,
            "agent " + std::to_string(i) + " out of range");
    const Int limit = sig_.range.max_value - inst_.increment;
    const Int clock = w.var("price");
    std::vector<std::vector<Int>> options(
        static_cast<std::size_t>(sig_.goods));
    for (Good j = 1; j <= sig_.goods; ++j) {
      std::set<Int> o;
      const bool sold = w.prop(saa_sold_prop(j));
      const Int held = w.var(trade_var(i, j));
      if (held == 0 && limit >= 1) o.insert(0);
      if (!sold && clock >= 0 && clock < limit) o.insert(clock);
      const Int frozen = w.var(saa_price_var(j));
      if (held == 1 && frozen >= 0 && frozen < limit) o.insert(frozen);
      options[static_cast<std::size_t>(j - 1)] = {o.begin(), o.end()};
    }
    std::vector<BidTree> actions;
    product<Int>(options, [&](const std::vector<Int>& prices) {
      actions.push_back(saa_bid(prices));
    });
    return actions;
  }

  State update(const State& w, const JointAction& d) const override {
    if (is_terminal(w)) return w;
    require(static_cast<int>(d.size()) == sig_.agents,
            "joint action holds " + std::to_string(d.size()) +
                " bids for " + std::to_string(sig_.agents) + " agents");
    const int n = sig_.agents;
    const int m = sig_.goods;
    std::vector<std::vector<Int>> offer(static_cast<std::size_t>(n));
    for (Agent i = 1; i <= n; ++i) {
      auto prices = saa_bid_prices(d[static_cast<std::size_t>(i - 1)], m);
      if (!prices)
        throw IllegalActionError(
            i, "the bid is not a per-good price vector");
      offer[static_cast<std::size_t>(i - 1)] = std::move(*prices);
    }
    const auto bids_on = [&](Agent i, Good j) {
      return offer[static_cast<std::size_t>(i - 1)]
                  [static_cast<std::size_t>(j - 1)] != 0;
    };
    IntMatrix next_trade(n, m);
    for (Good j = 1; j <= m; ++j) {
      for (Agent i = 1; i <= n; ++i) {
        if (!bids_on(i, j)) continue;
        bool solo = true;
        for (Agent r = 1; r <= n; ++r)
          if (r != i && bids_on(r, j)) solo = false;
        if (solo) next_trade.at(i, j) = 1;
      }
    }
    State next = w;
    std::vector<bool> next_sold(static_cast<std::size_t>(m), false);
    bool terminal = true;
    for (Good j = 1; j <= m; ++j) {
      bool sold = false;
      for (Agent i = 1; i <= n; ++i) sold = sold || next_trade.at(i, j) == 1;
      next_sold[static_cast<std::size_t>(j - 1)] = sold;
      if (!sold)
        for (Agent i = 1; i <= n; ++i) terminal = terminal && !bids_on(i, j);
    }
    const Int clock = checked_add(w.var("price"), inst_.increment);
    if (!sig_.range.contains(clock))
      throw EvalError("price clock left the declared range");
    next.set_var("price", clock);
    std::vector<Int> good_price(static_cast<std::size_t>(m));
    for (Good j = 1; j <= m; ++j) {
      Int p = w.var(saa_price_var(j));
      if (!next_sold[static_cast<std::size_t>(j - 1)])
        p = checked_add(p, inst_.increment);
      good_price[static_cast<std::size_t>(j - 1)] = p;
      next.set_var(saa_price_var(j), p);
      next.set_prop(saa_sold_prop(j),
                    next_sold[static_cast<std::size_t>(j - 1)]);
    }
    for (Agent i = 1; i <= n; ++i) {
      Int payment = 0;
      for (Good j = 1; j <= m; ++j) {
        next.set_prop(saa_bid_prop(i, j), bids_on(i, j));
        next.set_var(trade_var(i, j), next_trade.at(i, j));
        next.set_var(alloc_var(i, j), terminal ? next_trade.at(i, j) : 0);
        payment = checked_add(
            payment, checked_mul(good_price[static_cast<std::size_t>(j - 1)],
                                 next_trade.at(i, j)));
      }
      next.set_var(payment_var(i), payment);
    }
    return next;
  }

  std::string name() const override { return "saa"; }

  std::size_t default_horizon() const override {
    const Int span = sig_.range.max_value - inst_.start;
    const Int rounds = span / inst_.increment + 2;
    return static_cast<std::size_t>(std::max<Int>(rounds, 2));
  }

 private:
  SaaInstance inst_;
  AuctionSignature sig_;
  State initial_;
};

// Accumulates rules under a hard instantiation budget.
class RuleSink {
 public:
  explicit RuleSink(std::size_t max_rules) : max_rules_(max_rules) {}

  void add(const std::string& name, Formula f) {
    if (rules_.size() >= max_rules_)
      throw BudgetError("rule instantiation exceeds the budget of " +
                        std::to_string(max_rules_) + " formulas");
    rules_.push_back(Rule{name, std::move(f)});
  }

  std::vector<Rule> take() { return std::move(rules_); }

 private:
  std::size_t max_rules_;
  std::vector<Rule> rules_;
};

Formula loop_rule(const std::string& var, Int x) {
  return f_implies(
      f_and({f_terminal(), f_eq(t_var(var), t_const(x))}),
      f_next(f_eq(t_var(var), t_const(x))));
}

// Exchange rules shared by the plain and the VCG variant; `vcg` selects
// the payment family.
std::vector<Rule> ruleset_exchange(const CeInstance& instance, bool vcg,
                                   bool full_range, std::size_t max_rules) {
  validate_instance(instance);
  const AuctionSignature& sig = instance.signature;
  const int n = sig.agents;
  const int m = sig.goods;
  const std::vector<BidTree>& acts = sig.actions;
  const std::vector<Int> grid =
      full_range ? full_grid(sig.range) : grid_over(sig.range);
  RuleSink out(max_rules);

  {
    std::vector<Formula> parts;
    parts.push_back(f_prop("bidRound"));
    for (Agent i = 1; i <= n; ++i)
      parts.push_back(f_eq(t_var(payment_var(i)), t_const(0)));
    for (Agent i = 1; i <= n; ++i)
      for (Good j = 1; j <= m; ++j)
        parts.push_back(f_eq(t_var(trade_var(i, j)), t_const(0)));
    out.add("ce:initial", f_implies(f_initial(), f_and(parts)));
  }
  out.add("ce:terminal", f_iff(f_terminal(), f_not(f_initial())));
  for (Agent i = 1; i <= n; ++i)
    out.add("ce:legal-terminal",
            f_implies(f_terminal(), f_legal(i, noop())));
  for (Agent i = 1; i <= n; ++i)
    for (const BidTree& a : acts)
      out.add("ce:legal-initial", f_implies(f_initial(), f_legal(i, a)));

  // Endowments as constants, agent-major.
  std::vector<Term> endow;
  for (Agent i = 1; i <= n; ++i)
    for (Good j = 1; j <= m; ++j)
      endow.push_back(t_const(instance.initial_allocation.at(i, j)));

  std::vector<std::vector<BidTree>> all_actions(
      static_cast<std::size_t>(n), acts);
  product<BidTree>(all_actions, [&](const std::vector<BidTree>& profile) {
    std::vector<Formula> ante;
    for (Agent i = 1; i <= n; ++i)
      ante.push_back(f_does(i, profile[static_cast<std::size_t>(i - 1)]));
    ante.push_back(f_initial());
    std::vector<Formula> post;
    for (Agent i = 1; i <= n; ++i)
      for (Good j = 1; j <= m; ++j)
        post.push_back(f_eq(t_var(trade_var(i, j)),
                            t_win(i, j, profile, endow)));
    out.add("ce:trade", f_implies(f_and(ante), f_next(f_and(post))));
  });

  if (!vcg) {
    for (Agent i = 1; i <= n; ++i) {
      std::vector<Term> row;
      for (Good j = 1; j <= m; ++j) row.push_back(t_var(trade_var(i, j)));
      for (const BidTree& a : acts)
        out.add("ce:payment",
                f_implies(f_and({f_does(i, a), f_initial()}),
                          f_next(f_eq(t_var(payment_var(i)),
                                      t_value_at(i, a, row)))));
    }
  } else {
    product<BidTree>(all_actions, [&](const std::vector<BidTree>& profile) {
      for (Agent i = 1; i <= n; ++i) {
        // Counterfactual profile: agent i withdraws, her endowment drops.
        std::vector<BidTree> alt = profile;
        alt[static_cast<std::size_t>(i - 1)] = noop();
        std::vector<Term> alt_endow = endow;
        for (Good j = 1; j <= m; ++j)
          alt_endow[static_cast<std::size_t>((i - 1) * m + (j - 1))] =
              t_const(0);
        const auto value_under = [&](Agent r,
                                     const std::vector<BidTree>& prof,
                                     const std::vector<Term>& base) {
          std::vector<Term> wins;
          for (Good j = 1; j <= m; ++j)
            wins.push_back(t_win(r, j, prof, base));
          return t_value_at(r, prof[static_cast<std::size_t>(r - 1)], wins);
        };
        std::vector<Term> losses;
        for (Agent r = 1; r <= n; ++r)
          losses.push_back(t_sub(value_under(r, profile, endow),
                                 value_under(r, alt, alt_endow)));
        const Term discount =
            losses.size() == 1 ? losses[0] : t_add(losses);
        const Term expr =
            t_sub(value_under(i, profile, endow), discount);
        std::vector<Formula> ante;
        for (Agent r = 1; r <= n; ++r)
          ante.push_back(f_does(r, profile[static_cast<std::size_t>(r - 1)]));
        ante.push_back(f_not(f_terminal()));
        for (Int p : grid) {
          std::vector<Formula> full = ante;
          full.push_back(f_eq(t_const(p), expr));
          out.add("vcg:payment",
                  f_implies(f_and(full),
                            f_next(f_eq(t_var(payment_var(i)), t_const(p)))));
        }
      }
    });
  }

  for (const std::string& y : predefined_variables(n, m))
    for (Int x : grid) out.add("ce:loop", loop_rule(y, x));

  for (Agent i = 1; i <= n; ++i)
    for (Good j = 1; j <= m; ++j)
      out.add("ce:alloc",
              f_eq(t_var(alloc_var(i, j)),
                   t_add({t_const(instance.initial_allocation.at(i, j)),
                          t_var(trade_var(i, j))})));
  out.add("ce:bidround", f_next(f_not(f_prop("bidRound"))));
  return out.take();
}

}  // namespace

void validate_instance(const CeInstance& instance) {
  require_valid_signature(instance.signature);
  const AuctionSignature& sig = instance.signature;
  const IntMatrix& x = instance.initial_allocation;
  require(x.agents() == sig.agents && x.goods() == sig.goods,
          "initial allocation is " + std::to_string(x.agents()) + "x" +
              std::to_string(x.goods()) + ", expected " +
              std::to_string(sig.agents) + "x" + std::to_string(sig.goods));
  for (Agent i = 1; i <= sig.agents; ++i)
    for (Good j = 1; j <= sig.goods; ++j)
      require(x.at(i, j) >= 0 && x.at(i, j) <= sig.range.max_value,
              "initial allocation of agent " + std::to_string(i) +
                  " for good " + std::to_string(j) + " is outside [0, " +
                  std::to_string(sig.range.max_value) + "]");
}

void validate_instance(const SaaInstance& instance) {
  require_valid_signature(instance.signature);
  const AuctionSignature& sig = instance.signature;
  require(instance.increment >= 1, "price increment must be positive");
  require(instance.start >= 0 && instance.start <= sig.range.max_value,
          "start price is outside [0, " +
              std::to_string(sig.range.max_value) + "]");
  require(sig.range.max_value - instance.increment >= 1,
          "price range leaves no room for bids below max - increment");
}

std::unique_ptr<StModel> build_ce(const CeInstance& instance,
                                  std::size_t solver_budget) {
  return std::make_unique<CeModel>(instance, false, solver_budget);
}

std::unique_ptr<StModel> build_vcg(const CeInstance& instance,
                                   std::size_t solver_budget) {
  return std::make_unique<CeModel>(instance, true, solver_budget);
}

std::unique_ptr<StModel> build_saa(const SaaInstance& instance) {
  return std::make_unique<SaaModel>(instance);
}

BidTree saa_bid(const std::vector<Int>& prices) {
  require(!prices.empty(), "a price vector needs at least one good");
  std::vector<BidTree> leaves;
  for (std::size_t j = 0; j < prices.size(); ++j)
    leaves.push_back(
        BidTree::leaf(1, static_cast<Good>(j + 1), prices[j]));
  return BidTree::or_of(std::move(leaves), 0);
}

std::optional<std::vector<Int>> saa_bid_prices(const BidTree& tree,
                                               Good goods) {
  if (tree.is_leaf()) return std::nullopt;
  const BidNode& node = tree.as_node();
  if (node.value != 0 || node.min_sat != 1 ||
      node.max_sat != static_cast<Int>(node.children.size()))
    return std::nullopt;
  if (static_cast<Good>(node.children.size()) != goods) return std::nullopt;
  std::vector<Int> prices(static_cast<std::size_t>(goods));
  for (Good j = 1; j <= goods; ++j) {
    const BidTree& child = node.children[static_cast<std::size_t>(j - 1)];
    if (!child.is_leaf()) return std::nullopt;
    const BidLeaf& l = child.as_leaf();
    if (l.quantity != 1 || l.good != j) return std::nullopt;
    prices[static_cast<std::size_t>(j - 1)] = l.value;
  }
  return prices;
}

std::string saa_price_var(Good j) { return "price_" + std::to_string(j); }
std::string saa_sold_prop(Good j) { return "sold_" + std::to_string(j); }
std::string saa_bid_prop(Agent i, Good j) {
  return "bid_" + std::to_string(i) + "_" + std::to_string(j);
}

std::vector<Rule> ruleset_ce(const CeInstance& instance, bool full_range,
                             std::size_t max_rules) {
  return ruleset_exchange(instance, false, full_range, max_rules);
}

std::vector<Rule> ruleset_vcg(const CeInstance& instance, bool full_range,
                              std::size_t max_rules) {
  return ruleset_exchange(instance, true, full_range, max_rules);
}

std::vector<Rule> ruleset_saa(const SaaInstance& instance, bool full_range,
                              std::size_t max_rules) {
  validate_instance(instance);
  const AuctionSignature& sig = instance.signature;
  const int n = sig.agents;
  const int m = sig.goods;
  const Int start = instance.start;
  const Int inc = instance.increment;
  const Int zmax = sig.range.max_value;
  const Int limit = zmax - inc;
  RuleSink out(max_rules);

  // Clock prices the model can reach, and prices a bid may quote.
  std::vector<Int> clock_values;
  if (full_range) {
    for (Int v = 0; v <= zmax; ++v) clock_values.push_back(v);
  } else {
    for (Int v = start; v <= zmax; v = checked_add(v, inc))
      clock_values.push_back(v);
  }
  std::vector<Int> bid_prices;
  if (full_range) {
    for (Int v = 0; v < limit; ++v) bid_prices.push_back(v);
  } else {
    bid_prices.push_back(0);
    for (Int v = start; v < limit && v > 0; v = checked_add(v, inc))
      bid_prices.push_back(v);
    if (start == 0)
      for (Int v = inc; v < limit; v = checked_add(v, inc))
        bid_prices.push_back(v);
    std::sort(bid_prices.begin(), bid_prices.end());
    bid_prices.erase(std::unique(bid_prices.begin(), bid_prices.end()),
                     bid_prices.end());
  }

  {
    std::vector<Formula> parts;
    parts.push_back(f_eq(t_var("price"), t_const(start)));
    for (Good j = 1; j <= m; ++j) {
      parts.push_back(f_eq(t_var(saa_price_var(j)), t_const(start)));
      for (Agent i = 1; i <= n; ++i) {
        parts.push_back(f_not(f_prop(saa_bid_prop(i, j))));
        parts.push_back(f_eq(t_var(trade_var(i, j)), t_const(0)));
      }
    }
    out.add("sa:initial", f_iff(f_initial(), f_and(parts)));
  }

  for (Good j = 1; j <= m; ++j) {
    std::vector<Formula> holders;
    for (Agent i = 1; i <= n; ++i)
      holders.push_back(f_eq(t_var(trade_var(i, j)), t_const(1)));
    out.add("sa:sold", f_iff(f_prop(saa_sold_prop(j)), f_or(holders)));
  }

  {
    std::vector<Formula> parts;
    parts.push_back(f_not(f_initial()));
    for (Good j = 1; j <= m; ++j) {
      std::vector<Formula> silent;
      for (Agent i = 1; i <= n; ++i)
        silent.push_back(f_not(f_prop(saa_bid_prop(i, j))));
      parts.push_back(f_or({f_prop(saa_sold_prop(j)), f_and(silent)}));
    }
    out.add("sa:terminal", f_iff(f_terminal(), f_and(parts)));
  }

  for (Agent i = 1; i <= n; ++i) {
    for (Good j = 1; j <= m; ++j) {
      std::vector<Formula> wins;
      wins.push_back(f_prop(saa_bid_prop(i, j)));
      for (Agent r = 1; r <= n; ++r)
        if (r != i) wins.push_back(f_not(f_prop(saa_bid_prop(r, j))));
      out.add("sa:trade-won",
              f_next(f_iff(f_eq(t_var(trade_var(i, j)), t_const(1)),
                           f_and(wins))));
      out.add("sa:trade-none",
              f_next(f_iff(f_eq(t_var(trade_var(i, j)), t_const(0)),
                           f_not(f_and(wins)))));
    }
  }

  {
    std::vector<std::vector<Int>> per_good(static_cast<std::size_t>(m),
                                           bid_prices);
    product<Int>(per_good, [&](const std::vector<Int>& prices) {
      for (Agent i = 1; i <= n; ++i) {
        std::vector<Formula> clauses;
        for (Good j = 1; j <= m; ++j) {
          const Int p = prices[static_cast<std::size_t>(j - 1)];
          std::vector<Formula> ways;
          if (p == 0)
            ways.push_back(f_eq(t_var(trade_var(i, j)), t_const(0)));
          ways.push_back(f_and({f_eq(t_const(p), t_var("price")),
                                f_not(f_prop(saa_sold_prop(j)))}));
          ways.push_back(
              f_and({f_eq(t_const(p), t_var(saa_price_var(j))),
                     f_eq(t_var(trade_var(i, j)), t_const(1))}));
          clauses.push_back(f_or(ways));
        }
        out.add("sa:legal",
                f_iff(f_legal(i, saa_bid(prices)), f_and(clauses)));
      }
    });
  }

  for (Int x : clock_values)
    out.add("sa:price",
            f_implies(f_and({f_not(f_terminal()),
                             f_eq(t_var("price"), t_const(x))}),
                      f_next(f_eq(t_var("price"),
                                  t_add({t_const(x), t_const(inc)})))));

  for (Good j = 1; j <= m; ++j)
    for (Int x : clock_values)
      out.add(
          "sa:price-good",
          f_implies(
              f_and({f_not(f_terminal()),
                     f_eq(t_var(saa_price_var(j)), t_const(x))}),
              f_next(f_or(
                  {f_and({f_eq(t_var(saa_price_var(j)), t_const(x)),
                          f_prop(saa_sold_prop(j))}),
                   f_and({f_eq(t_var(saa_price_var(j)),
                               t_add({t_const(x), t_const(inc)})),
                          f_not(f_prop(saa_sold_prop(j)))})}))));

  for (Agent i = 1; i <= n; ++i)
    for (Good j = 1; j <= m; ++j)
      out.add("sa:alloc-pre",
              f_implies(f_not(f_terminal()),
                        f_eq(t_var(alloc_var(i, j)), t_const(0))));

  for (Agent i = 1; i <= n; ++i) {
    for (Good j = 1; j <= m; ++j) {
      std::vector<Formula> offers;
      std::vector<std::vector<Int>> per_good(static_cast<std::size_t>(m),
                                             bid_prices);
      product<Int>(per_good, [&](const std::vector<Int>& prices) {
        if (prices[static_cast<std::size_t>(j - 1)] == 0) return;
        offers.push_back(f_does(i, saa_bid(prices)));
      });
      const Formula live =
          offers.empty()
              ? f_false()
              : f_and({f_not(f_terminal()), f_or(offers)});
      out.add("sa:bid",
              f_iff(f_next(f_prop(saa_bid_prop(i, j))),
                    f_or({live, f_and({f_prop(saa_bid_prop(i, j)),
                                       f_terminal()})})));
    }
  }

  for (Agent i = 1; i <= n; ++i)
    for (Good j = 1; j <= m; ++j)
      out.add("sa:alloc-final",
              f_implies(f_terminal(), f_eq(t_var(alloc_var(i, j)),
                                           t_var(trade_var(i, j)))));

  for (Agent i = 1; i <= n; ++i) {
    std::vector<Term> dues;
    for (Good j = 1; j <= m; ++j)
      dues.push_back(t_times({t_var(saa_price_var(j)),
                              t_var(trade_var(i, j))}));
    const Term sum = dues.size() == 1 ? dues[0] : t_add(dues);
    out.add("sa:payment", f_eq(t_var(payment_var(i)), sum));
  }

  {
    // Grids per variable: clock prices, unit trades and holdings, and
    // payments as sums of up to m selling prices.
    std::vector<Int> selling;
    for (Int v : clock_values)
      if (v < limit && v != 0) selling.push_back(v);
    std::set<Int> sums = {0};
    for (Good j = 1; j <= m; ++j) {
      std::set<Int> grown = sums;
      for (Int s : sums)
        for (Int p : selling)
          if (grown.size() < 512) grown.insert(checked_add(s, p));
      sums = std::move(grown);
    }
    const std::vector<Int> unit = {0, 1};
    const std::vector<Int> payments(sums.begin(), sums.end());
    const auto add_loops = [&](const std::string& var,
                               const std::vector<Int>& xs) {
      for (Int x : xs) out.add("sa:loop", loop_rule(var, x));
    };
    add_loops("price", clock_values);
    for (Good j = 1; j <= m; ++j) add_loops(saa_price_var(j), clock_values);
    for (Agent i = 1; i <= n; ++i)
      for (Good j = 1; j <= m; ++j) add_loops(trade_var(i, j), unit);
    for (Agent i = 1; i <= n; ++i)
      for (Good j = 1; j <= m; ++j) add_loops(alloc_var(i, j), unit);
    for (Agent i = 1; i <= n; ++i)
      add_loops(payment_var(i),
                full_range ? full_grid(sig.range) : payments);
  }

  return out.take();
}

std::vector<RuleReport> check_model_of(const StModel& model,
                                       const std::vector<Rule>& rules,
                                       std::size_t horizon,
                                       std::size_t path_cap,
                                       std::size_t solver_budget) {
  std::vector<Formula> formulas;
  formulas.reserve(rules.size());
  for (const Rule& r : rules) formulas.push_back(r.formula);
  std::vector<Verdict> verdicts =
      check_formulas(model, formulas, horizon, path_cap, solver_budget);
  std::vector<RuleReport> reports;
  reports.reserve(rules.size());
  for (std::size_t k = 0; k < rules.size(); ++k)
    reports.push_back(RuleReport{rules[k].name, std::move(verdicts[k])});
  return reports;
}

}  // namespace cedl
