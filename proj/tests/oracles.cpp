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

#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace cedl::testing {
namespace {

// Flat view of a tree built by direct recursion: index 0 is the root,
// children hold flat indexes, quantities are per good.
struct FlatTree {
  struct Node {
    bool leaf = false;
    Int min_sat = 0;
    Int max_sat = 0;
    Int value = 0;
    Good good = 0;
    Int quantity = 0;
    std::vector<std::size_t> kids;
  };
  std::vector<Node> all;

  std::size_t flatten(const BidTree& t) {
    const std::size_t self = all.size();
    all.emplace_back();
    if (t.is_leaf()) {
      const BidLeaf& l = t.as_leaf();
      all[self].leaf = true;
      all[self].good = l.good;
      all[self].quantity = l.quantity;
      all[self].value = l.value;
    } else {
      const BidNode& n = t.as_node();
      all[self].min_sat = n.min_sat;
      all[self].max_sat = n.max_sat;
      all[self].value = n.value;
      std::vector<std::size_t> kids;
      for (const BidTree& c : n.children) kids.push_back(flatten(c));
      all[self].kids = std::move(kids);
    }
    return self;
  }
};

}  // namespace

std::optional<Int> brute_trade_value(const BidTree& t,
                                     const std::vector<Int>& trade) {
  FlatTree ft;
  ft.flatten(t);
  const std::size_t n = ft.all.size();
  std::optional<Int> best;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    const auto on = [&](std::size_t k) { return (mask >> k) & 1u; };
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      const auto& node = ft.all[k];
      if (node.leaf) continue;
      Int sat_kids = 0;
      for (std::size_t c : node.kids) sat_kids += on(c) ? 1 : 0;
      if (on(k))
        ok = node.min_sat <= sat_kids && sat_kids <= node.max_sat;
      else
        ok = sat_kids == 0;
    }
    if (!ok) continue;
    for (std::size_t j = 0; j < trade.size() && ok; ++j) {
      Int supplied = 0;
      for (std::size_t k = 0; k < n; ++k)
        if (on(k) && ft.all[k].leaf &&
            ft.all[k].good == static_cast<Good>(j + 1))
          supplied += ft.all[k].quantity;
      ok = supplied <= trade[j];
    }
    if (!ok) continue;
    Int value = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (on(k)) value += ft.all[k].value;
    if (!best || value > *best) best = value;
  }
  return best;
}

BruteWd brute_solve_wd(const std::vector<BidTree>& bids,
                       const IntMatrix& alloc, const AuctionSignature& sig) {
  const int n = sig.agents;
  const int m = sig.goods;
  // Per agent: every allocation-feasible trade row with a valid solution,
  // mapped to the best value any solution reaches on that row.
  struct Row {
    std::vector<Int> trade;
    Int value;
  };
  std::vector<std::vector<Row>> rows(static_cast<std::size_t>(n));
  for (Agent i = 1; i <= n; ++i) {
    std::vector<Int> probe(static_cast<std::size_t>(m), sig.range.min_value);
    for (;;) {
      bool feasible = true;
      for (Good j = 1; j <= m; ++j)
        if (probe[static_cast<std::size_t>(j - 1)] + alloc.at(i, j) < 0)
          feasible = false;
      if (feasible) {
        const auto v = brute_trade_value(
            bids[static_cast<std::size_t>(i - 1)], probe);
        if (v) rows[static_cast<std::size_t>(i - 1)].push_back({probe, *v});
      }
      int j = 0;
      while (j < m && probe[static_cast<std::size_t>(j)] ==
                          sig.range.max_value) {
        probe[static_cast<std::size_t>(j)] = sig.range.min_value;
        ++j;
      }
      if (j == m) break;
      ++probe[static_cast<std::size_t>(j)];
    }
  }

  BruteWd best;
  best.trade = IntMatrix(n, m);
  bool have = false;
  Int best_value = 0;
  std::vector<Int> best_flat;
  std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
  for (;;) {
    bool balanced = true;
    for (Good j = 1; j <= m && balanced; ++j) {
      Int sum = 0;
      for (Agent i = 1; i <= n; ++i)
        sum += rows[static_cast<std::size_t>(i - 1)]
                   [pick[static_cast<std::size_t>(i - 1)]]
                       .trade[static_cast<std::size_t>(j - 1)];
      balanced = sum == 0;
    }
    if (balanced) {
      Int value = 0;
      std::vector<Int> flat;
      for (Agent i = 1; i <= n; ++i) {
        const Row& r = rows[static_cast<std::size_t>(i - 1)]
                           [pick[static_cast<std::size_t>(i - 1)]];
        value += r.value;
        flat.insert(flat.end(), r.trade.begin(), r.trade.end());
      }
      if (!have || value > best_value ||
          (value == best_value &&
           std::lexicographical_compare(best_flat.begin(), best_flat.end(),
                                        flat.begin(), flat.end()))) {
        have = true;
        best_value = value;
        best_flat = std::move(flat);
      }
    }
    int i = 0;
    while (i < n &&
           pick[static_cast<std::size_t>(i)] + 1 ==
               rows[static_cast<std::size_t>(i)].size()) {
      pick[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == n) break;
    ++pick[static_cast<std::size_t>(i)];
  }
  best.objective = best_value;
  for (Agent i = 1; i <= n; ++i)
    for (Good j = 1; j <= m; ++j)
      best.trade.at(i, j) =
          best_flat[static_cast<std::size_t>(i - 1) *
                        static_cast<std::size_t>(m) +
                    static_cast<std::size_t>(j - 1)];
  return best;
}

BidTree random_tree(std::mt19937_64& rng, int goods, int max_nodes, Int q_lo,
                    Int q_hi, Int v_lo, Int v_hi) {
  const auto pick = [&rng](Int lo, Int hi) {
    return lo + static_cast<Int>(rng() % static_cast<std::uint64_t>(
                                             hi - lo + 1));
  };
  const auto leaf = [&] {
    return BidTree::leaf(pick(q_lo, q_hi),
                         static_cast<Good>(pick(1, goods)),
                         pick(v_lo, v_hi));
  };
  if (max_nodes <= 1 || rng() % 4 == 0) return leaf();
  // An inner node spends one node on itself and at least one per child.
  const int budget = max_nodes - 1;
  const int kids = static_cast<int>(1 + rng() % std::min(3, budget));
  std::vector<BidTree> children;
  int left = budget;
  for (int c = 0; c < kids; ++c) {
    const int reserve = kids - c - 1;
    const int share = std::max(
        1, static_cast<int>(rng() % static_cast<std::uint64_t>(
                                std::max(1, left - reserve)) +
                            1));
    children.push_back(
        random_tree(rng, goods, share, q_lo, q_hi, v_lo, v_hi));
    left -= static_cast<int>(nodes(children.back()).size());
  }
  const Int s = static_cast<Int>(children.size());
  const Int x = pick(0, s);
  const Int y = pick(x, s);
  return BidTree::ic(x, y, std::move(children), pick(v_lo, v_hi));
}

Term random_term(std::mt19937_64& rng, const AuctionSignature& sig,
                 int depth) {
  const auto pick = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(
                                             hi - lo + 1));
  };
  if (depth <= 0 || rng() % 3 == 0) {
    if (!sig.variables.empty() && rng() % 2 == 0)
      return t_var(sig.variables[rng() % sig.variables.size()]);
    return t_const(pick(-9, 9));
  }
  const Agent i = static_cast<Agent>(pick(1, sig.agents));
  switch (rng() % 8) {
    case 0:
      return t_add({random_term(rng, sig, depth - 1),
                    random_term(rng, sig, depth - 1)});
    case 1:
      return t_sub(random_term(rng, sig, depth - 1),
                   random_term(rng, sig, depth - 1));
    case 2:
      return t_min({random_term(rng, sig, depth - 1),
                    random_term(rng, sig, depth - 1)});
    case 3:
      return t_max({random_term(rng, sig, depth - 1),
                    random_term(rng, sig, depth - 1)});
    case 4:
      return t_times({random_term(rng, sig, depth - 1),
                      random_term(rng, sig, depth - 1)});
    case 5: {
      std::vector<BidTree> trees;
      for (Agent r = 1; r <= sig.agents; ++r)
        trees.push_back(random_tree(rng, sig.goods, 3, -2, 2, -3, 3));
      std::vector<Term> cells;
      for (int k = 0; k < sig.agents * sig.goods; ++k)
        cells.push_back(t_const(pick(0, 2)));
      return t_win(i, static_cast<Good>(pick(1, sig.goods)),
                   std::move(trees), std::move(cells));
    }
    case 6: {
      BidTree t = random_tree(rng, sig.goods, 4, -2, 2, -3, 3);
      if (rng() % 2 == 0) return t_value(i, std::move(t));
      std::vector<Term> trade;
      for (int j = 0; j < sig.goods; ++j)
        trade.push_back(random_term(rng, sig, 0));
      return t_value_at(i, std::move(t), std::move(trade));
    }
    default:
      return t_qtd(i, random_tree(rng, sig.goods, 4, -2, 2, -3, 3),
                   static_cast<Good>(pick(1, sig.goods)));
  }
}

Formula random_formula(std::mt19937_64& rng, const AuctionSignature& sig,
                       int depth) {
  const auto pick = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(
                                             hi - lo + 1));
  };
  const Agent i = static_cast<Agent>(pick(1, sig.agents));
  if (depth <= 0 || rng() % 4 == 0) {
    switch (rng() % 7) {
      case 0:
        return f_true();
      case 1:
        return f_false();
      case 2:
        return f_initial();
      case 3:
        return f_terminal();
      case 4:
        if (!sig.propositions.empty())
          return f_prop(sig.propositions[rng() % sig.propositions.size()]);
        return f_prop("p");
      case 5:
        return f_legal(i, random_tree(rng, sig.goods, 4, -2, 2, -3, 3));
      default:
        return f_does(i, random_tree(rng, sig.goods, 4, -2, 2, -3, 3));
    }
  }
  switch (rng() % 8) {
    case 0:
      return f_cmp(static_cast<CmpOp>(rng() % 3),
                   random_term(rng, sig, depth - 1),
                   random_term(rng, sig, depth - 1));
    case 1:
      return f_not(random_formula(rng, sig, depth - 1));
    case 2:
      return f_and({random_formula(rng, sig, depth - 1),
                    random_formula(rng, sig, depth - 1)});
    case 3:
      return f_or({random_formula(rng, sig, depth - 1),
                   random_formula(rng, sig, depth - 1)});
    case 4:
      return f_implies(random_formula(rng, sig, depth - 1),
                       random_formula(rng, sig, depth - 1));
    case 5:
      return f_iff(random_formula(rng, sig, depth - 1),
                   random_formula(rng, sig, depth - 1));
    case 6:
      return f_next(random_formula(rng, sig, depth - 1));
    default: {
      const Restriction r = static_cast<Restriction>(rng() % 4);
      return f_rest(i, r, random_tree(rng, sig.goods, 4, -2, 2, -3, 3));
    }
  }
}

}  // namespace cedl::testing
