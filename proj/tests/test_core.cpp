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
#include <algorithm>
#include <limits>
#include <random>

#include "cedl/core.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cedl;

namespace {

AuctionSignature small_signature() {
  AuctionSignature sig;
  sig.agents = 2;
  sig.goods = 2;
  sig.range = {-3, 3};
  sig.actions = {noop(), BidTree::leaf(1, 1, 2)};
  sig.variables = predefined_variables(2, 2);
  return sig;
}

}  // namespace

TEST_CASE("integer range membership and size") {
  const IntRange r{-3, 3};
  CHECK(r.contains(0));
  CHECK(r.contains(-3));
  CHECK(r.contains(3));
  CHECK_FALSE(r.contains(4));
  CHECK(r.size() == 7);
}

TEST_CASE("matrix accessors are one-based and bounds-checked") {
  IntMatrix m(2, 3);
  m.at(1, 1) = 5;
  m.at(2, 3) = -1;
  CHECK(m.at(1, 1) == 5);
  CHECK(m.row(2) == std::vector<Int>{0, 0, -1});
  CHECK(m.flat().size() == 6);
  CHECK_THROWS_AS(m.at(0, 1), InputError);
  CHECK_THROWS_AS(m.at(1, 4), InputError);
  CHECK_THROWS_AS(m.at(3, 1), InputError);
}

TEST_CASE("checked arithmetic raises on overflow") {
  const Int big = std::numeric_limits<Int>::max();
  CHECK(checked_add(2, 3) == 5);
  CHECK(checked_sub(2, 3) == -1);
  CHECK(checked_mul(-4, 5) == -20);
  CHECK_THROWS_AS(checked_add(big, 1), EvalError);
  CHECK_THROWS_AS(checked_sub(std::numeric_limits<Int>::min(), 1), EvalError);
  CHECK_THROWS_AS(checked_mul(big, 2), EvalError);
}

TEST_CASE("predefined variable names cover payments, holdings, trades") {
  CHECK(payment_var(2) == "payment_2");
  CHECK(alloc_var(1, 2) == "alloc_1_2");
  CHECK(trade_var(2, 1) == "trade_2_1");
  const auto vars = predefined_variables(2, 2);
  CHECK(std::count(vars.begin(), vars.end(), "payment_1") == 1);
  CHECK(std::count(vars.begin(), vars.end(), "payment_2") == 1);
  CHECK(std::count(vars.begin(), vars.end(), "alloc_2_1") == 1);
  CHECK(std::count(vars.begin(), vars.end(), "trade_1_2") == 1);
  CHECK(vars.size() == 2 + 4 + 4);
}

TEST_CASE("a well-formed signature validates cleanly") {
  CHECK(validate_signature(small_signature()).empty());
}

TEST_CASE("signature violations are reported") {
  AuctionSignature sig = small_signature();
  sig.agents = 0;
  CHECK_FALSE(validate_signature(sig).empty());

  sig = small_signature();
  sig.range = {1, 3};
  CHECK_FALSE(validate_signature(sig).empty());

  sig = small_signature();
  sig.actions.clear();
  CHECK_FALSE(validate_signature(sig).empty());

  sig = small_signature();
  sig.actions = {BidTree::leaf(1, 1, 2)};
  CHECK_FALSE(validate_signature(sig).empty());

  sig = small_signature();
  sig.actions.push_back(BidTree::leaf(1, 1, 9));
  CHECK_FALSE(validate_signature(sig).empty());

  sig = small_signature();
  sig.variables.clear();
  CHECK_FALSE(validate_signature(sig).empty());
}

TEST_CASE("feasibility compares trades against holdings") {
  IntMatrix alloc(2, 2);
  alloc.at(1, 1) = 1;
  IntMatrix trade(2, 2);
  trade.at(1, 1) = -1;
  CHECK(is_feasible(trade, alloc));
  trade.at(1, 1) = -2;
  CHECK_FALSE(is_feasible(trade, alloc));
  trade.at(1, 1) = 3;
  CHECK(is_feasible(trade, alloc));
}

TEST_CASE("balance requires per-good zero sums") {
  IntMatrix trade(2, 2);
  CHECK(is_balanced(trade));
  trade.at(1, 1) = 2;
  trade.at(2, 1) = -2;
  CHECK(is_balanced(trade));
  trade.at(1, 2) = 1;
  CHECK_FALSE(is_balanced(trade));
}

TEST_CASE("every tree is equivalent to itself") {
  std::mt19937_64 rng(21);
  const AuctionSignature sig = small_signature();
  for (int k = 0; k < 20; ++k) {
    const BidTree t = testing::random_tree(rng, 2, 7, -2, 2, -3, 3);
    CHECK(trees_equivalent(t, t, sig));
  }
}

TEST_CASE("wrapping a leaf in a zero-valued choice preserves meaning") {
  const AuctionSignature sig = small_signature();
  const BidTree plain = BidTree::leaf(1, 1, 2);
  const BidTree wrapped = BidTree::xor_of({BidTree::leaf(1, 1, 2)}, 0);
  CHECK(trees_equivalent(plain, wrapped, sig));
}

TEST_CASE("different prices are told apart with a witness") {
  const AuctionSignature sig = small_signature();
  const BidTree cheap = BidTree::leaf(1, 1, 2);
  const BidTree costly = BidTree::leaf(1, 1, 3);
  std::vector<Int> witness;
  REQUIRE_FALSE(trees_equivalent(cheap, costly, sig, 1u << 20, &witness));
  REQUIRE(witness.size() == 2);
  const auto a = trade_value(cheap, witness);
  const auto b = trade_value(costly, witness);
  const bool differ =
      a.has_value() != b.has_value() || (a && b && a->value != b->value);
  CHECK(differ);
}

TEST_CASE("equivalence agrees with exhaustive evaluation") {
  std::mt19937_64 rng(22);
  const AuctionSignature sig = small_signature();
  for (int k = 0; k < 40; ++k) {
    const BidTree a = testing::random_tree(rng, 2, 6, -2, 2, -2, 2);
    const BidTree b = testing::random_tree(rng, 2, 6, -2, 2, -2, 2);
    bool same = true;
    std::vector<Int> probe(2);
    for (Int u = sig.range.min_value; u <= sig.range.max_value && same; ++u) {
      for (Int v = sig.range.min_value; v <= sig.range.max_value && same;
           ++v) {
        probe = {u, v};
        const auto va = testing::brute_trade_value(a, probe);
        const auto vb = testing::brute_trade_value(b, probe);
        same = va == vb;
      }
    }
    CHECK(trees_equivalent(a, b, sig) == same);
  }
}

TEST_CASE("equivalence checking respects its budget") {
  AuctionSignature sig = small_signature();
  sig.range = {-3, 3};
  const BidTree a = BidTree::leaf(1, 1, 2);
  const BidTree b = BidTree::leaf(1, 1, 2);
  CHECK_THROWS_AS(trees_equivalent(a, b, sig, 2), BudgetError);
}
