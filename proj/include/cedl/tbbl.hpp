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
// Tree-based bidding language: bid trees over goods, satisfaction
// assignments, and exact evaluation of a tree against a trade vector.

#ifndef CEDL_TBBL_HPP_
#define CEDL_TBBL_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cedl/base.hpp"

namespace cedl {

// A bid tree. Leaves offer a quantity of one good at a value; interior
// nodes carry an interval constraint [min_sat, max_sat] on the number of
// satisfied children plus their own value. Trees are immutable value
// objects once built.
class BidTree;

// An atomic bid: quantity of one good against a value.
struct BidLeaf {
  Int quantity = 0;
  Good good = 1;
  Int value = 0;
  bool operator==(const BidLeaf&) const = default;
};

// An interior constraint: between min_sat and max_sat children must be
// satisfied whenever the node itself is.
struct BidNode {
  Int min_sat = 0;
  Int max_sat = 0;
  Int value = 0;
  std::vector<BidTree> children;
  bool operator==(const BidNode&) const = default;
};

class BidTree {
 public:
  using Leaf = BidLeaf;
  using Node = BidNode;

  // The zero leaf <0,g,0> is canonicalized to good 1: all such leaves are
  // one and the same no-op bid.
  static BidTree leaf(Int quantity, Good good, Int value);
  // Interior node; throws InputError unless 0 <= min_sat <= max_sat and
  // children is nonempty.
  static BidTree ic(Int min_sat, Int max_sat, std::vector<BidTree> children,
                    Int value);
  static BidTree xor_of(std::vector<BidTree> children, Int value);
  static BidTree and_of(std::vector<BidTree> children, Int value);
  static BidTree or_of(std::vector<BidTree> children, Int value);

  bool is_leaf() const { return std::holds_alternative<Leaf>(repr_); }
  const Leaf& as_leaf() const { return std::get<Leaf>(repr_); }
  const Node& as_node() const { return std::get<Node>(repr_); }

  // Value label of the root.
  Int value() const;
  // Number of nodes in the whole tree.
  std::size_t node_count() const;

  bool operator==(const BidTree&) const = default;

 private:
  BidTree() = default;
  std::variant<Leaf, Node> repr_;
};

// The empty bid: a zero leaf on good 1.
BidTree noop();

// Position of a node: child offsets from the root (root = empty path).
struct NodeId {
  std::vector<int> path;
  bool operator==(const NodeId&) const = default;
  auto operator<=>(const NodeId&) const = default;
  std::string to_string() const;
};

// All node ids in pre-order (root first, children left to right).
std::vector<NodeId> nodes(const BidTree& t);
// Ids of the leaves, in pre-order.
std::vector<NodeId> leaves(const BidTree& t);
// Direct children of the node at id; empty for leaves.
std::vector<NodeId> children(const BidTree& t, const NodeId& id);
// The subtree rooted at id; throws InputError for an unresolved id.
const BidTree& subtree(const BidTree& t, const NodeId& id);
// Value label of the node at id.
Int node_value(const BidTree& t, const NodeId& id);
// Quantity of good j at the node: the leaf's quantity if it is a leaf for
// good j, otherwise 0.
Int leaf_quantity(const BidTree& t, const NodeId& id, Good j);

// Satisfaction flags for one tree, aligned with nodes(t) pre-order.
struct SatAssignment {
  std::vector<std::uint8_t> bits;

  bool at(std::size_t pre_order_index) const {
    return bits.at(pre_order_index) != 0;
  }
  bool operator==(const SatAssignment&) const = default;
};

// Whether sat is a valid solution of t under trade (per-good, whole vector
// of goods 1..trade.size()): interior constraints hold at every node on the
// satisfied region, and aggregated leaf quantities stay within the trade.
bool is_valid_solution(const BidTree& t, const SatAssignment& sat,
                       const std::vector<Int>& trade);

struct TradeValue {
  Int value = 0;
  SatAssignment sat;
};

// Best total value of t under trade, with a witnessing satisfaction
// assignment. Among maximizers, prefers assignments satisfying earlier
// pre-order nodes. Returns nullopt when no valid solution exists
// (infeasible trade). budget caps the number of candidate assignments.
std::optional<TradeValue> trade_value(const BidTree& t,
                                      const std::vector<Int>& trade,
                                      std::size_t budget = 1u << 22);

enum class Restriction { kBuyer, kSeller, kGood, kUnit };

// Structural restriction check. The agent index only names whose bid is
// being inspected; the predicate depends on the tree and, for the
// existential quantity clauses of buyer/seller, on how many goods exist.
bool check_restriction(Agent i, const BidTree& t, Restriction r,
                       int good_count = 1);

std::optional<Restriction> restriction_from_string(const std::string& name);
std::string restriction_name(Restriction r);

// Exhaustive semantic equivalence of two trees over all trades in
// range^good_count; values and infeasibility must agree pointwise.
// Throws BudgetError when the domain exceeds budget.
bool trees_equivalent(const BidTree& a, const BidTree& b, IntRange range,
                      int good_count, std::size_t budget = 1u << 20,
                      std::vector<Int>* witness = nullptr);

// Surface syntax: "<q,good,v>" for leaves, "IC[x,y](c1, ..., ck; v)" for
// interior nodes, with XOR/AND/OR sugar for IC[1,1]/IC[s,s]/IC[1,s].
// Goods are positive integers or names resolved through good_names
// (defaults to a=1 ... z=26). Parentheses around the child list are
// accepted: "IC[x,y]((c1, c2); v)".
BidTree parse_bid_tree(const std::string& text,
                       const std::map<std::string, Good>* good_names = nullptr);

// Canonical printing; parse_bid_tree(print_bid_tree(t)) == t. When
// good_names is given, goods with a name print by name.
std::string print_bid_tree(const BidTree& t,
                           const std::map<Good, std::string>* good_names = nullptr);

namespace internal {

// One satisfaction pattern of a tree: pre-order bits, total value of the
// satisfied nodes, and per-good aggregated leaf demand.
struct SatPattern {
  std::vector<std::uint8_t> bits;
  Int value = 0;
  std::vector<Int> demand;
};

// All satisfaction assignments respecting the interior-node constraints,
// in the tie-breaking preference order (satisfy earlier pre-order nodes
// first). The all-unsatisfied pattern is always last.
std::vector<SatPattern> enumerate_patterns(const BidTree& t, int good_count,
                                           std::size_t budget);

}  // namespace internal

}  // namespace cedl

#endif  // CEDL_TBBL_HPP_
