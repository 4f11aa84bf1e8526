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

#include "cedl/tbbl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace cedl {

BidTree BidTree::leaf(Int quantity, Good good, Int value) {
  if (good < 1) throw InputError("good index must be >= 1");
  BidTree t;
  if (quantity == 0 && value == 0) good = 1;
  t.repr_ = Leaf{quantity, good, value};
  return t;
}

BidTree BidTree::ic(Int min_sat, Int max_sat, std::vector<BidTree> children,
                    Int value) {
  if (min_sat < 0 || min_sat > max_sat)
    throw InputError("interval constraint requires 0 <= x <= y, got x=" +
                     std::to_string(min_sat) + " y=" + std::to_string(max_sat));
  if (children.empty()) throw InputError("interior node needs at least one child");
  BidTree t;
  t.repr_ = Node{min_sat, max_sat, value, std::move(children)};
  return t;
}

BidTree BidTree::xor_of(std::vector<BidTree> children, Int value) {
  return ic(1, 1, std::move(children), value);
}

BidTree BidTree::and_of(std::vector<BidTree> children, Int value) {
  Int s = static_cast<Int>(children.size());
  return ic(s, s, std::move(children), value);
}

BidTree BidTree::or_of(std::vector<BidTree> children, Int value) {
  Int s = static_cast<Int>(children.size());
  return ic(1, s, std::move(children), value);
}

Int BidTree::value() const {
  return is_leaf() ? as_leaf().value : as_node().value;
}

std::size_t BidTree::node_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 1;
  for (const BidTree& c : as_node().children) n += c.node_count();
  return n;
}

BidTree noop() { return BidTree::leaf(0, 1, 0); }

std::string NodeId::to_string() const {
  if (path.empty()) return "root";
  std::string s = "root";
  for (int step : path) s += "." + std::to_string(step);
  return s;
}

namespace {

void collect_nodes(const BidTree& t, NodeId& cur, std::vector<NodeId>& out,
                   bool leaves_only) {
  if (!leaves_only || t.is_leaf()) out.push_back(cur);
  if (t.is_leaf()) return;
  const auto& cs = t.as_node().children;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    cur.path.push_back(static_cast<int>(k));
    collect_nodes(cs[k], cur, out, leaves_only);
    cur.path.pop_back();
  }
}

}  // namespace

std::vector<NodeId> nodes(const BidTree& t) {
  std::vector<NodeId> out;
  NodeId cur;
  collect_nodes(t, cur, out, false);
  return out;
}

std::vector<NodeId> leaves(const BidTree& t) {
  std::vector<NodeId> out;
  NodeId cur;
  collect_nodes(t, cur, out, true);
  return out;
}

const BidTree& subtree(const BidTree& t, const NodeId& id) {
  const BidTree* cur = &t;
  for (int step : id.path) {
    if (cur->is_leaf() || step < 0 ||
        static_cast<std::size_t>(step) >= cur->as_node().children.size())
      throw InputError("node id " + id.to_string() + " does not resolve");
    cur = &cur->as_node().children[static_cast<std::size_t>(step)];
  }
  return *cur;
}

std::vector<NodeId> children(const BidTree& t, const NodeId& id) {
  const BidTree& sub = subtree(t, id);
  std::vector<NodeId> out;
  if (sub.is_leaf()) return out;
  for (std::size_t k = 0; k < sub.as_node().children.size(); ++k) {
    NodeId c = id;
    c.path.push_back(static_cast<int>(k));
    out.push_back(std::move(c));
  }
  return out;
}

Int node_value(const BidTree& t, const NodeId& id) {
  return subtree(t, id).value();
}

Int leaf_quantity(const BidTree& t, const NodeId& id, Good j) {
  const BidTree& sub = subtree(t, id);
  if (!sub.is_leaf()) return 0;
  return sub.as_leaf().good == j ? sub.as_leaf().quantity : 0;
}

namespace {

// Checks the interior interval constraints over the satisfied region; an
// unsatisfied node forces all its descendants unsatisfied.
bool check_structure(const BidTree& t, const SatAssignment& sat,
                     std::size_t& idx) {
  bool here = sat.at(idx);
  ++idx;
  if (t.is_leaf()) return true;
  Int sat_children = 0;
  bool ok = true;
  for (const BidTree& c : t.as_node().children) {
    bool child_sat = sat.at(idx);
    if (child_sat) {
      if (!here) ok = false;  // satisfied child under unsatisfied parent
      ++sat_children;
    }
    if (!check_structure(c, sat, idx)) ok = false;
  }
  if (here) {
    const auto& n = t.as_node();
    if (sat_children < n.min_sat || sat_children > n.max_sat) ok = false;
  } else if (sat_children != 0) {
    ok = false;
  }
  return ok;
}

void sum_demand(const BidTree& t, const SatAssignment& sat, std::size_t& idx,
                std::vector<Int>& demand) {
  bool here = sat.at(idx);
  ++idx;
  if (t.is_leaf()) {
    const auto& l = t.as_leaf();
    if (here && l.good >= 1 &&
        static_cast<std::size_t>(l.good) <= demand.size())
      demand[static_cast<std::size_t>(l.good - 1)] += l.quantity;
    if (here && static_cast<std::size_t>(l.good) > demand.size() &&
        l.quantity != 0)
      throw InputError("leaf good " + std::to_string(l.good) +
                       " exceeds the good count");
    return;
  }
  for (const BidTree& c : t.as_node().children) sum_demand(c, sat, idx, demand);
}

}  // namespace

bool is_valid_solution(const BidTree& t, const SatAssignment& sat,
                       const std::vector<Int>& trade) {
  if (sat.bits.size() != t.node_count())
    throw InputError("satisfaction assignment size does not match the tree");
  std::size_t idx = 0;
  if (!check_structure(t, sat, idx)) return false;
  std::vector<Int> demand(trade.size(), 0);
  idx = 0;
  sum_demand(t, sat, idx, demand);
  for (std::size_t j = 0; j < trade.size(); ++j)
    if (demand[j] > trade[j]) return false;
  return true;
}

namespace internal {

namespace {

struct PatternBuilder {
  int good_count;
  std::size_t budget;
  std::vector<SatPattern> out;

  // Emits all satisfaction patterns of t given that t's root is satisfied,
  // in descending pre-order preference, by extending `prefix`.
  void emit_satisfied(const BidTree& t, SatPattern& prefix,
                      const std::function<void()>& done);
  void choose_children(const BidTree::Node& node, std::size_t child_index,
                       Int chosen, SatPattern& prefix,
                       const std::function<void()>& done);
  void push_unsat(const BidTree& t, SatPattern& prefix) {
    for (std::size_t k = 0; k < t.node_count(); ++k)
      prefix.bits.push_back(0);
  }
  void pop(const BidTree& t, SatPattern& prefix) {
    prefix.bits.resize(prefix.bits.size() - t.node_count());
  }
};

void PatternBuilder::emit_satisfied(const BidTree& t, SatPattern& prefix,
                                    const std::function<void()>& done) {
  prefix.bits.push_back(1);
  Int old_value = prefix.value;
  prefix.value = checked_add(prefix.value, t.value());
  if (t.is_leaf()) {
    const auto& l = t.as_leaf();
    if (static_cast<std::size_t>(l.good) > prefix.demand.size()) {
      if (l.quantity != 0)
        throw InputError("leaf good " + std::to_string(l.good) +
                         " exceeds the good count");
    } else {
      prefix.demand[static_cast<std::size_t>(l.good - 1)] += l.quantity;
    }
    done();
    if (static_cast<std::size_t>(l.good) <= prefix.demand.size())
      prefix.demand[static_cast<std::size_t>(l.good - 1)] -= l.quantity;
  } else {
    choose_children(t.as_node(), 0, 0, prefix, done);
  }
  prefix.value = old_value;
  prefix.bits.pop_back();
}

void PatternBuilder::choose_children(const BidTree::Node& node,
                                     std::size_t child_index, Int chosen,
                                     SatPattern& prefix,
                                     const std::function<void()>& done) {
  Int remaining = static_cast<Int>(node.children.size() - child_index);
  if (child_index == node.children.size()) {
    if (chosen >= node.min_sat && chosen <= node.max_sat) done();
    return;
  }
  // Earlier children are more significant in the preference order, so the
  // satisfied branch comes first.
  const BidTree& child = node.children[child_index];
  if (chosen < node.max_sat)
    emit_satisfied(child, prefix, [&] {
      choose_children(node, child_index + 1, chosen + 1, prefix, done);
    });
  if (chosen + remaining - 1 >= node.min_sat) {
    push_unsat(child, prefix);
    choose_children(node, child_index + 1, chosen, prefix, done);
    pop(child, prefix);
  }
}

}  // namespace

std::vector<SatPattern> enumerate_patterns(const BidTree& t, int good_count,
                                           std::size_t budget) {
  PatternBuilder b{good_count, budget, {}};
  SatPattern prefix;
  prefix.demand.assign(static_cast<std::size_t>(good_count), 0);
  auto done = [&] {
    if (b.out.size() >= budget)
      throw BudgetError("satisfaction pattern budget exceeded (" +
                        std::to_string(budget) + ")");
    b.out.push_back(prefix);
  };
  b.emit_satisfied(t, prefix, done);
  b.push_unsat(t, prefix);
  done();
  return b.out;
}

}  // namespace internal

std::optional<TradeValue> trade_value(const BidTree& t,
                                      const std::vector<Int>& trade,
                                      std::size_t budget) {
  auto patterns = internal::enumerate_patterns(
      t, static_cast<int>(trade.size()), budget);
  const internal::SatPattern* best = nullptr;
  for (const auto& p : patterns) {
    bool feasible = true;
    for (std::size_t j = 0; j < trade.size(); ++j)
      if (p.demand[j] > trade[j]) { feasible = false; break; }
    if (!feasible) continue;
    if (best == nullptr || p.value > best->value) best = &p;
  }
  if (best == nullptr) return std::nullopt;
  return TradeValue{best->value, SatAssignment{best->bits}};
}

bool check_restriction(Agent /*i*/, const BidTree& t, Restriction r,
                       int good_count) {
  switch (r) {
    case Restriction::kBuyer:
    case Restriction::kSeller: {
      bool buyer = (r == Restriction::kBuyer);
      for (const NodeId& id : nodes(t)) {
        Int v = subtree(t, id).value();
        if (buyer ? v < 0 : v > 0) return false;
      }
      for (const NodeId& id : leaves(t)) {
        const auto& l = subtree(t, id).as_leaf();
        // Some good must carry a quantity of the right sign. Goods other
        // than the leaf's own carry 0, which qualifies; with a single good
        // the leaf's own quantity is the only witness.
        bool other_good_exists = good_count >= 2 || l.good >= 2;
        bool own_ok = buyer ? l.quantity >= 0 : l.quantity <= 0;
        if (!own_ok && !other_good_exists) return false;
      }
      return true;
    }
    case Restriction::kGood:
      return t.is_leaf();
    case Restriction::kUnit: {
      for (const NodeId& id : leaves(t)) {
        const auto& l = subtree(t, id).as_leaf();
        if (l.quantity != 1 && l.quantity != -1) return false;
      }
      return true;
    }
  }
  throw InputError("unknown restriction");
}

std::optional<Restriction> restriction_from_string(const std::string& name) {
  if (name == "buyer") return Restriction::kBuyer;
  if (name == "seller") return Restriction::kSeller;
  if (name == "good") return Restriction::kGood;
  if (name == "unit") return Restriction::kUnit;
  return std::nullopt;
}

std::string restriction_name(Restriction r) {
  switch (r) {
    case Restriction::kBuyer: return "buyer";
    case Restriction::kSeller: return "seller";
    case Restriction::kGood: return "good";
    case Restriction::kUnit: return "unit";
  }
  return "?";
}

bool trees_equivalent(const BidTree& a, const BidTree& b, IntRange range,
                      int good_count, std::size_t budget,
                      std::vector<Int>* witness) {
  if (good_count < 1) throw InputError("good count must be >= 1");
  if (range.min_value > range.max_value) throw InputError("empty range");
  double domain = 1;
  for (int j = 0; j < good_count; ++j) {
    domain *= static_cast<double>(range.size());
    if (domain > static_cast<double>(budget))
      throw BudgetError("range too large for exhaustive equivalence");
  }
  std::vector<Int> trade(static_cast<std::size_t>(good_count),
                         range.min_value);
  for (;;) {
    auto va = trade_value(a, trade);
    auto vb = trade_value(b, trade);
    bool same = va.has_value() == vb.has_value() &&
                (!va.has_value() || va->value == vb->value);
    if (!same) {
      if (witness != nullptr) *witness = trade;
      return false;
    }
    // Odometer over the trade domain.
    int j = good_count - 1;
    while (j >= 0 && trade[static_cast<std::size_t>(j)] == range.max_value) {
      trade[static_cast<std::size_t>(j)] = range.min_value;
      --j;
    }
    if (j < 0) break;
    ++trade[static_cast<std::size_t>(j)];
  }
  return true;
}

// ---------------------------------------------------------------------------
// Surface syntax.

namespace {

struct TreeLexer {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos]))) {
      if (text[pos] == '\n') { ++line; col = 1; } else { ++col; }
      ++pos;
    }
  }
  bool eof() { skip_ws(); return pos >= text.size(); }
  char peek() { skip_ws(); return pos < text.size() ? text[pos] : '\0'; }
  char get() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", line, col);
    char c = text[pos++];
    ++col;
    return c;
  }
  void expect(char c) {
    int l = line, k = col;
    char got = get();
    if (got != c)
      throw ParseError(std::string("expected '") + c + "', got '" + got + "'",
                       l, k);
  }
  Int integer() {
    skip_ws();
    int l = line, k = col;
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
      ++pos; ++col;
    }
    std::size_t digits = 0;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos; ++col; ++digits;
    }
    if (digits == 0) throw ParseError("expected an integer", l, k);
    return std::stoll(text.substr(start, pos - start));
  }
  std::string ident() {
    skip_ws();
    int l = line, k = col;
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_')) {
      ++pos; ++col;
    }
    if (pos == start) throw ParseError("expected an identifier", l, k);
    return text.substr(start, pos - start);
  }
};

Good default_good(const std::string& name, const TreeLexer& lx) {
  if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'z')
    return name[0] - 'a' + 1;
  throw ParseError("unknown good name '" + name + "'", lx.line, lx.col);
}

Good parse_good(TreeLexer& lx, const std::map<std::string, Good>* good_names) {
  char c = lx.peek();
  if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
    Int g = lx.integer();
    if (g < 1)
      throw ParseError("good index must be >= 1", lx.line, lx.col);
    return static_cast<Good>(g);
  }
  std::string name = lx.ident();
  if (good_names != nullptr) {
    auto it = good_names->find(name);
    if (it == good_names->end())
      throw ParseError("unknown good name '" + name + "'", lx.line, lx.col);
    return it->second;
  }
  return default_good(name, lx);
}

BidTree parse_tree(TreeLexer& lx, const std::map<std::string, Good>* good_names);

std::vector<BidTree> parse_child_list(TreeLexer& lx,
                                      const std::map<std::string, Good>* names) {
  // Accepts "c1, ..., ck" with optional enclosing parentheses.
  bool parenthesized = false;
  if (lx.peek() == '(') { lx.get(); parenthesized = true; }
  std::vector<BidTree> cs;
  cs.push_back(parse_tree(lx, names));
  while (lx.peek() == ',') {
    lx.get();
    cs.push_back(parse_tree(lx, names));
  }
  if (parenthesized) lx.expect(')');
  return cs;
}

BidTree parse_tree(TreeLexer& lx, const std::map<std::string, Good>* names) {
  char c = lx.peek();
  if (c == '<') {
    lx.get();
    Int q = lx.integer();
    lx.expect(',');
    Good g = parse_good(lx, names);
    lx.expect(',');
    Int v = lx.integer();
    lx.expect('>');
    return BidTree::leaf(q, g, v);
  }
  int l = lx.line, k = lx.col;
  std::string head = lx.ident();
  if (head == "IC") {
    lx.expect('[');
    Int x = lx.integer();
    lx.expect(',');
    Int y = lx.integer();
    lx.expect(']');
    lx.expect('(');
    auto cs = parse_child_list(lx, names);
    lx.expect(';');
    Int v = lx.integer();
    lx.expect(')');
    if (x < 0 || x > y)
      throw ParseError("interval constraint requires 0 <= x <= y", l, k);
    return BidTree::ic(x, y, std::move(cs), v);
  }
  if (head == "XOR" || head == "AND" || head == "OR") {
    lx.expect('(');
    auto cs = parse_child_list(lx, names);
    lx.expect(';');
    Int v = lx.integer();
    lx.expect(')');
    if (head == "XOR") return BidTree::xor_of(std::move(cs), v);
    if (head == "AND") return BidTree::and_of(std::move(cs), v);
    return BidTree::or_of(std::move(cs), v);
  }
  throw ParseError("expected a bid tree", l, k);
}

}  // namespace

BidTree parse_bid_tree(const std::string& text,
                       const std::map<std::string, Good>* good_names) {
  TreeLexer lx{text};
  BidTree t = parse_tree(lx, good_names);
  if (!lx.eof())
    throw ParseError("trailing input after bid tree", lx.line, lx.col);
  return t;
}

std::string print_bid_tree(const BidTree& t,
                           const std::map<Good, std::string>* good_names) {
  std::ostringstream os;
  if (t.is_leaf()) {
    const auto& l = t.as_leaf();
    os << '<' << l.quantity << ',';
    auto it = good_names != nullptr ? good_names->find(l.good)
                                    : std::map<Good, std::string>::const_iterator{};
    if (good_names != nullptr && it != good_names->end())
      os << it->second;
    else
      os << l.good;
    os << ',' << l.value << '>';
    return os.str();
  }
  const auto& n = t.as_node();
  os << "IC[" << n.min_sat << ',' << n.max_sat << "](";
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    if (k > 0) os << ", ";
    os << print_bid_tree(n.children[k], good_names);
  }
  os << "; " << n.value << ')';
  return os.str();
}

}  // namespace cedl
