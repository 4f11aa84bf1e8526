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

#ifndef CEDL_BASE_HPP_
#define CEDL_BASE_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cedl {

using Int = std::int64_t;
// Agents and goods are 1-based throughout the public API.
using Agent = int;
using Good = int;

struct CedlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed surface syntax; positions are 1-based.
struct ParseError : CedlError {
  ParseError(const std::string& what, int line, int col)
      : CedlError(what + " at line " + std::to_string(line) + ", column " +
                  std::to_string(col)),
        line(line),
        col(col) {}
  int line = 0;
  int col = 0;
};

// Invalid files, signatures, instances or arguments.
struct InputError : CedlError {
  using CedlError::CedlError;
};

// Undefined variable, infeasible value term, arithmetic overflow.
struct EvalError : CedlError {
  using CedlError::CedlError;
};

// A search budget (solver steps, path count, equivalence domain) ran out.
struct BudgetError : CedlError {
  using CedlError::CedlError;
};

struct IllegalActionError : CedlError {
  IllegalActionError(Agent agent, const std::string& what)
      : CedlError("agent " + std::to_string(agent) + ": " + what),
        agent(agent) {}
  Agent agent = 0;
};

// The closed integer interval I = [min_value, max_value] of representable
// quantities, prices and trades.
struct IntRange {
  Int min_value = 0;
  Int max_value = 0;

  bool contains(Int v) const { return min_value <= v && v <= max_value; }
  Int size() const { return max_value - min_value + 1; }
  bool operator==(const IntRange&) const = default;
};

// Dense agents x goods matrix of integers, 1-based accessors.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int agents, int goods, Int fill = 0)
      : agents_(agents), goods_(goods), cells_(
            static_cast<std::size_t>(agents) * static_cast<std::size_t>(goods),
            fill) {}

  int agents() const { return agents_; }
  int goods() const { return goods_; }

  Int at(Agent i, Good j) const { return cells_[index(i, j)]; }
  Int& at(Agent i, Good j) { return cells_[index(i, j)]; }

  // Row for one agent, goods in ascending order.
  std::vector<Int> row(Agent i) const {
    std::vector<Int> r(static_cast<std::size_t>(goods_));
    for (Good j = 1; j <= goods_; ++j) r[static_cast<std::size_t>(j - 1)] = at(i, j);
    return r;
  }

  // Agent-major, good-minor flattening; the order used by tie-breaking.
  const std::vector<Int>& flat() const { return cells_; }
  std::vector<Int>& flat() { return cells_; }

  bool operator==(const IntMatrix&) const = default;

 private:
  std::size_t index(Agent i, Good j) const {
    if (i < 1 || i > agents_ || j < 1 || j > goods_)
      throw InputError("matrix index (" + std::to_string(i) + "," +
                       std::to_string(j) + ") out of bounds");
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(goods_) +
           static_cast<std::size_t>(j - 1);
  }

  int agents_ = 0;
  int goods_ = 0;
  std::vector<Int> cells_;
};

// Addition with overflow detection; keeps term arithmetic honest even when
// intermediate results leave I.
inline Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw EvalError("integer overflow in addition");
  return r;
}

inline Int checked_sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw EvalError("integer overflow in subtraction");
  return r;
}

inline Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw EvalError("integer overflow in multiplication");
  return r;
}

}  // namespace cedl

#endif  // CEDL_BASE_HPP_
