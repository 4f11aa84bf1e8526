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
// Exact winner determination over bid trees, with deterministic
// tie-breaking and VCG payments.

#ifndef CEDL_WD_HPP_
#define CEDL_WD_HPP_

#include <vector>

#include "cedl/core.hpp"

namespace cedl {

struct WdSolution {
  JointTrade trade;
  // One satisfaction assignment per agent's bid, in agent order.
  std::vector<SatAssignment> sats;
  Int objective = 0;
};

// Maximizes the summed satisfied node values over all balanced trades that
// every agent can cover and all valid satisfaction assignments. The empty
// solution (zero trade, nothing satisfied) is always admissible, so the
// objective is never negative. Among optimal trades the lexicographically
// maximal one (agent-major, good-minor) is returned. budget caps the
// number of elementary search steps.
WdSolution solve_wd(const std::vector<BidTree>& bids,
                    const JointAllocation& alloc,
                    const AuctionSignature& sig,
                    std::size_t budget = 1u << 24);

// Lexicographically maximal trade under agent-major, good-minor
// flattening; throws InputError on an empty candidate set.
JointTrade tie_break(const std::vector<JointTrade>& candidates);

// VCG payment of agent i: her reported value under the chosen trade minus
// the externality discount obtained by re-solving with her bid replaced by
// the no-op and her allocation zeroed.
Int vcg_payment(const std::vector<BidTree>& bids,
                const JointAllocation& alloc, Agent i,
                const AuctionSignature& sig, std::size_t budget = 1u << 24);

}  // namespace cedl

#endif  // CEDL_WD_HPP_
