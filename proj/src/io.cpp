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

#include "cedl/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cedl/logic.hpp"
#include "json.hpp"

namespace cedl {
namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError("failed to parse " + what + ": " + e.what());
  }
}

Int get_int(const json& j, const std::string& what) {
  if (!j.is_number_integer())
    throw InputError(what + " must be an integer");
  return j.get<Int>();
}

// Good names from the optional array; position k names good k+1.
void read_good_names(const json& sig_json, AuctionSignature* sig) {
  if (!sig_json.contains("good_names")) return;
  const json& names = sig_json.at("good_names");
  if (!names.is_array() ||
      names.size() != static_cast<std::size_t>(sig->goods))
    throw InputError("good_names must list one name per good");
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (!names[k].is_string())
      throw InputError("good_names entries must be strings");
    sig->good_names[static_cast<Good>(k + 1)] = names[k].get<std::string>();
  }
}

std::map<std::string, Good> name_index(const AuctionSignature& sig) {
  std::map<std::string, Good> index;
  for (const auto& [good, name] : sig.good_names) index[name] = good;
  return index;
}

AuctionSignature read_signature(const json& j) {
  if (!j.is_object()) throw InputError("signature must be an object");
  AuctionSignature sig;
  sig.agents = static_cast<int>(get_int(j.at("agents"), "agents"));
  sig.goods = static_cast<int>(get_int(j.at("goods"), "goods"));
  const json& range = j.at("range");
  if (!range.is_array() || range.size() != 2)
    throw InputError("range must be [min, max]");
  sig.range.min_value = get_int(range[0], "range minimum");
  sig.range.max_value = get_int(range[1], "range maximum");
  if (sig.agents < 1 || sig.goods < 1)
    throw InputError("signature needs at least one agent and one good");
  read_good_names(j, &sig);
  const auto names = name_index(sig);
  if (j.contains("actions")) {
    const json& actions = j.at("actions");
    if (!actions.is_array()) throw InputError("actions must be an array");
    for (const json& a : actions) {
      if (!a.is_string()) throw InputError("actions must be tree strings");
      sig.actions.push_back(parse_bid_tree(a.get<std::string>(), &names));
    }
  }
  if (std::find(sig.actions.begin(), sig.actions.end(), noop()) ==
      sig.actions.end())
    sig.actions.insert(sig.actions.begin(), noop());
  sig.variables = predefined_variables(sig.agents, sig.goods);
  return sig;
}

json json_of_state(const StModel& model, const State& w) {
  json props = json::array();
  for (const auto& p : w.props) props.push_back(p);
  json vars = json::object();
  for (const auto& [name, value] : w.vars) vars[name] = value;
  json out;
  out["props"] = std::move(props);
  out["vars"] = std::move(vars);
  (void)model;
  return out;
}

}  // namespace

LoadedInstance parse_instance(const std::string& text) {
  const json j = parse_json(text, "the instance");
  if (!j.is_object()) throw InputError("the instance must be an object");
  LoadedInstance out;
  if (!j.contains("protocol") || !j.at("protocol").is_string())
    throw InputError("the instance needs a protocol: ce, vcg or saa");
  out.protocol = j.at("protocol").get<std::string>();
  AuctionSignature sig = read_signature(j.at("signature"));
  if (out.protocol == "ce" || out.protocol == "vcg") {
    CeInstance inst;
    inst.signature = std::move(sig);
    const json& rows = j.at("initial_allocation");
    if (!rows.is_array() ||
        rows.size() != static_cast<std::size_t>(inst.signature.agents))
      throw InputError("initial_allocation must list one row per agent");
    inst.initial_allocation =
        IntMatrix(inst.signature.agents, inst.signature.goods);
    for (Agent i = 1; i <= inst.signature.agents; ++i) {
      const json& row = rows[static_cast<std::size_t>(i - 1)];
      if (!row.is_array() ||
          row.size() != static_cast<std::size_t>(inst.signature.goods))
        throw InputError("initial_allocation rows must list one entry "
                         "per good");
      for (Good g = 1; g <= inst.signature.goods; ++g)
        inst.initial_allocation.at(i, g) =
            get_int(row[static_cast<std::size_t>(g - 1)], "allocation entry");
    }
    validate_instance(inst);
    out.exchange = std::move(inst);
  } else if (out.protocol == "saa") {
    SaaInstance inst;
    inst.signature = std::move(sig);
    inst.start = get_int(j.at("start"), "start");
    inst.increment = get_int(j.at("inc"), "inc");
    validate_instance(inst);
    out.ascending = std::move(inst);
  } else {
    throw InputError("unknown protocol: " + out.protocol);
  }
  return out;
}

LoadedInstance load_instance(const std::string& path) {
  try {
    return parse_instance(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::unique_ptr<StModel> build_model(const LoadedInstance& inst,
                                     std::size_t solver_budget) {
  if (inst.protocol == "ce") return build_ce(*inst.exchange, solver_budget);
  if (inst.protocol == "vcg") return build_vcg(*inst.exchange, solver_budget);
  return build_saa(*inst.ascending);
}

std::vector<Rule> build_ruleset(const LoadedInstance& inst, bool full_range,
                                std::size_t max_rules) {
  if (inst.protocol == "ce")
    return ruleset_ce(*inst.exchange, full_range, max_rules);
  if (inst.protocol == "vcg")
    return ruleset_vcg(*inst.exchange, full_range, max_rules);
  return ruleset_saa(*inst.ascending, full_range, max_rules);
}

std::vector<JointAction> parse_bids(const std::string& text,
                                    const AuctionSignature& sig) {
  json j = parse_json(text, "the bids");
  if (j.is_object() && j.contains("stages")) j = j.at("stages");
  if (!j.is_array()) throw InputError("bids must be an array of stages");
  // A flat array of strings is a single stage.
  if (!j.empty() && j.front().is_string()) j = json::array({j});
  const auto names = name_index(sig);
  std::vector<JointAction> stages;
  for (const json& stage : j) {
    if (!stage.is_array() ||
        stage.size() != static_cast<std::size_t>(sig.agents))
      throw InputError("each stage must list one bid per agent (" +
                       std::to_string(sig.agents) + ")");
    JointAction d;
    for (const json& b : stage) {
      if (!b.is_string()) throw InputError("bids must be tree strings");
      d.push_back(parse_bid_tree(b.get<std::string>(), &names));
    }
    stages.push_back(std::move(d));
  }
  return stages;
}

std::vector<JointAction> load_bids(const std::string& path,
                                   const AuctionSignature& sig) {
  try {
    return parse_bids(read_file(path), sig);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

ValuationProfile parse_valuations(const std::string& text) {
  const json j = parse_json(text, "the valuations");
  if (!j.is_object() || !j.contains("agents"))
    throw InputError("valuations must be an object with an agents array");
  ValuationProfile profile;
  if (j.contains("baseline"))
    profile.baseline = get_int(j.at("baseline"), "baseline");
  const json& agents = j.at("agents");
  if (!agents.is_array())
    throw InputError("valuations agents must be an array");
  for (const json& table : agents) {
    if (!table.is_array())
      throw InputError("each agent's valuations must be an array of "
                       "[trade, value] pairs");
    std::map<std::vector<Int>, Int> rows;
    for (const json& pair : table) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_array())
        throw InputError("valuation entries must be [trade, value] pairs");
      std::vector<Int> trade;
      for (const json& q : pair[0])
        trade.push_back(get_int(q, "trade entry"));
      rows[std::move(trade)] = get_int(pair[1], "valuation");
    }
    profile.tables.push_back(std::move(rows));
  }
  return profile;
}

ValuationProfile load_valuations(const std::string& path) {
  try {
    return parse_valuations(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string state_to_json(const StModel& model, const State& w) {
  return json_of_state(model, w).dump(2);
}

std::string trace_to_json(const StModel& model, const Path& p) {
  const auto* names = model.signature().good_names.empty()
                          ? nullptr
                          : &model.signature().good_names;
  json out = json::array();
  for (std::size_t t = 0; t < p.states.size(); ++t) {
    json entry;
    entry["stage"] = t;
    entry["state"] = json_of_state(model, p.states[t]);
    if (t < p.actions.size()) {
      json acts = json::array();
      for (const BidTree& a : p.actions[t])
        acts.push_back(print_bid_tree(a, names));
      entry["joint_action"] = std::move(acts);
    }
    out.push_back(std::move(entry));
  }
  return out.dump(2);
}

}  // namespace cedl
