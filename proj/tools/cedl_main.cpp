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
// Command-line front end. Exit codes: 0 = ok / property holds, 1 =
// counterexample, budget exhausted or infeasible, 2 = input error, 3 =
// inconclusive.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cedl/io.hpp"
#include "cedl/logic.hpp"
#include "cedl/mech.hpp"
#include "cedl/protocols.hpp"
#include "cedl/tbbl.hpp"
#include "cedl/wd.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace cedl;

constexpr int kOk = 0;
constexpr int kCounterexample = 1;
constexpr int kInputError = 2;
constexpr int kInconclusive = 3;

struct Common {
  bool json_out = false;
  std::size_t horizon = 0;  // 0 picks the model default
  std::size_t max_paths = 1u << 21;
  std::uint64_t seed = 1;
  std::size_t budget = 1u << 24;
};

void add_common(CLI::App* cmd, Common* common) {
  cmd->add_flag("--json", common->json_out, "machine-readable JSON output");
  cmd->add_option("--horizon", common->horizon,
                  "stage bound (default: the model's own)");
  cmd->add_option("--max-paths", common->max_paths,
                  "abort when more path prefixes exist");
  cmd->add_option("--seed", common->seed, "seed for randomized generation");
  cmd->add_option("--budget", common->budget,
                  "work bound for embedded solver calls");
}

std::size_t pick_horizon(const Common& c, const StModel& model) {
  return c.horizon == 0 ? model.default_horizon() : c.horizon;
}

const std::map<Good, std::string>* names_of(const StModel& model) {
  return model.signature().good_names.empty() ? nullptr
                                              : &model.signature().good_names;
}

void check_protocol(const std::string& requested,
                    const LoadedInstance& inst) {
  if (!requested.empty() && requested != inst.protocol)
    throw InputError("the instance declares protocol '" + inst.protocol +
                     "', not '" + requested + "'");
}

std::string row_text(const State& w, const std::string& prefix, Agent i,
                     int goods) {
  std::string out = "(";
  for (Good j = 1; j <= goods; ++j) {
    if (j > 1) out += ", ";
    out += std::to_string(w.var(prefix + "_" + std::to_string(i) + "_" +
                                std::to_string(j)));
  }
  return out + ")";
}

void print_path(const StModel& model, const Path& p, std::ostream& os) {
  const auto* names = names_of(model);
  for (std::size_t t = 0; t < p.states.size(); ++t) {
    const State& w = p.states[t];
    os << "  [" << t << "]";
    if (!w.props.empty()) {
      os << " props:";
      for (const auto& q : w.props) os << " " << q;
    }
    os << " vars:";
    for (const auto& [k, v] : w.vars) os << " " << k << "=" << v;
    os << "\n";
    if (t < p.actions.size()) {
      os << "      does:";
      for (const BidTree& a : p.actions[t])
        os << " " << print_bid_tree(a, names);
      os << "\n";
    }
  }
}

json json_of_path(const StModel& model, const Path& p) {
  return json::parse(trace_to_json(model, p));
}

json json_of_counterexample(const StModel& model, const Counterexample& c) {
  json out;
  out["stage"] = c.stage;
  out["formula"] = c.formula;
  out["path"] = json_of_path(model, c.prefix);
  return out;
}

// ---------------------------------------------------------------------------
// run

int cmd_run(const Common& common, const LoadedInstance& inst,
            const std::string& bids_path, const std::string& policy,
            const std::string& out_path) {
  auto model = build_model(inst, common.budget);
  std::vector<JointAction> stages;
  if (!bids_path.empty())
    stages = load_bids(bids_path, model->signature());
  else if (policy.empty())
    throw InputError("run needs --bids or --policy");
  if (!policy.empty() && policy != "minimal")
    throw InputError("unknown policy: " + policy + " (try: minimal)");

  const std::size_t horizon = pick_horizon(common, *model);
  Path p;
  p.states.push_back(model->initial_state());
  while (!model->is_terminal(p.states.back()) && p.length() < horizon) {
    const std::size_t t = p.length();
    JointAction d;
    if (t < stages.size()) {
      d = stages[t];
    } else if (!policy.empty()) {
      for (Agent i = 1; i <= model->agents(); ++i) {
        auto acts = model->legal_actions(p.states.back(), i);
        if (acts.empty())
          throw InputError("agent " + std::to_string(i) +
                           " has no legal action at stage " +
                           std::to_string(t));
        d.push_back(acts.front());
      }
    } else {
      throw InputError("the run is still live after " +
                       std::to_string(stages.size()) +
                       " scripted stage(s); give more bids or --policy");
    }
    p.actions.push_back(d);
    p.states.push_back(step(*model, p.states.back(), d));
  }

  const bool finished = model->is_terminal(p.states.back());
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write trace to " + out_path);
    out << trace_to_json(*model, p) << "\n";
  }
  if (common.json_out) {
    std::cout << trace_to_json(*model, p) << "\n";
  } else {
    print_path(*model, p, std::cout);
    std::cout << (finished ? "terminal state reached after "
                           : "still live after ")
              << p.length() << " round(s)\n";
    const State& w = p.states.back();
    for (Agent i = 1; i <= model->agents(); ++i)
      std::cout << "agent " << i << ": trade "
                << row_text(w, "trade", i, model->goods()) << "  alloc "
                << row_text(w, "alloc", i, model->goods()) << "  payment "
                << w.var(payment_var(i)) << "\n";
  }
  if (!finished) {
    std::cerr << "the run did not reach a terminal state within horizon "
              << horizon << "\n";
    return kCounterexample;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// wd

int cmd_wd(const Common& common, const LoadedInstance& inst,
           const std::string& bids_path) {
  if (!inst.exchange)
    throw InputError("wd needs a ce or vcg instance with an allocation");
  const CeInstance& ce = *inst.exchange;
  auto stages = load_bids(bids_path, ce.signature);
  if (stages.size() != 1)
    throw InputError("wd expects exactly one stage of bids, got " +
                     std::to_string(stages.size()));
  const JointAction& bids = stages[0];
  const WdSolution sol =
      solve_wd(bids, ce.initial_allocation, ce.signature, common.budget);
  std::vector<Int> values;
  for (Agent i = 1; i <= ce.signature.agents; ++i) {
    const auto tv = trade_value(bids[static_cast<std::size_t>(i - 1)],
                                sol.trade.row(i), common.budget);
    values.push_back(tv ? tv->value : 0);
  }
  if (common.json_out) {
    json out;
    out["objective"] = sol.objective;
    json trade = json::array();
    for (Agent i = 1; i <= ce.signature.agents; ++i)
      trade.push_back(sol.trade.row(i));
    out["trade"] = std::move(trade);
    out["values"] = values;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "objective " << sol.objective << "\n";
    for (Agent i = 1; i <= ce.signature.agents; ++i) {
      std::cout << "agent " << i << ": trade (";
      const auto row = sol.trade.row(i);
      for (std::size_t k = 0; k < row.size(); ++k)
        std::cout << (k ? ", " : "") << row[k];
      std::cout << ")  value " << values[static_cast<std::size_t>(i - 1)]
                << "\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// value

int cmd_value(const Common& common, const std::string& tree_text,
              const std::string& trade_text) {
  const BidTree t = parse_bid_tree(tree_text);
  std::vector<Int> trade;
  std::stringstream ss(trade_text);
  std::string item;
  while (std::getline(ss, item, ','))
    trade.push_back(std::stoll(item));
  if (trade.empty()) throw InputError("--trade needs at least one entry");
  const auto tv = trade_value(t, trade, common.budget);
  if (common.json_out) {
    json out;
    if (tv) {
      out["value"] = tv->value;
    } else {
      out["value"] = nullptr;
      out["infeasible"] = true;
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << (tv ? std::to_string(tv->value) : "infeasible") << "\n";
  }
  return tv ? kOk : kCounterexample;
}

// ---------------------------------------------------------------------------
// equiv

int max_good(const BidTree& t) {
  int best = 1;
  for (const NodeId& id : leaves(t)) {
    const BidTree& sub = subtree(t, id);
    best = std::max(best, static_cast<int>(sub.as_leaf().good));
  }
  return best;
}

int cmd_equiv(const Common& common, const std::string& a_text,
              const std::string& b_text, std::vector<Int> range, int goods) {
  const BidTree a = parse_bid_tree(a_text);
  const BidTree b = parse_bid_tree(b_text);
  AuctionSignature sig;
  sig.agents = 1;
  sig.goods = goods > 0 ? goods : std::max(max_good(a), max_good(b));
  sig.range = {range[0], range[1]};
  sig.actions = {noop()};
  sig.variables = predefined_variables(1, sig.goods);
  std::vector<Int> witness;
  const bool same = trees_equivalent(a, b, sig, common.budget, &witness);
  if (common.json_out) {
    json out;
    out["equivalent"] = same;
    if (!same) out["witness"] = witness;
    std::cout << out.dump(2) << "\n";
  } else if (same) {
    std::cout << "equivalent\n";
  } else {
    std::cout << "not equivalent; witness trade (";
    for (std::size_t k = 0; k < witness.size(); ++k)
      std::cout << (k ? ", " : "") << witness[k];
    std::cout << ")\n";
  }
  return same ? kOk : kCounterexample;
}

// ---------------------------------------------------------------------------
// check

int cmd_check(const Common& common, const LoadedInstance& inst,
              bool ruleset, const std::string& formula_text,
              bool full_range) {
  auto model = build_model(inst, common.budget);
  const std::size_t horizon = pick_horizon(common, *model);
  const auto* names = names_of(*model);

  if (ruleset) {
    const std::vector<Rule> rules = build_ruleset(inst, full_range);
    const auto reports =
        check_model_of(*model, rules, horizon, common.max_paths,
                       common.budget);
    std::size_t failures = 0;
    bool complete = true;
    const RuleReport* first_bad = nullptr;
    std::map<std::string, std::pair<std::size_t, std::size_t>> families;
    for (const auto& r : reports) {
      auto& [valid, total] = families[r.name];
      ++total;
      if (r.verdict.valid) {
        ++valid;
      } else {
        ++failures;
        if (!first_bad) first_bad = &r;
      }
      complete = complete && r.verdict.stats.complete_coverage;
    }
    if (common.json_out) {
      json out;
      out["horizon"] = horizon;
      out["rules"] = json::array();
      for (const auto& r : reports) {
        json item;
        item["name"] = r.name;
        item["valid"] = r.verdict.valid;
        out["rules"].push_back(std::move(item));
      }
      out["all_valid"] = failures == 0;
      out["complete_coverage"] = complete;
      if (first_bad)
        out["counterexample"] = json_of_counterexample(
            *model, *first_bad->verdict.counterexample);
      std::cout << out.dump(2) << "\n";
    } else {
      for (const auto& [name, counts] : families)
        std::cout << name << ": " << counts.first << "/" << counts.second
                  << " valid\n";
      std::cout << reports.size() - failures << "/" << reports.size()
                << " rule instances valid at horizon " << horizon << "\n";
      if (first_bad) {
        const auto& c = *first_bad->verdict.counterexample;
        std::cout << "rule " << first_bad->name << " falsified at stage "
                  << c.stage << ":\n  " << c.formula << "\n";
        print_path(*model, c.prefix, std::cout);
      }
    }
    if (failures > 0) return kCounterexample;
    return complete ? kOk : kInconclusive;
  }

  if (formula_text.empty())
    throw InputError("check needs --ruleset or --formula");
  const auto good_index = [&] {
    std::map<std::string, Good> index;
    for (const auto& [g, n] : model->signature().good_names) index[n] = g;
    return index;
  }();
  const Formula f = parse_formula(formula_text, &good_index);
  const Verdict v =
      globally_true(*model, f, horizon, common.max_paths, common.budget);
  if (common.json_out) {
    json out;
    out["horizon"] = horizon;
    out["formula"] = print_formula(f, names);
    out["valid"] = v.valid;
    out["complete_coverage"] = v.stats.complete_coverage;
    out["states"] = v.stats.states_explored;
    out["paths"] = v.stats.path_count;
    if (v.counterexample)
      out["counterexample"] = json_of_counterexample(*model,
                                                     *v.counterexample);
    std::cout << out.dump(2) << "\n";
  } else if (v.valid) {
    std::cout << "valid at horizon " << horizon << " ("
              << v.stats.states_explored << " states, " << v.stats.path_count
              << " paths"
              << (v.stats.complete_coverage ? ", complete coverage" : "")
              << ")\n";
  } else {
    std::cout << "falsified at stage " << v.counterexample->stage << ":\n  "
              << v.counterexample->formula << "\n";
    print_path(*model, v.counterexample->prefix, std::cout);
  }
  if (!v.valid) return kCounterexample;
  return v.stats.complete_coverage ? kOk : kInconclusive;
}

// ---------------------------------------------------------------------------
// props

const char* verdict_name(PropertyVerdict v) {
  switch (v) {
    case PropertyVerdict::kHolds:
      return "holds";
    case PropertyVerdict::kCounterexample:
      return "counterexample";
    default:
      return "inconclusive";
  }
}

int verdict_exit(PropertyVerdict v) {
  switch (v) {
    case PropertyVerdict::kHolds:
      return kOk;
    case PropertyVerdict::kCounterexample:
      return kCounterexample;
    default:
      return kInconclusive;
  }
}

json json_of_report(const StModel& model, const PropertyReport& r) {
  json out;
  out["property"] = r.property;
  out["verdict"] = verdict_name(r.verdict);
  if (r.agent > 0) out["agent"] = r.agent;
  if (!r.note.empty()) out["note"] = r.note;
  out["states"] = r.stats.states_explored;
  out["paths"] = r.stats.path_count;
  out["complete_coverage"] = r.stats.complete_coverage;
  if (r.counterexample)
    out["counterexample"] = json_of_counterexample(model, *r.counterexample);
  return out;
}

void print_report(const StModel& model, const PropertyReport& r,
                  std::ostream& os) {
  os << r.property;
  if (r.agent > 0) os << " (agent " << r.agent << ")";
  os << ": " << verdict_name(r.verdict);
  if (!r.note.empty()) os << " (" << r.note << ")";
  os << "\n";
  if (r.verdict == PropertyVerdict::kCounterexample && r.counterexample) {
    os << "  at stage " << r.counterexample->stage << ": "
       << r.counterexample->formula << "\n";
    print_path(model, r.counterexample->prefix, os);
  }
}

int cmd_props(const Common& common, const LoadedInstance& inst,
              const std::string& property, Agent agent,
              const std::string& valuations_path, std::size_t profiles) {
  auto model = build_model(inst, common.budget);
  const std::size_t horizon = pick_horizon(common, *model);

  if (property == "ir") {
    std::vector<ValuationProfile> pool;
    if (!valuations_path.empty()) {
      pool.push_back(load_valuations(valuations_path));
    } else {
      for (std::size_t k = 0; k < profiles; ++k)
        pool.push_back(random_monotone_profile(model->signature(),
                                               common.seed + k));
    }
    std::vector<Agent> agents;
    if (agent > 0)
      agents.push_back(agent);
    else
      for (Agent i = 1; i <= model->agents(); ++i) agents.push_back(i);
    json all = json::array();
    PropertyVerdict worst = PropertyVerdict::kHolds;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      for (Agent i : agents) {
        const PropertyReport r =
            check_ir(*model, i, pool[k], horizon, common.max_paths);
        if (common.json_out) {
          json item = json_of_report(*model, r);
          item["profile"] = k;
          all.push_back(std::move(item));
        } else {
          std::cout << "profile " << k << " ";
          print_report(*model, r, std::cout);
        }
        if (r.verdict == PropertyVerdict::kCounterexample)
          worst = PropertyVerdict::kCounterexample;
        else if (r.verdict == PropertyVerdict::kInconclusive &&
                 worst == PropertyVerdict::kHolds)
          worst = PropertyVerdict::kInconclusive;
        if (worst == PropertyVerdict::kCounterexample) {
          if (common.json_out) std::cout << all.dump(2) << "\n";
          return kCounterexample;
        }
      }
    }
    if (common.json_out) std::cout << all.dump(2) << "\n";
    return verdict_exit(worst);
  }

  PropertyReport report;
  if (property == "bb")
    report = check_bb(*model, horizon, common.max_paths, common.budget);
  else if (property == "no-deficit")
    report =
        check_no_deficit(*model, horizon, common.max_paths, common.budget);
  else if (property == "termination")
    report = check_termination(*model, horizon, common.max_paths);
  else if (property == "playability")
    report = check_playability(*model, horizon, common.max_paths);
  else
    throw InputError("unknown property: " + property +
                     " (try: bb, no-deficit, ir, termination, playability)");
  if (common.json_out)
    std::cout << json_of_report(*model, report).dump(2) << "\n";
  else
    print_report(*model, report, std::cout);
  return verdict_exit(report.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"combinatorial exchange toolkit"};
  app.require_subcommand(1);

  Common common;
  std::string protocol, instance_path, bids_path, policy, out_path;
  std::string tree_a, tree_b, trade_text, formula_text, property;
  std::string valuations_path;
  std::vector<Int> range = {-8, 8};
  int goods = 0;
  Agent agent = 0;
  std::size_t profiles = 10;
  bool ruleset = false, full_range = false;

  CLI::App* run = app.add_subcommand("run", "simulate one auction run");
  run->add_option("--protocol", protocol, "ce, vcg or saa");
  run->add_option("--instance", instance_path, "instance file")->required();
  run->add_option("--bids", bids_path, "scripted bids file");
  run->add_option("--policy", policy,
                  "fill unscripted stages (minimal: first legal action)");
  run->add_option("--out", out_path, "write the JSON trace here");
  add_common(run, &common);

  CLI::App* wd = app.add_subcommand("wd", "solve winner determination");
  wd->add_option("--protocol", protocol, "ce or vcg");
  wd->add_option("--instance", instance_path, "instance file")->required();
  wd->add_option("--bids", bids_path, "one stage of bids")->required();
  add_common(wd, &common);

  CLI::App* value = app.add_subcommand("value", "evaluate a tree at a trade");
  value->add_option("--tree", tree_a, "bid tree")->required();
  value->add_option("--trade", trade_text, "comma-separated trade vector")
      ->required();
  add_common(value, &common);

  CLI::App* equiv = app.add_subcommand("equiv", "semantic tree equivalence");
  equiv->add_option("--tree-a", tree_a, "first tree")->required();
  equiv->add_option("--tree-b", tree_b, "second tree")->required();
  equiv->add_option("--range", range, "value range: min max")->expected(2);
  equiv->add_option("--goods", goods, "goods count (default: inferred)");
  add_common(equiv, &common);

  CLI::App* check = app.add_subcommand("check", "model-check formulas");
  check->add_option("--protocol", protocol, "ce, vcg or saa");
  check->add_option("--instance", instance_path, "instance file")->required();
  check->add_flag("--ruleset", ruleset, "check the protocol description");
  check->add_option("--formula", formula_text, "one formula to check");
  check->add_flag("--full-range", full_range,
                  "instantiate rules over the whole range");
  add_common(check, &common);

  CLI::App* props = app.add_subcommand("props", "mechanism properties");
  props->add_option("--protocol", protocol, "ce, vcg or saa");
  props->add_option("--instance", instance_path, "instance file")->required();
  props
      ->add_option("--property", property,
                   "bb, no-deficit, ir, termination or playability")
      ->required();
  props->add_option("--agent", agent, "agent for ir (default: all)");
  props->add_option("--valuations", valuations_path, "valuations file");
  props->add_option("--profiles", profiles,
                    "random monotone profiles when no valuations are given");
  add_common(props, &common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (app.got_subcommand(value))
      return cmd_value(common, tree_a, trade_text);
    if (app.got_subcommand(equiv))
      return cmd_equiv(common, tree_a, tree_b, range, goods);
    const LoadedInstance inst = load_instance(instance_path);
    check_protocol(protocol, inst);
    if (app.got_subcommand(run))
      return cmd_run(common, inst, bids_path, policy, out_path);
    if (app.got_subcommand(wd)) return cmd_wd(common, inst, bids_path);
    if (app.got_subcommand(check))
      return cmd_check(common, inst, ruleset, formula_text, full_range);
    if (app.got_subcommand(props))
      return cmd_props(common, inst, property, agent, valuations_path,
                       profiles);
    std::cerr << "no subcommand\n";
    return kInputError;
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kCounterexample;
  } catch (const CedlError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
