// Copyright 2026 The kappa-sync Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "kappa/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kappa/impossibility.hpp"

namespace kappa {

using nlohmann::json;

namespace {

constexpr std::uint64_t kDynamicsStream = 0x6479'6e61'6d69'6373ull;
constexpr std::uint64_t kSchedulerStream = 0x7363'6865'6475'6c65ull;

EdgeSet edges_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidScenario(where + ": expected an array of [u, v] pairs");
  EdgeSet edges;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
      throw InvalidScenario(where + ": edge must be a pair of node ids, got " + e.dump());
    }
    edges.push_back(Edge{e[0].get<NodeId>(), e[1].get<NodeId>()});
  }
  return edges;
}

json edges_json(const EdgeSet& edges) {
  json arr = json::array();
  for (const Edge& e : edges) arr.push_back({e.a, e.b});
  return arr;
}

std::size_t positive(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidScenario(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw InvalidScenario(std::string("field '") + key + "' must be an integer >= 1");
  }
  return v.get<std::size_t>();
}

double probability(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw InvalidScenario(std::string("field '") + key + "' must be a number");
  const double p = j.at(key).get<double>();
  if (p < 0 || p > 1) throw InvalidScenario(std::string("field '") + key + "' must lie in [0, 1]");
  return p;
}

CheckSpec checks_from(const json& j) {
  CheckSpec spec;
  if (!j.is_array()) throw InvalidScenario("'checks' must be an array");
  for (const auto& c : j) {
    if (c.is_string()) {
      const auto s = c.get<std::string>();
      if (s == "correctness") {
        spec.correctness = true;
      } else if (s == "strong-nontriviality") {
        spec.strong_nontriviality = true;
      } else if (s == "fairness") {
        spec.fairness = true;
      } else {
        throw InvalidScenario("unknown check '" + s + "'");
      }
    } else if (c.is_object() && c.contains("liveness")) {
      if (!c.at("liveness").is_number_unsigned()) throw InvalidScenario("liveness target must be an integer >= 0");
      spec.liveness = c.at("liveness").get<Phase>();
    } else {
      throw InvalidScenario("unrecognized check entry " + c.dump());
    }
  }
  return spec;
}

void validate(const ScenarioConfig& c) {
  if (c.n < 1) throw InvalidScenario("n must be >= 1");
  if (c.delta < 1 || c.delta > 64) throw InvalidScenario("delta must lie in [1, 64]");
  if (c.horizon < 1) throw InvalidScenario("horizon must be >= 1");
  if (!c.inputs.empty() && c.inputs.size() != c.n) throw InvalidScenario("inputs must list one value per node");
  make_algorithm(c.algorithm);
  validate_edge_set(normalize(c.initial), c.n, c.delta, "initial edge set");
  if (c.dynamics.kind == DynamicsPolicy::Kind::Scripted) {
    if (c.dynamics.script.empty()) throw InvalidScenario("scripted dynamics needs at least one stage");
    for (std::size_t t = 0; t < c.dynamics.script.size(); ++t) {
      validate_edge_set(normalize(c.dynamics.script[t]), c.n, c.delta, "dynamics stage " + std::to_string(t));
    }
  }
  Scheduler(c.scheduler, c.n);  // validates policy parameters and script ids
}

std::string join_stages(const std::vector<Stage>& r) {
  std::ostringstream out;
  for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
  return out.str();
}

std::string witnesses(const std::vector<verify::PairPhase>& v) {
  std::ostringstream out;
  for (std::size_t k = 0; k < std::min<std::size_t>(v.size(), 5); ++k) {
    out << (k ? "," : "") << '(' << v[k].u << '-' << v[k].v << '@' << v[k].phase << ')';
  }
  return v.empty() ? "-" : out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidScenario("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

CheckSpec parse_checks(const std::string& list) {
  json arr = json::array();
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (item.starts_with("liveness=")) {
      try {
        arr.push_back({{"liveness", std::stoull(item.substr(9))}});
      } catch (const std::exception&) {
        throw InvalidScenario("bad liveness target in '" + item + "'");
      }
    } else {
      arr.push_back(item);
    }
  }
  return checks_from(arr);
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  ScenarioConfig c;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw InvalidScenario("scenario must be a JSON object");
    c.name = j.value("name", std::string("unnamed"));
    c.n = positive(j, "n");
    c.delta = positive(j, "delta");
    c.horizon = positive(j, "horizon");
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw InvalidScenario("seed must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }

    const json dyn = j.value("dynamics", json{{"policy", "static"}});
    const std::string dpolicy = dyn.value("policy", std::string("static"));
    if (dyn.contains("initial")) c.initial = edges_from(dyn.at("initial"), "dynamics.initial");
    if (dpolicy == "static") {
      c.dynamics = DynamicsPolicy::make_static();
    } else if (dpolicy == "random-churn") {
      c.dynamics = DynamicsPolicy::random_churn(probability(dyn, "p_drop", 0.1), probability(dyn, "p_add", 0.1), 0);
    } else if (dpolicy == "scripted") {
      if (!dyn.contains("stages") || !dyn.at("stages").is_array()) {
        throw InvalidScenario("scripted dynamics needs a 'stages' array");
      }
      std::vector<EdgeSet> stages;
      for (std::size_t t = 0; t < dyn.at("stages").size(); ++t) {
        stages.push_back(edges_from(dyn.at("stages")[t], "dynamics.stages[" + std::to_string(t) + "]"));
      }
      c.dynamics = DynamicsPolicy::scripted(std::move(stages));
    } else {
      throw InvalidScenario("unknown dynamics policy '" + dpolicy + "'");
    }

    const json sch = j.value("scheduler", json{{"policy", "all-active"}});
    const std::string spolicy = sch.value("policy", std::string("all-active"));
    if (spolicy == "all-active") {
      c.scheduler = SchedulerPolicy::all_active();
    } else if (spolicy == "random-subset") {
      c.scheduler = SchedulerPolicy::random_subset(probability(sch, "p_activate", 0.5), positive(sch, "fairness_bound"), 0);
    } else if (spolicy == "sequential") {
      c.scheduler = SchedulerPolicy::sequential();
    } else if (spolicy == "scripted") {
      if (!sch.contains("stages") || !sch.at("stages").is_array()) {
        throw InvalidScenario("scripted scheduler needs a 'stages' array");
      }
      c.scheduler = SchedulerPolicy::scripted(sch.at("stages").get<std::vector<std::vector<NodeId>>>());
    } else {
      throw InvalidScenario("unknown scheduler policy '" + spolicy + "'");
    }

    if (j.contains("algorithm")) {
      const json& a = j.at("algorithm");
      c.algorithm = a.is_string() ? a.get<std::string>() : a.at("name").get<std::string>();
      if (a.is_object() && a.contains("inputs")) {
        for (const auto& v : a.at("inputs")) {
          if (!v.is_null() && !v.is_number_integer()) throw InvalidScenario("inputs must be integers or null");
          c.inputs.push_back(v.is_null() ? Input{} : Input{v.get<std::int64_t>()});
        }
      }
    }
    if (j.contains("checks")) c.checks = checks_from(j.at("checks"));
  } catch (const json::exception& e) {
    throw InvalidScenario(std::string("malformed scenario: ") + e.what());
  }
  reseed(c, c.seed);
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path)); }

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["n"] = c.n;
  j["delta"] = c.delta;
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  json dyn;
  switch (c.dynamics.kind) {
    case DynamicsPolicy::Kind::Static:
      dyn = {{"policy", "static"}, {"initial", edges_json(normalize(c.initial))}};
      break;
    case DynamicsPolicy::Kind::RandomChurn:
      dyn = {{"policy", "random-churn"},
             {"p_drop", c.dynamics.p_drop},
             {"p_add", c.dynamics.p_add},
             {"initial", edges_json(normalize(c.initial))}};
      break;
    case DynamicsPolicy::Kind::Scripted: {
      json stages = json::array();
      for (const EdgeSet& s : c.dynamics.script) stages.push_back(edges_json(normalize(s)));
      dyn = {{"policy", "scripted"}, {"stages", stages}};
      break;
    }
  }
  j["dynamics"] = dyn;
  switch (c.scheduler.kind) {
    case SchedulerPolicy::Kind::AllActive:
      j["scheduler"] = {{"policy", "all-active"}};
      break;
    case SchedulerPolicy::Kind::RandomSubset:
      j["scheduler"] = {{"policy", "random-subset"},
                        {"p_activate", c.scheduler.p_activate},
                        {"fairness_bound", c.scheduler.fairness_bound}};
      break;
    case SchedulerPolicy::Kind::Sequential:
      j["scheduler"] = {{"policy", "sequential"}};
      break;
    case SchedulerPolicy::Kind::Scripted:
      j["scheduler"] = {{"policy", "scripted"}, {"stages", c.scheduler.script}};
      break;
  }
  json alg = {{"name", c.algorithm}};
  if (!c.inputs.empty()) {
    json inputs = json::array();
    for (const Input& in : c.inputs) inputs.push_back(in ? json(*in) : json(nullptr));
    alg["inputs"] = inputs;
  }
  j["algorithm"] = alg;
  json checks = json::array();
  if (c.checks.correctness) checks.push_back("correctness");
  if (c.checks.strong_nontriviality) checks.push_back("strong-nontriviality");
  if (c.checks.liveness) checks.push_back({{"liveness", *c.checks.liveness}});
  if (c.checks.fairness) checks.push_back("fairness");
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

void reseed(ScenarioConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.dynamics.seed = splitmix64(seed ^ kDynamicsStream);
  config.scheduler.seed = splitmix64(seed ^ kSchedulerStream);
}

std::size_t expected_fairness_bound(const ScenarioConfig& c) {
  switch (c.scheduler.kind) {
    case SchedulerPolicy::Kind::AllActive:
      return 1;
    case SchedulerPolicy::Kind::RandomSubset:
      return c.scheduler.fairness_bound;
    case SchedulerPolicy::Kind::Sequential:
      return c.n;
    case SchedulerPolicy::Kind::Scripted:
      // Every node runs every stage once the script ends.
      return c.scheduler.script.size() + 1;
  }
  return c.horizon;
}

VerifyOutcome verify_trace(const RunTrace& trace, const PortAssignment& ports, const CheckSpec& spec,
                           std::size_t fairness_bound) {
  VerifyOutcome out;
  auto add = [&](std::string name, bool pass, std::string detail) {
    out.checks.push_back(CheckResult{std::move(name), pass, std::move(detail)});
  };

  try {
    out.synch = verify::extract_H(trace, ports);
    add("symmetry", true,
        "comparable_phases=" + std::to_string(out.synch->comparable_phases) +
            " pairs=" + std::to_string(out.synch->symmetric_pairs_checked));
  } catch (const verify::SymmetryViolation& e) {
    add("symmetry", false,
        "witness=" + std::to_string(e.u) + "-" + std::to_string(e.v) + " phase=" + std::to_string(e.phase));
  }

  const auto sandwich = verify::check_sandwich(trace);
  add("sandwich", sandwich.pass,
      "phases=" + std::to_string(sandwich.phases_checked) +
          (sandwich.pass ? "" : " first_failure=\"" + sandwich.first_failure + "\""));

  const auto pulled = verify::check_pulled_consistency(trace, ports);
  add("pulled-consistency", pulled.pass,
      "checked=" + std::to_string(pulled.checked) + " unverifiable=" + std::to_string(pulled.unverifiable));

  if (spec.correctness) {
    if (!out.synch) {
      add("correctness", false, "reason=no-H-sequence");
    } else {
      const auto algo = make_algorithm(trace.algorithm);
      const auto eq = verify::check_correctness(trace, ports, *algo, trace.inputs);
      std::string detail = "phases=" + std::to_string(eq.phases_compared) + " states=" + std::to_string(eq.states_compared);
      if (eq.first_divergence) {
        detail += " divergence_node=" + std::to_string(eq.first_divergence->node) +
                  " divergence_phase=" + std::to_string(eq.first_divergence->phase) +
                  " run=" + to_hex(eq.first_divergence->semi) + " reference=" + to_hex(eq.first_divergence->reference);
      }
      add("correctness", eq.pass, detail);
    }
  }

  if (spec.strong_nontriviality) {
    if (!out.synch) {
      add("strong-nontriviality", false, "reason=no-H-sequence");
    } else {
      const auto nt = verify::check_strong_nontriviality(trace, ports);
      add("strong-nontriviality", nt.pass,
          "pairs=" + std::to_string(nt.pairs_checked) + " edges_in_H=" + std::to_string(nt.edges_in_H) +
              " too_brief=" + std::to_string(nt.mutual_not_blocked) + " missing=" + witnesses(nt.missing) +
              " spurious=" + witnesses(nt.spurious) + " not_mutual=" + witnesses(nt.not_mutual));
    }
  }

  if (spec.liveness) {
    const auto lv = verify::check_liveness(trace, *spec.liveness, fairness_bound);
    std::string detail = "target=" + std::to_string(lv.target) + " reached=" + std::to_string(lv.reached) +
                         " monotone=" + (lv.monotone ? "yes" : "no") + " r=" + join_stages(lv.r) +
                         " longest_plateau=" + std::to_string(lv.longest_plateau) +
                         " window=" + std::to_string(lv.window);
    if (!lv.pass) detail += " stall=\"" + lv.stall_detail + "\"";
    add("liveness", lv.pass, detail);
  }

  if (spec.fairness) {
    const auto fv = fairness_audit(trace, fairness_bound);
    add("fairness", fv.ok,
        "max_gap=" + std::to_string(fv.max_gap) + " bound=" + std::to_string(fairness_bound) +
            " worst_node=" + std::to_string(fv.worst_node));
  }

  out.pass = std::all_of(out.checks.begin(), out.checks.end(), [](const CheckResult& c) { return c.pass; });
  return out;
}

std::string render_report(const std::string& title, const std::vector<std::string>& preamble,
                          const std::vector<CheckResult>& checks) {
  std::ostringstream out;
  out << "# " << title << '\n';
  for (const std::string& line : preamble) out << line << '\n';
  bool pass = true;
  for (const CheckResult& c : checks) {
    out << "check name=" << c.name << " status=" << (c.pass ? "PASS" : "FAIL") << (c.detail.empty() ? "" : " ")
        << c.detail << '\n';
    pass = pass && c.pass;
  }
  out << "RESULT " << (pass ? "PASS" : "FAIL") << '\n';
  return out.str();
}

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
  validate(config);
  const TimeVaryingGraph graph = generate(config.dynamics, config.n, config.delta, config.horizon, config.initial);
  const PortAssignment ports = assign_ports(graph);
  const auto algo = make_algorithm(config.algorithm);

  ScenarioOutcome out;
  out.trace = run(graph, ports, config.scheduler, *algo, config.inputs, config.horizon);
  const std::size_t bound = expected_fairness_bound(config);
  out.verdict = verify_trace(out.trace, ports, config.checks, bound);
  out.trace_text = trace_to_string(out.trace);

  SynchSequence seq;
  seq.n = config.n;
  seq.delta = config.delta;
  if (out.verdict.synch) seq.H = out.verdict.synch->H;
  out.h_text = hseq_to_string(seq);

  Phase min_phase = ~Phase{0};
  Phase max_phase = 0;
  for (const FinalNodeRecord& f : out.trace.final_nodes) {
    min_phase = std::min(min_phase, f.phase);
    max_phase = std::max(max_phase, f.phase);
  }
  const FairnessVerdict gaps = fairness_audit(out.trace, bound);
  std::ostringstream scen;
  scen << "scenario name=" << config.name << " n=" << config.n << " delta=" << config.delta
       << " horizon=" << config.horizon << " seed=" << config.seed;
  std::vector<std::string> preamble = {
      scen.str(),
      "graph generator=\"" + graph.generator_meta + "\" lifetime=" + std::to_string(graph.lifetime()) +
          " overrun_stages=" + std::to_string(out.trace.overrun_stages),
      "scheduler \"" + out.trace.scheduler + "\"",
      "algorithm " + config.algorithm,
      "phases min=" + std::to_string(min_phase) + " max=" + std::to_string(max_phase) +
          " comparable=" + std::to_string(out.trace.min_completed_phases()),
      "activation max_gap=" + std::to_string(gaps.max_gap),
  };
  out.report = render_report("kappa-sync scenario report", preamble, out.verdict.checks);
  return out;
}

void write_artifacts(const ScenarioOutcome& outcome, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "trace.jsonl", outcome.trace_text);
  write_file(out_dir / "H.json", outcome.h_text);
  write_file(out_dir / "report.txt", outcome.report);
}

SynthOutcome synth_from_synch(const SynchSequence& seq, const std::string& algorithm) {
  const auto built = verify::build_weak_nontriviality(seq.n, seq.delta, seq.H);
  SynthOutcome out;
  ScenarioConfig& c = out.scenario;
  c.name = "synth";
  c.n = seq.n;
  c.delta = seq.delta;
  c.horizon = built.horizon;
  c.dynamics = DynamicsPolicy::scripted(built.graph.stages);
  c.scheduler = built.scheduler;
  c.algorithm = algorithm;
  c.checks.correctness = true;
  out.run = run_scenario(c);

  const RunTrace& trace = out.run.trace;
  std::vector<EdgeSet> expected;
  for (const EdgeSet& h : seq.H) expected.push_back(normalize(h));
  out.round_trip = out.run.verdict.synch && out.run.verdict.synch->H == expected;

  out.phase_cadence = true;
  for (std::size_t i = 0; i < seq.H.size(); ++i) {
    const Stage end = 3 * i + 2;
    for (NodeId u = 0; u < seq.n; ++u) {
      const Phase p = end + 1 < trace.stages.size() ? trace.stages[end + 1].phases_at_start[u] : trace.final_nodes[u].phase;
      if (p != i + 1) out.phase_cadence = false;
    }
  }

  std::vector<CheckResult> checks = out.run.verdict.checks;
  checks.push_back({"round-trip", out.round_trip, "phases=" + std::to_string(seq.H.size())});
  checks.push_back({"phase-cadence", out.phase_cadence, "stages=" + std::to_string(built.horizon)});
  out.pass = out.run.verdict.pass && out.round_trip && out.phase_cadence;
  out.run.report = render_report(
      "kappa-sync synthesis report",
      {"synth n=" + std::to_string(seq.n) + " delta=" + std::to_string(seq.delta) +
           " phases=" + std::to_string(seq.H.size()) + " stages=" + std::to_string(built.horizon),
       "algorithm " + algorithm},
      checks);
  return out;
}

void write_synth_artifacts(const SynthOutcome& outcome, const std::filesystem::path& out_dir) {
  write_artifacts(outcome.run, out_dir);
  write_file(out_dir / "scenario.json", scenario_to_json(outcome.scenario));
}

DemoOutcome demo_impossibility(const std::string& protocol, std::size_t horizon) {
  DemoOutcome out;
  std::ostringstream report;
  bool pass = true;
  std::vector<std::string> names;
  if (protocol == "all") {
    names = verify::protocol_names();
    names.push_back("kappa-handshake");
  } else {
    names.push_back(protocol);
  }
  for (const std::string& name : names) {
    if (name == "kappa-handshake") {
      const auto d = verify::kappa_handshake_demo(horizon);
      report << verify::render(d);
      pass = pass && d.consistent;
    } else {
      const auto r = verify::impossibility_demo(*verify::make_protocol(name), horizon);
      report << verify::render(r);
      pass = pass && r.observations_identical && r.dilemma;
    }
  }
  report << "RESULT " << (pass ? "PASS" : "FAIL") << '\n';
  out.pass = pass;
  out.report = report.str();
  return out;
}

}  // namespace kappa
