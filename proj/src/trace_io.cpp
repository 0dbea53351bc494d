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

#include "kappa/trace_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace kappa {

using nlohmann::json;

namespace {

json ports_json(PortSet s) { return s.to_vector(); }

PortSet ports_from(const json& j) {
  PortSet s;
  for (const auto& p : j) s.insert(p.get<Port>());
  return s;
}

json edges_json(const EdgeSet& edges) {
  json arr = json::array();
  for (const Edge& e : edges) arr.push_back({e.a, e.b});
  return arr;
}

EdgeSet edges_from(const json& j) {
  EdgeSet edges;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw InvalidScenario("edge must be a [u, v] pair");
    edges.push_back(make_edge(e[0].get<NodeId>(), e[1].get<NodeId>()));
  }
  return normalize(std::move(edges));
}

json record(const char* kind, std::optional<Stage> stage, std::optional<NodeId> node, json payload) {
  json r;
  r["kind"] = kind;
  r["stage"] = stage ? json(*stage) : json(nullptr);
  r["node"] = node ? json(*node) : json(nullptr);
  r["payload"] = std::move(payload);
  return r;
}

ActionKind action_from(const std::string& s) {
  if (s == "handshake") return ActionKind::Handshake;
  if (s == "execute") return ActionKind::ExecuteSynch;
  throw InvalidScenario("unknown action kind '" + s + "'");
}

}  // namespace

void write_trace(std::ostream& out, const RunTrace& trace) {
  const std::size_t n = trace.n();
  json inputs = json::array();
  for (const Input& in : trace.inputs) inputs.push_back(in ? json(*in) : json(nullptr));
  out << record("header", std::nullopt, std::nullopt,
                {{"schema", RunTrace::kSchema},
                 {"n", n},
                 {"delta", trace.graph.delta},
                 {"horizon", trace.horizon},
                 {"lifetime", trace.graph.lifetime()},
                 {"overrun_stages", trace.overrun_stages},
                 {"overrun_policy", "freeze-last-edge-set"},
                 {"generator", trace.graph.generator_meta},
                 {"algorithm", trace.algorithm},
                 {"inputs", inputs},
                 {"scheduler", trace.scheduler},
                 {"fairness_bound", trace.fairness_bound}})
             .dump()
      << '\n';
  for (Stage t = 0; t < trace.graph.lifetime(); ++t) {
    out << record("graph", t, std::nullopt, {{"edges", edges_json(trace.graph.stages[t])}}).dump() << '\n';
  }

  std::vector<std::size_t> next_phase(n, 0);
  for (const StageRecord& rec : trace.stages) {
    out << record("stage", rec.t, std::nullopt, {{"phases", rec.phases_at_start}, {"active", rec.active}}).dump()
        << '\n';
    for (const auto& [u, lost] : rec.disconnects) {
      out << record("disconnect", rec.t, u, {{"ports", ports_json(lost)}}).dump() << '\n';
    }
    for (std::size_t k = 0; k < rec.active.size(); ++k) {
      const NodeId u = rec.active[k];
      if (rec.actions[k] == ActionKind::Handshake) {
        out << record("handshake", rec.t, u, json::object()).dump() << '\n';
        continue;
      }
      const PhaseRecord& pr = trace.phases[u].at(next_phase[u]++);
      json consumed = json::array();
      for (const auto& [p, bytes] : pr.consumed) consumed.push_back({p, to_hex(bytes)});
      out << record("execute", rec.t, u,
                    {{"phase", pr.phase},
                     {"first_activation", pr.first_activation},
                     {"P", ports_json(pr.P)},
                     {"I", ports_json(pr.I)},
                     {"Dtilde", ports_json(pr.Dtilde)},
                     {"F", ports_json(pr.F)},
                     {"state_before", to_hex(pr.state_before)},
                     {"state_after", to_hex(pr.state_after)},
                     {"consumed", consumed}})
                 .dump()
          << '\n';
    }
    for (const WriteEvent& w : rec.writes) {
      out << record("block-write", rec.t, w.writer, {{"target", w.target}, {"port", w.target_port}}).dump() << '\n';
    }
  }

  for (NodeId u = 0; u < trace.final_nodes.size(); ++u) {
    const FinalNodeRecord& f = trace.final_nodes[u];
    out << record("final", std::nullopt, u,
                  {{"phase", f.phase},
                   {"synch", f.synch},
                   {"open_phase_start", f.open_phase_start ? json(*f.open_phase_start) : json(nullptr)},
                   {"P", ports_json(f.P)},
                   {"Dtilde", ports_json(f.Dtilde)},
                   {"blocked", ports_json(f.blocked)},
                   {"enabled", to_string(f.enabled)}})
               .dump()
        << '\n';
  }
}

std::string trace_to_string(const RunTrace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

RunTrace read_trace(std::istream& in) {
  RunTrace trace;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json r = json::parse(line);
      const std::string kind = r.at("kind").get<std::string>();
      const json& p = r.at("payload");
      if (kind == "header") {
        if (p.at("schema").get<std::string>() != RunTrace::kSchema) {
          throw InvalidScenario("unsupported trace schema " + p.at("schema").dump());
        }
        trace.graph.n = p.at("n").get<std::size_t>();
        trace.graph.delta = p.at("delta").get<std::size_t>();
        trace.graph.generator_meta = p.at("generator").get<std::string>();
        trace.horizon = p.at("horizon").get<std::size_t>();
        trace.overrun_stages = p.at("overrun_stages").get<std::size_t>();
        trace.algorithm = p.at("algorithm").get<std::string>();
        for (const auto& v : p.at("inputs")) trace.inputs.push_back(v.is_null() ? Input{} : Input{v.get<std::int64_t>()});
        trace.scheduler = p.at("scheduler").get<std::string>();
        trace.fairness_bound = p.at("fairness_bound").get<std::size_t>();
        trace.phases.resize(trace.graph.n);
        have_header = true;
        continue;
      }
      if (!have_header) throw InvalidScenario("trace does not start with a header record");
      const auto node = [&] { return r.at("node").get<NodeId>(); };
      if (kind == "graph") {
        trace.graph.stages.push_back(edges_from(p.at("edges")));
      } else if (kind == "stage") {
        StageRecord rec;
        rec.t = r.at("stage").get<Stage>();
        rec.phases_at_start = p.at("phases").get<std::vector<Phase>>();
        rec.active = p.at("active").get<std::vector<NodeId>>();
        trace.stages.push_back(std::move(rec));
      } else if (kind == "disconnect") {
        trace.stages.back().disconnects.emplace_back(node(), ports_from(p.at("ports")));
      } else if (kind == "handshake") {
        trace.stages.back().actions.push_back(ActionKind::Handshake);
      } else if (kind == "execute") {
        trace.stages.back().actions.push_back(ActionKind::ExecuteSynch);
        PhaseRecord pr;
        pr.phase = p.at("phase").get<Phase>();
        pr.first_activation = p.at("first_activation").get<Stage>();
        pr.execute_stage = r.at("stage").get<Stage>();
        pr.P = ports_from(p.at("P"));
        pr.I = ports_from(p.at("I"));
        pr.Dtilde = ports_from(p.at("Dtilde"));
        pr.F = ports_from(p.at("F"));
        pr.state_before = from_hex(p.at("state_before").get<std::string>());
        pr.state_after = from_hex(p.at("state_after").get<std::string>());
        for (const auto& c : p.at("consumed")) {
          pr.consumed.emplace_back(c.at(0).get<Port>(), from_hex(c.at(1).get<std::string>()));
        }
        trace.phases.at(node()).push_back(std::move(pr));
      } else if (kind == "block-write") {
        trace.stages.back().writes.push_back(
            WriteEvent{node(), p.at("target").get<NodeId>(), p.at("port").get<Port>()});
      } else if (kind == "final") {
        FinalNodeRecord f;
        f.phase = p.at("phase").get<Phase>();
        f.synch = p.at("synch").get<bool>();
        if (!p.at("open_phase_start").is_null()) f.open_phase_start = p.at("open_phase_start").get<Stage>();
        f.P = ports_from(p.at("P"));
        f.Dtilde = ports_from(p.at("Dtilde"));
        f.blocked = ports_from(p.at("blocked"));
        f.enabled = action_from(p.at("enabled").get<std::string>());
        trace.final_nodes.push_back(f);
      } else {
        throw InvalidScenario("unknown trace record kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidScenario("malformed trace at line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw InvalidScenario("empty trace");
  trace.graph.validate();
  return trace;
}

std::string hseq_to_string(const SynchSequence& seq) {
  // One H_i per line so that sequences diff well.
  std::ostringstream out;
  out << "{\"schema\": " << json(SynchSequence::kSchema).dump() << ", \"n\": " << seq.n << ", \"delta\": " << seq.delta
      << ", \"H\": [";
  for (std::size_t i = 0; i < seq.H.size(); ++i) out << (i ? ",\n  " : "\n  ") << edges_json(seq.H[i]).dump();
  out << (seq.H.empty() ? "]}\n" : "\n]}\n");
  return out.str();
}

SynchSequence parse_hseq(const std::string& text) {
  SynchSequence seq;
  try {
    const json j = json::parse(text);
    if (j.contains("schema") && j.at("schema").get<std::string>() != SynchSequence::kSchema) {
      throw InvalidScenario("unsupported H-sequence schema " + j.at("schema").dump());
    }
    seq.n = j.at("n").get<std::size_t>();
    seq.delta = j.at("delta").get<std::size_t>();
    for (const auto& h : j.at("H")) seq.H.push_back(edges_from(h));
  } catch (const json::exception& e) {
    throw InvalidScenario(std::string("malformed H-sequence file: ") + e.what());
  }
  return seq;
}

}  // namespace kappa
