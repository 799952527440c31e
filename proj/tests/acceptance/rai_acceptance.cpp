// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "rai/agents/anomaly_agent.hpp"
#include "rai/agents/control_agent.hpp"
#include "rai/agents/hri_agent.hpp"
#include "rai/agents/react.hpp"
#include "rai/agents/tractor.hpp"
#include "rai/llm/hash_embedder.hpp"
#include "rai/llm/scripted.hpp"
#include "rai/scenario/runner.hpp"
#include "rai/sim/sim_node.hpp"
#include "rai/sim/world_io.hpp"
#include "rai/toolkit/builtin.hpp"
#include "rai/whoami/store.hpp"
#include "support/conformance.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
namespace mb = rai::msgbus;
namespace llm = rai::llm;
namespace sc = rai::scenario;
using nlohmann::json;
using rai::testing::Failure;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& ex) {
    o = {false, std::string("exception: ") + ex.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++g_failures;
  std::printf("%s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

sc::RunReport run(const std::string& name) { return sc::run_scenario(sc::load_config(fs::path(RAI_SCENARIO_DIR) / (name + ".json"))); }

std::vector<sc::TranscriptEvent> events_of(const sc::RunReport& r) { return sc::parse_transcript(r.transcript); }

std::vector<json> published(const std::vector<sc::TranscriptEvent>& events, const std::string& topic) {
  std::vector<json> out;
  for (const auto& e : events) {
    if (e.source == "bus" && e.kind == "pub" && e.payload.value("topic", "") == topic) out.push_back(e.payload["payload"]);
  }
  return out;
}

std::size_t count_world(const std::vector<sc::TranscriptEvent>& events, const std::string& kind) {
  std::size_t n = 0;
  for (const auto& e : events) n += e.source == "world" && e.kind == kind ? 1 : 0;
  return n;
}

const json& final_state(const std::vector<sc::TranscriptEvent>& events) {
  for (const auto& e : events) {
    if (e.kind == "scenario_end") return e.payload.at("final_state");
  }
  throw std::runtime_error("no scenario_end");
}

double point_box(double px, double py, const json& o) {
  const double dx = std::max(std::abs(px - o["x"].get<double>()) - o["hx"].get<double>(), 0.0);
  const double dy = std::max(std::abs(py - o["y"].get<double>()) - o["hy"].get<double>(), 0.0);
  return std::hypot(dx, dy);
}

std::string failed_checks(const sc::RunReport& r) {
  std::string out;
  for (const auto& c : r.checks) {
    if (!c.pass) out += (out.empty() ? "" : "; ") + c.name + " " + c.diagnosis;
  }
  return out;
}

Outcome bus_conformance() {
  const auto t0 = std::chrono::steady_clock::now();
  if (Failure f = rai::testing::codec_round_trips(10000, 2024)) return {false, *f};
  if (Failure f = rai::testing::publisher_fifo(1000, 5, 2024)) return {false, *f};
  const auto life = rai::testing::action_lifecycles(600, 2024);
  if (life.failure) return {false, *life.failure};
  if (life.goals < 500 || life.canceled == 0) return {false, "schedule too small"};
  const double secs = elapsed_since(t0);
  return {secs < 30.0, "10000 round trips, FIFO over 1000 publishes, " + std::to_string(life.goals) + " goals (" +
                           std::to_string(life.canceled) + " canceled), " + fmt("%.2f", secs) + " s < 30 s"};
}

Outcome retrieval_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);
  auto embedder = std::make_shared<llm::HashEmbedder>();
  std::size_t largest = 0;
  for (int store_no = 0; store_no < 100; ++store_no) {
    rai::whoami::ChunkStore store(embedder);
    const rai::whoami::ChunkingOptions options{32 + rng() % 64, rng() % 16};
    const std::size_t budget = 1 + rng() % 1000;
    std::vector<rai::whoami::SourceDocument> docs;
    std::size_t planned = 0;
    for (int d = 0; planned < budget; ++d) {
      std::string body = rai::testing::random_text(rng, 3 + rng() % 80);
      const std::size_t n = rai::whoami::chunk_count(body.size(), options);
      if (planned + n > 1000) break;
      planned += n;
      docs.push_back({"d" + std::to_string(d), "", std::move(body)});
    }
    if (docs.empty()) docs.push_back({"d0", "", "tractor"});
    store.ingest(docs, options);
    if (store.size() > 1000) return {false, "store " + std::to_string(store_no) + " exceeds 1000 chunks"};
    largest = std::max(largest, store.size());
    const std::string q = rai::testing::random_text(rng, 1 + rng() % 5);
    for (std::size_t k : {std::size_t{1}, std::size_t{5}, store.size() + 10}) {
      const auto got = store.query(q, k);
      const auto want = rai::testing::brute_force_top_k(store, q, k, llm::kDefaultEmbeddingDim);
      if (got.size() != want.size()) return {false, "size mismatch in store " + std::to_string(store_no)};
      for (std::size_t i = 0; i < got.size(); ++i) {
        if (got[i].chunk.doc_id != want[i].doc_id || got[i].chunk.seq != want[i].seq ||
            std::abs(got[i].score - want[i].score) > 1e-12) {
          return {false, "rank " + std::to_string(i) + " differs in store " + std::to_string(store_no)};
        }
      }
    }
  }
  const double secs = elapsed_since(t0);
  return {secs < 60.0, "100 stores (largest " + std::to_string(largest) + " chunks), k in {1, 5, size+10}, " +
                           fmt("%.2f", secs) + " s < 60 s"};
}

Outcome navigation() {
  const auto a = run("navigation");
  const auto b = run("navigation");
  if (a.transcript != b.transcript) return {false, "transcripts differ between runs"};
  if (a.exit_code != sc::kExitPass) return {false, failed_checks(a)};
  const auto events = events_of(a);
  std::vector<json> terminal;
  for (const auto& r : published(events, "mission/status")) {
    const auto s = r.value("status", "");
    if (s == "SUCCEEDED" || s == "FAILED") terminal.push_back(r);
  }
  if (terminal.size() != 1 || terminal[0]["status"] != "SUCCEEDED") {
    return {false, std::to_string(terminal.size()) + " terminal mission records"};
  }
  const auto& state = final_state(events);
  double distance = INFINITY;
  for (const auto& o : state["objects"]) {
    if (o["label"] == "chair") distance = std::min(distance, point_box(state["robot"]["x"], state["robot"]["y"], o));
  }
  if (distance > 0.25) return {false, "final distance " + fmt("%.3f", distance)};
  // The question must be answered within one iteration while the mission runs.
  std::int64_t mission_end = -1;
  for (const auto& e : events) {
    if (e.source == "bus" && e.kind == "pub" && e.payload.value("topic", "") == "mission/status" &&
        e.payload["payload"].value("status", "") == "SUCCEEDED") {
      mission_end = e.tick;
    }
  }
  int interleaved = 0;
  for (const auto& e : events) {
    if (e.source != "hri" || (e.kind != "turn" && e.kind != "relay")) continue;
    const int lat = e.payload.value("latency_iterations", -1);
    if (lat < 0 || lat > 1) return {false, e.kind + " latency " + std::to_string(lat)};
    if (e.kind == "turn" && e.payload.value("text", "").find("sensors") != std::string::npos && e.tick < mission_end) {
      ++interleaved;
    }
  }
  if (interleaved != 1) return {false, "operator question not answered during the mission"};
  return {true, "1 SUCCEEDED record, distance " + fmt("%.3f", distance) +
                    " <= 0.25, HRI latency <= 1 during the mission, transcript byte-identical"};
}

Outcome manipulation() {
  const auto t0 = std::chrono::steady_clock::now();
  for (const char* name : {"manipulation_sort", "manipulation_stack", "manipulation_swap"}) {
    const auto r = run(name);
    if (r.exit_code != sc::kExitPass) return {false, std::string(name) + ": " + failed_checks(r)};
    if (count_world(events_of(r), "manip_error") != 0) return {false, std::string(name) + " hit a manipulation error"};
  }
  for (const char* name : {"manipulation_naive_swap", "manipulation_place_inside"}) {
    const auto r = run(name);
    if (r.exit_code != sc::kExitPass) return {false, std::string(name) + ": " + failed_checks(r)};
    bool overlap = false;
    for (const auto& e : events_of(r)) {
      if (e.source == "world" && e.kind == "manip_error" && e.payload.value("error", "") == "OVERLAP") overlap = true;
    }
    if (!overlap) return {false, std::string(name) + " did not fail with OVERLAP"};
  }
  const double secs = elapsed_since(t0);
  return {secs < 10.0, "sorted, stacked and swapped pass; naive swap and place inside fail with OVERLAP, " +
                           fmt("%.2f", secs) + " s < 10 s"};
}

Outcome orchard() {
  const auto branch = run("orchard_branch_drive");
  const auto be = events_of(branch);
  bool completed = false;
  for (const auto& s : published(be, "tractor/status")) completed |= s.value("event", "") == "route_completed";
  if (count_world(be, rai::sim::kSafetyViolation) != 0 || !completed) return {false, "branch: " + failed_checks(branch)};

  const auto rock = run("orchard_rock_drive");
  const auto rv = count_world(events_of(rock), rai::sim::kSafetyViolation);
  if (rv != 1) return {false, "rock: " + std::to_string(rv) + " safety violations"};

  const auto crate = run("orchard_crate_replan");
  const auto ce = events_of(crate);
  const auto& state = final_state(ce);
  const json* box = nullptr;
  for (const auto& o : state["objects"]) {
    if (o.value("kind", "") == "crate") box = &o;
  }
  if (box == nullptr) return {false, "crate not found"};
  double clearance = state["min_clearance"].value((*box)["id"].get<std::string>(), -1.0);
  for (const auto& s : published(ce, "tractor/status")) {
    if (s.value("event", "") != "replanned") continue;
    const auto& w = s["waypoints"];
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      for (int k = 0; k <= 200; ++k) {
        const double t = k / 200.0;
        const double x = w[i]["x"].get<double>() + t * (w[i + 1]["x"].get<double>() - w[i]["x"].get<double>());
        const double y = w[i]["y"].get<double>() + t * (w[i + 1]["y"].get<double>() - w[i]["y"].get<double>());
        clearance = std::min(clearance, point_box(x, y, *box));
      }
    }
  }
  if (!(clearance >= 0.5) || crate.exit_code != sc::kExitPass) return {false, "crate clearance " + fmt("%.3f", clearance)};

  const auto person = run("orchard_person_exhausted");
  const auto res = published(events_of(person), "anomaly/resolutions");
  if (res.size() != 1 || res[0].value("resolution", "") != "abort_task") return {false, "exhaustion did not abort"};

  int parts[2] = {-1, -1};
  const char* visual_runs[] = {"orchard_branch_drive", "orchard_branch_visual"};
  for (int i = 0; i < 2; ++i) {
    for (const auto& e : events_of(i == 0 ? branch : run(visual_runs[i]))) {
      if (e.source == "supervisor" && e.kind == "session_open") parts[i] = e.payload.value("image_parts", -1);
    }
  }
  if (parts[0] != 0 || parts[1] != 1) {
    return {false, "image parts " + std::to_string(parts[0]) + " / " + std::to_string(parts[1])};
  }
  return {true, "branch 0 violations and route completed; rock 1 violation; crate clearance " +
                    fmt("%.3f", clearance) + " >= 0.5; exhaustion aborts; image parts 0 vs 1"};
}

Outcome agent_bounds() {
  mb::EventLoop loop;
  mb::Bus bus(loop, 9);
  rai::toolkit::ToolContext ctx;
  ctx.bus = &bus;
  const auto tools = rai::toolkit::builtin_registry();
  std::vector<llm::ScriptEntry> entries;
  for (int i = 0; i < 20; ++i) {
    entries.push_back({std::nullopt, llm::ModelReply::calls({{"c" + std::to_string(i), "publish_message",
                                                              {{"topic", "t/x"}, {"payload", "x"}}}})});
  }
  llm::ScriptedProvider adversary(entries);
  const auto r = rai::agents::react_loop({&adversary, &tools, 16, {}}, {llm::ChatMessage::user("go")}, ctx);
  if (adversary.calls() > 16 || r.final_text != rai::agents::kStepLimitText) {
    return {false, std::to_string(adversary.calls()) + " provider calls with max_steps 16"};
  }

  // One agent of every kind on one bus; stop them at random instants.
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    mb::EventLoop l;
    mb::Bus b(l, round);
    rai::sim::SimNode node(b, rai::sim::World(rai::sim::load_world(fs::path(RAI_SCENARIO_DIR) / "worlds/orchard.json")));
    node.start();
    rai::agents::AgentRuntime rt;
    auto silent = std::make_shared<llm::ScriptedProvider>(std::vector<llm::ScriptEntry>{});
    rai::agents::ConversationalConfig cc;
    cc.provider = silent;
    cc.tools = std::make_shared<rai::toolkit::ToolRegistry>(rai::agents::hri_registry());
    rt.add(std::make_unique<rai::agents::HriAgent>("hri", b, 100, cc));
    rt.add(std::make_unique<rai::agents::ControlAgent>("control", b, 70, rai::agents::ControlConfig{}));
    rai::agents::TractorConfig tc;
    tc.route = {{6, 6}, {30, 6}};
    rt.add(std::make_unique<rai::agents::TractorAgent>("tractor", b, 100, tc));
    rai::agents::AnomalyConfig ac;
    ac.provider = silent;
    rt.add(std::make_unique<rai::agents::AnomalyAgent>("anomaly", b, 130, ac));
    rt.run_all();
    l.run_for(static_cast<mb::Millis>(rng() % 3000));
    std::vector<std::uint64_t> at_stop;
    for (const auto& a : rt.agents()) at_stop.push_back(a->iterations());
    rt.stop_all();
    mb::Millis longest = 0;
    for (const auto& a : rt.agents()) longest = std::max(longest, a->period_ms());
    l.run_for(longest);
    for (std::size_t i = 0; i < at_stop.size(); ++i) {
      const auto& a = rt.agents()[i];
      if (a->state() != rai::agents::AgentState::kStopped || a->iterations() > at_stop[i] + 1) {
        return {false, a->id() + " still running one period after stop()"};
      }
    }
  }
  return {true, std::to_string(adversary.calls()) + " provider calls <= 16 on a 20-call script; 4 agent kinds stop within one iteration"};
}

Outcome determinism() {
  std::ifstream in(RAI_GOLDEN_HASHES);
  if (!in) return {false, "golden hash file missing"};
  const json golden = json::parse(in);
  int checked = 0;
  for (const auto& [name, expected] : golden.items()) {
    const auto config = sc::load_config(fs::path(RAI_SCENARIO_DIR) / (name + ".json"));
    for (int run_no = 0; run_no < 5; ++run_no) {
      const json got = sc::golden_hashes(config);
      if (got != expected) return {false, name + " run " + std::to_string(run_no) + ": " + got.dump()};
    }
    ++checked;
  }
  int shipped = 0;
  for (const auto& e : fs::directory_iterator(RAI_SCENARIO_DIR)) shipped += e.path().extension() == ".json" ? 1 : 0;
  if (checked != shipped) return {false, std::to_string(checked) + " of " + std::to_string(shipped) + " scenarios have golden hashes"};
  return {true, std::to_string(checked) + " scenarios x 5 runs match the recorded hashes at ticks 10, 100 and terminal"};
}

}  // namespace

int main() {
  criterion("bus conformance", bus_conformance);
  criterion("retrieval exactness", retrieval_exactness);
  criterion("navigation scenario", navigation);
  criterion("manipulation scenarios", manipulation);
  criterion("orchard scenario", orchard);
  criterion("agent loop bounds", agent_bounds);
  criterion("world determinism", determinism);
  return g_failures == 0 ? 0 : 1;
}
