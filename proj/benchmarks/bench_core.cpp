#include <benchmark/benchmark.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "rai/llm/hash_embedder.hpp"
#include "rai/msgbus/bus.hpp"
#include "rai/msgbus/codec.hpp"
#include "rai/scenario/runner.hpp"
#include "rai/sim/perception.hpp"
#include "rai/sim/world.hpp"
#include "rai/sim/world_io.hpp"
#include "rai/whoami/store.hpp"

namespace mb = rai::msgbus;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarios = RAI_SCENARIO_DIR;

mb::Envelope sample_envelope() {
  mb::Envelope e;
  e.kind = mb::Kind::kPub;
  e.id = "0f8fad5b-d9cb-469f-a165-70867728950e";
  e.topic = "camera/detections";
  e.ts = 1700000000000;
  e.payload = {{"detections", json::array({{{"label", "chair"}, {"distance", 2.5}, {"bearing", 12.0}},
                                           {{"label", "table"}, {"distance", 4.1}, {"bearing", -30.5}}})}};
  return e;
}

std::string random_words(std::mt19937_64& rng, int n) {
  static const char* vocab[] = {"tractor", "orchard", "camera", "row", "branch", "rock", "battery", "lidar",
                                "wheel", "speed", "crate", "person", "apple", "tree", "signal", "route"};
  std::string s;
  for (int i = 0; i < n; ++i) s += std::string(i ? " " : "") + vocab[rng() % 16];
  return s;
}

}  // namespace

static void BM_EncodeEnvelope(benchmark::State& state) {
  const auto e = sample_envelope();
  for (auto _ : state) benchmark::DoNotOptimize(mb::encode_envelope(e));
}
BENCHMARK(BM_EncodeEnvelope);

static void BM_DecodeEnvelope(benchmark::State& state) {
  const auto frame = mb::encode_envelope(sample_envelope());
  for (auto _ : state) benchmark::DoNotOptimize(mb::decode_envelope(frame));
}
BENCHMARK(BM_DecodeEnvelope);

static void BM_PublishToSubscribers(benchmark::State& state) {
  mb::EventLoop loop;
  mb::Bus bus(loop, 1);
  std::vector<mb::Subscription> subs;
  for (int i = 0; i < state.range(0); ++i) subs.push_back(bus.subscribe("bench/topic", 1 << 20));
  const json payload{{"n", 1}};
  for (auto _ : state) {
    bus.publish("bench/topic", payload);
    for (auto& s : subs) benchmark::DoNotOptimize(s.try_pop());
  }
}
BENCHMARK(BM_PublishToSubscribers)->Arg(1)->Arg(8);

static void BM_ServiceRoundTrip(benchmark::State& state) {
  mb::EventLoop loop;
  mb::Bus bus(loop, 1);
  auto reg = bus.register_service("bench/echo", [](const json& r) { return r; });
  for (auto _ : state) benchmark::DoNotOptimize(bus.call_service("bench/echo", json{{"x", 1}}, 1000));
}
BENCHMARK(BM_ServiceRoundTrip);

static void BM_HashEmbed(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto text = random_words(rng, 100);
  for (auto _ : state) benchmark::DoNotOptimize(rai::llm::hash_embed(text));
}
BENCHMARK(BM_HashEmbed);

static void BM_ChunkStoreQuery(benchmark::State& state) {
  std::mt19937_64 rng(2);
  rai::whoami::ChunkStore store(std::make_shared<rai::llm::HashEmbedder>());
  std::vector<rai::whoami::SourceDocument> docs;
  for (int d = 0; d < state.range(0); ++d) docs.push_back({"d" + std::to_string(d), "", random_words(rng, 12)});
  store.ingest(docs, {256, 32});
  for (auto _ : state) benchmark::DoNotOptimize(store.query("which sensors does the tractor carry", 5));
  state.counters["chunks"] = static_cast<double>(store.size());
}
BENCHMARK(BM_ChunkStoreQuery)->Arg(100)->Arg(1000);

static void BM_WorldStep(benchmark::State& state) {
  const auto initial = rai::sim::load_world(kScenarios / "worlds/orchard.json");
  rai::sim::World w(initial);
  const rai::sim::Vec2 ends[] = {{34.0, 6.0}, {4.0, 6.0}};
  int leg = 0;
  w.set_nav_goal(ends[leg]);
  for (auto _ : state) {
    const auto& r = w.robot();
    if (std::hypot(r.x - ends[leg].x, r.y - ends[leg].y) < 0.1) {
      leg = 1 - leg;
      w.set_nav_goal(ends[leg]);
    }
    w.step();
  }
}
BENCHMARK(BM_WorldStep);

static void BM_Observe(benchmark::State& state) {
  const rai::sim::World w(rai::sim::load_world(kScenarios / "worlds/household.json"));
  for (auto _ : state) benchmark::DoNotOptimize(rai::sim::observe(w.state()));
}
BENCHMARK(BM_Observe);

static void BM_StateHash(benchmark::State& state) {
  const auto s = rai::sim::load_world(kScenarios / "worlds/orchard.json");
  for (auto _ : state) benchmark::DoNotOptimize(rai::sim::state_hash(s));
}
BENCHMARK(BM_StateHash);

static void BM_NavigationScenario(benchmark::State& state) {
  const auto config = rai::scenario::load_config(kScenarios / "navigation.json");
  for (auto _ : state) benchmark::DoNotOptimize(rai::scenario::run_scenario(config));
}
BENCHMARK(BM_NavigationScenario)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
