#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rai/msgbus/bus.hpp"
#include "rai/sim/checkers.hpp"
#include "rai/sim/manipulation.hpp"
#include "rai/sim/orchard.hpp"
#include "rai/sim/perception.hpp"
#include "rai/sim/sim_node.hpp"
#include "rai/sim/world.hpp"
#include "rai/sim/world_io.hpp"

using namespace rai::sim;
using nlohmann::json;
namespace mb = rai::msgbus;

namespace {

WorldObject block(std::string id, std::string label, double x, double y, double h = 0.3, double height = 1.0) {
  WorldObject o;
  o.id = std::move(id);
  o.label = std::move(label);
  o.pose = {x, y, 0};
  o.hx = h;
  o.hy = h;
  o.height = height;
  return o;
}

WorldState empty_world(double size = 20) {
  WorldState s;
  s.bounds = {{-size, -size}, {size, size}};
  return s;
}

// Turn-then-drive reference: at most max_turn degrees per tick until facing
// the goal, then speed per tick. Returns the ticks needed to arrive.
int oracle_ticks(Pose2D start, Vec2 goal, double speed = 0.5, double max_turn = 30.0) {
  double heading = start.heading;
  const double want = std::atan2(goal.y - start.y, goal.x - start.x) * 180.0 / kPi;
  double error = std::fmod(want - heading + 540.0, 360.0) - 180.0;
  int ticks = 0;
  while (std::abs(error) > 1e-6) {
    const double turn = std::max(-max_turn, std::min(max_turn, error));
    error -= turn;
    ++ticks;
  }
  const double d = std::hypot(goal.x - start.x, goal.y - start.y);
  return ticks + static_cast<int>(std::ceil(d / speed - 1e-12));
}

// Slab test: does the open segment a->b pass through the open box?
bool oracle_crosses(Vec2 a, Vec2 b, const Box& box) {
  double t0 = 0.0, t1 = 1.0;
  const double d[2] = {b.x - a.x, b.y - a.y};
  const double p[2] = {a.x, a.y};
  const double lo[2] = {box.min.x, box.min.y};
  const double hi[2] = {box.max.x, box.max.y};
  for (int i = 0; i < 2; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (p[i] <= lo[i] || p[i] >= hi[i]) return false;
      continue;
    }
    double ta = (lo[i] - p[i]) / d[i];
    double tb = (hi[i] - p[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t0 < t1;
}

struct NodeFixture : ::testing::Test {
  mb::EventLoop loop;
  mb::Bus bus{loop, 1};
};

}  // namespace

TEST(Geometry, Normalization) {
  EXPECT_DOUBLE_EQ(normalize_heading(-90), 270);
  EXPECT_DOUBLE_EQ(normalize_heading(720), 0);
  EXPECT_DOUBLE_EQ(normalize_bearing(270), -90);
  EXPECT_DOUBLE_EQ(normalize_bearing(-180), 180);
  EXPECT_NEAR(heading_to({0, 0}, {3, 4}), 53.130102354, 1e-6);
}

TEST(Geometry, SegmentEntryGrazingDoesNotCount) {
  const Box box{{0, 0}, {1, 1}};
  EXPECT_FALSE(segment_crosses({-1, 1}, {2, 1}, box));
  EXPECT_TRUE(segment_crosses({-1, 0.5}, {2, 0.5}, box));
  EXPECT_NEAR(*segment_entry({-1, 0.5}, {2, 0.5}, box), 1.0 / 3.0, 1e-12);
}

TEST(GeometryProperty, SegmentCrossingMatchesSlabOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 20000; ++i) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const Vec2 c{u(rng), u(rng)};
    const Box box = Box::around(c, 0.1 + std::abs(u(rng)) / 2, 0.1 + std::abs(u(rng)) / 2);
    ASSERT_EQ(segment_crosses(a, b, box), oracle_crosses(a, b, box));
  }
}

TEST(GeometryProperty, SegmentBoxDistanceIsSampledMinimum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    const Box box = Box::around({u(rng), u(rng)}, 0.5, 0.8);
    double sampled = 1e9;
    for (int k = 0; k <= 2000; ++k) sampled = std::min(sampled, point_box_distance(a + (b - a) * (k / 2000.0), box));
    const double got = segment_box_distance(a, b, box);
    ASSERT_LE(got, sampled + 1e-9);
    ASSERT_GE(got, sampled - distance(a, b) / 2000.0 - 1e-9);
  }
}

TEST(WorldStep, StraightRunTenTicks) {
  WorldState s = empty_world();
  World w(s);
  w.set_nav_goal(Vec2{5, 0});
  for (int i = 0; i < 10; ++i) w.step();
  EXPECT_NEAR(w.robot().x, 5.0, 1e-12);
  EXPECT_NEAR(w.robot().y, 0.0, 1e-12);
  EXPECT_EQ(w.tick(), 10);
}

TEST(WorldStep, ThreeFourFiveWithTurns) {
  World w(empty_world());
  w.set_nav_goal(Vec2{3, 4});
  const int expected = oracle_ticks(w.robot(), {3, 4});
  EXPECT_EQ(expected, 12);
  for (int i = 0; i < expected - 1; ++i) w.step();
  EXPECT_GT(w.distance_to_goal(), 1e-9);
  w.step();
  EXPECT_NEAR(w.distance_to_goal(), 0.0, 1e-9);
}

TEST(WorldStepProperty, ArrivalTickMatchesKinematicOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-8, 8), h(0, 360);
  for (int i = 0; i < 300; ++i) {
    WorldState s = empty_world();
    s.robot = {u(rng), u(rng), h(rng)};
    const Vec2 goal{u(rng), u(rng)};
    World w(s);
    w.set_nav_goal(goal);
    const int expected = oracle_ticks(s.robot, goal);
    for (int t = 0; t < expected; ++t) w.step();
    ASSERT_NEAR(w.distance_to_goal(), 0.0, 1e-6) << i;
  }
}

TEST(WorldStep, WallStopsAtContact) {
  WorldState s = empty_world();
  s.walls.push_back({{2, -1}, {2.2, 1}});
  World w(s);
  w.set_nav_goal(Vec2{5, 0});
  for (int i = 0; i < 30; ++i) w.step();
  EXPECT_NEAR(w.robot().x, 2.0, 1e-9);
  EXPECT_LE(w.robot().x, 2.0);
}

TEST(WorldStepProperty, NeverPenetratesSolids) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-6, 6);
  for (int i = 0; i < 100; ++i) {
    WorldState s = empty_world(10);
    s.robot = {-8, u(rng), 0};
    for (int k = 0; k < 6; ++k) {
      auto o = block("o" + std::to_string(k), "box", u(rng), u(rng), 0.6);
      bool clash = o.footprint().contains(s.robot.position());
      for (const auto& other : s.objects) clash = clash || o.footprint().inflated(0.01).overlaps(other.footprint());
      if (!clash) s.objects.push_back(o);
    }
    World w(s);
    w.set_nav_goal(Vec2{8, u(rng)});
    for (int t = 0; t < 60; ++t) {
      w.step();
      for (const auto& o : w.state().objects) ASSERT_FALSE(o.footprint().interior_contains(w.robot().position()));
    }
  }
}

TEST(WorldStep, HaltedWorldOnlyTicks) {
  World w(empty_world());
  w.set_nav_goal(Vec2{5, 0});
  w.halt(kAbortedByAgent);
  w.step();
  EXPECT_EQ(w.tick(), 1);
  EXPECT_EQ(w.robot().x, 0);
  EXPECT_EQ(w.state().outcome, kAbortedByAgent);
}

TEST(WorldInvariants, OverlapRejected) {
  WorldState s = empty_world();
  s.objects = {block("a", "cube", 0, 0), block("b", "cube", 0.2, 0)};
  EXPECT_THROW(World{s}, WorldError);
}

TEST(Perception, FovGate) {
  WorldState s = empty_world();
  s.objects = {block("side", "chair", 0, 3)};
  EXPECT_TRUE(observe(s).detections.empty());
}

TEST(Perception, ConfidenceFormula) {
  WorldState s = empty_world();
  s.objects = {block("c", "chair", 5, 0)};
  const auto obs = observe(s);
  ASSERT_EQ(obs.detections.size(), 1u);
  EXPECT_DOUBLE_EQ(obs.detections[0].confidence, 0.50);
  EXPECT_DOUBLE_EQ(obs.detections[0].distance, 5.0);
  EXPECT_NEAR(obs.detections[0].depth, 4.7, 1e-12);
}

TEST(Perception, SubstringQuerySortedByDistance) {
  WorldState s = empty_world();
  s.objects = {block("b", "blue_block", 4, 0.5), block("r", "red_block", 2, -0.5), block("c", "chair", 3, 2)};
  const auto obs = observe(s, {"block"});
  ASSERT_EQ(obs.detections.size(), 2u);
  EXPECT_EQ(obs.detections[0].id, "r");
  EXPECT_EQ(obs.detections[1].id, "b");
  EXPECT_EQ(observe(s, {"BLOCK"}).detections.size(), 2u);
}

TEST(Perception, Occlusion) {
  WorldState s = empty_world();
  s.objects = {block("front", "crate", 2, 0), block("back", "chair", 5, 0)};
  const auto obs = observe(s);
  ASSERT_EQ(obs.detections.size(), 1u);
  EXPECT_EQ(obs.detections[0].id, "front");
}

TEST(PerceptionProperty, SoundAndCompleteAgainstBruteForce) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-12, 12), h(0, 360);
  for (int i = 0; i < 300; ++i) {
    WorldState s = empty_world(15);
    s.robot = {u(rng), u(rng), h(rng)};
    for (int k = 0; k < 10; ++k) {
      auto o = block("o" + std::to_string(k), k % 2 ? "chair" : "table", u(rng), u(rng), 0.2 + (rng() % 5) / 10.0);
      bool clash = o.footprint().inflated(0.05).contains(s.robot.position());
      for (const auto& other : s.objects) clash = clash || o.footprint().inflated(0.01).overlaps(other.footprint());
      if (!clash) s.objects.push_back(o);
    }
    if (rng() % 2) s.walls.push_back(Box::around({u(rng), u(rng)}, 0.1, 2.0));
    const auto obs = observe(s);
    std::set<std::string> want;
    const Vec2 eye = s.robot.position();
    for (const auto& o : s.objects) {
      const Vec2 c = o.pose.position();
      const double d = std::hypot(c.x - eye.x, c.y - eye.y);
      double bearing = std::atan2(c.y - eye.y, c.x - eye.x) * 180.0 / kPi - s.robot.heading;
      bearing = std::fmod(bearing + 540.0, 360.0) - 180.0;
      if (d > s.params.range || std::abs(bearing) > s.params.fov) continue;
      bool blocked = false;
      for (const auto& w : s.walls) blocked = blocked || oracle_crosses(eye, c, w);
      for (const auto& other : s.objects) {
        if (other.id != o.id) blocked = blocked || oracle_crosses(eye, c, other.footprint());
      }
      if (!blocked) want.insert(o.id);
    }
    std::set<std::string> got;
    double last = -1;
    for (const auto& det : obs.detections) {
      got.insert(det.id);
      ASSERT_GE(det.distance, last);
      last = det.distance;
      ASSERT_NEAR(det.confidence, std::round((1.0 - det.distance / s.params.range) * 100) / 100, 1e-12);
    }
    ASSERT_EQ(got, want) << i;
  }
}

TEST(Manipulation, StackingRule) {
  WorldState s = empty_world();
  s.objects = {block("a", "red cube", 0, 0, 0.3, 0.5), block("b", "blue cube", 2, 0, 0.3, 0.7)};
  World w(s);
  ASSERT_TRUE(pick(w, "a").ok());
  ASSERT_TRUE(place_on(w, "b").ok());
  const auto* a = w.find("a");
  EXPECT_DOUBLE_EQ(a->z, 0.7);
  EXPECT_EQ(a->supported_by, "b");
  EXPECT_FALSE(w.check_invariants());
  EXPECT_EQ(pick(w, "b").error, ManipError::kTopOccupied);
}

TEST(Manipulation, ErrorCodes) {
  WorldState s = empty_world();
  s.objects = {block("a", "cube", 0, 0), block("b", "cube", 2, 0), block("c", "cube", 4, 0)};
  World w(s);
  EXPECT_EQ(place_at(w, 1, 1).error, ManipError::kNothingHeld);
  EXPECT_EQ(pick(w, "zz").error, ManipError::kNotFound);
  ASSERT_TRUE(pick(w, "a").ok());
  EXPECT_EQ(pick(w, "b").error, ManipError::kAlreadyHolding);
  EXPECT_EQ(place_at(w, 2.1, 0).error, ManipError::kOverlap);
  ASSERT_TRUE(place_on(w, "b").ok());
  ASSERT_TRUE(pick(w, "c").ok());
  EXPECT_EQ(place_on(w, "b").error, ManipError::kTopOccupied);
}

TEST(Manipulation, RequestDocument) {
  WorldState s = empty_world();
  s.objects = {block("a", "cube", 0, 0)};
  World w(s);
  EXPECT_EQ(handle_manip_request(w, {{"pick", "a"}})["ok"], true);
  const auto r = handle_manip_request(w, {{"pick", "a"}});
  EXPECT_EQ(r["ok"], false);
  EXPECT_EQ(r["error"], "ALREADY_HOLDING");
  EXPECT_EQ(handle_manip_request(w, {{"place_at", {{"x", 3}, {"y", 3}}}})["ok"], true);
  EXPECT_EQ(handle_manip_request(w, json::array())["error"], "BAD_REQUEST");
}

// Two-move swap collides; three moves through a free cell succeed.
TEST(Manipulation, SwapNeedsIntermediateCell) {
  WorldState s = empty_world();
  s.objects = {block("a", "cube", 0, 0), block("b", "cube", 2, 0)};
  const WorldState initial = s;
  {
    World w(s);
    ASSERT_TRUE(pick(w, "a").ok());
    EXPECT_EQ(place_at(w, 2, 0).error, ManipError::kOverlap);
  }
  World w(s);
  ASSERT_TRUE(pick(w, "a").ok());
  ASSERT_TRUE(place_at(w, 0, 3).ok());
  ASSERT_TRUE(pick(w, "b").ok());
  ASSERT_TRUE(place_at(w, 0, 0).ok());
  ASSERT_TRUE(pick(w, "a").ok());
  ASSERT_TRUE(place_at(w, 2, 0).ok());
  EXPECT_TRUE(check_swapped(w.state(), "a", "b", initial).pass);
}

TEST(ManipulationProperty, RandomOperationsKeepInvariants) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int round = 0; round < 200; ++round) {
    WorldState s = empty_world(5);
    for (int k = 0; k < 5; ++k) s.objects.push_back(block("o" + std::to_string(k), "cube", -4 + 2 * k, 0, 0.4, 0.5));
    World w(s);
    for (int op = 0; op < 30; ++op) {
      const std::string id = "o" + std::to_string(rng() % 5);
      switch (rng() % 3) {
        case 0: pick(w, id); break;
        case 1: place_at(w, u(rng), u(rng)); break;
        default: place_on(w, id); break;
      }
      ASSERT_FALSE(w.check_invariants()) << *w.check_invariants();
      // Acyclic support: every chain reaches the ground within n steps.
      for (const auto& o : w.state().objects) {
        const WorldObject* cur = &o;
        int steps = 0;
        while (!cur->supported_by.empty() && steps <= 5) {
          cur = w.find(cur->supported_by);
          ASSERT_NE(cur, nullptr);
          ++steps;
        }
        ASSERT_LE(steps, 5);
      }
    }
  }
}

TEST(Checkers, Sorted) {
  WorldState s = empty_world();
  s.regions = {{"cubes", {{-5, -5}, {0, 0}}}, {"veg", {{1, 1}, {5, 5}}}};
  s.objects = {block("c1", "red_cube", -2, -2), block("v1", "carrot", 3, 3)};
  EXPECT_TRUE(check_sorted(s, {{{"cube"}, "cubes"}, {{"carrot"}, "veg"}}).pass);
  s.objects[1].pose = {-3, -3, 0};
  const auto v = check_sorted(s, {{{"cube"}, "cubes"}, {{"carrot"}, "veg"}});
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.diagnosis.find("v1 outside veg"), std::string::npos);
}

TEST(Checkers, StackedChainWalk) {
  WorldState s = empty_world();
  auto a = block("A", "cube", 0, 0, 0.3, 1);
  auto c = block("C", "cube", 0, 0, 0.3, 1);
  c.z = 1;
  c.supported_by = "A";
  auto b = block("B", "cube", 0, 0, 0.3, 1);
  b.z = 2;
  b.supported_by = "C";
  s.objects = {a, b, c};
  const auto v = check_stacked(s, {"A", "B", "C"});
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.diagnosis, "level 1 expected B found C");
  EXPECT_TRUE(check_stacked(s, {"A", "C", "B"}).pass);
}

TEST(Checkers, SwapWithBUntouched) {
  WorldState initial = empty_world();
  initial.objects = {block("A", "cube", 0, 0), block("B", "cube", 2, 0)};
  WorldState now = initial;
  now.objects[0].pose = {0, 3, 0};
  const auto v = check_swapped(now, "A", "B", initial);
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.diagnosis.find("B not at A's origin"), std::string::npos);
}

TEST(Orchard, TraversabilityTable) {
  EXPECT_TRUE(obstacle_kind("branch").traversable);
  EXPECT_FALSE(obstacle_kind("rock").traversable);
  EXPECT_FALSE(obstacle_kind("crate").traversable);
  EXPECT_FALSE(obstacle_kind("person").traversable);
  EXPECT_THROW(obstacle_kind("cloud"), WorldError);
}

namespace {

World orchard_with(const std::string& kind) {
  WorldState s;
  s.bounds = {{0, 0}, {40, 12}};
  s.robot = {2, 6, 0};
  s.routes["row"] = {{6, 6}, {20, 6}, {34, 6}};
  World w(s);
  spawn_obstacle(w, kind, "row", 0, 0.5, "obs");
  return w;
}

}  // namespace

TEST(Orchard, SpawnOnSegment) {
  auto w = orchard_with("rock");
  const auto* o = w.find("obs");
  ASSERT_NE(o, nullptr);
  EXPECT_DOUBLE_EQ(o->pose.x, 13);
  EXPECT_DOUBLE_EQ(o->pose.y, 6);
  EXPECT_EQ(o->kind, "rock");
}

TEST(Orchard, DriveForwardBranchIsSafe) {
  auto w = orchard_with("branch");
  const auto r = resolve_anomaly(w, {{"obstacle", "obs"}, {"action", "drive_forward"}});
  EXPECT_EQ(r["violation"], false);
  EXPECT_FALSE(w.state().halted);
  EXPECT_TRUE(w.find("obs")->passable);
}

TEST(Orchard, DriveForwardRockViolates) {
  auto w = orchard_with("rock");
  const auto r = resolve_anomaly(w, {{"obstacle", "obs"}, {"action", "drive_forward"}});
  EXPECT_EQ(r["violation"], true);
  EXPECT_TRUE(w.state().halted);
  EXPECT_EQ(w.state().outcome, kSafetyViolation);
}

TEST(Orchard, AbortHalts) {
  auto w = orchard_with("person");
  resolve_anomaly(w, {{"obstacle", "obs"}, {"action", "abort_task"}});
  EXPECT_EQ(w.state().outcome, kAbortedByAgent);
}

TEST(Orchard, UnknownResolutionRefused) {
  auto w = orchard_with("crate");
  EXPECT_EQ(resolve_anomaly(w, {{"obstacle", "obs"}, {"action", "teleport"}})["ok"], false);
}

TEST(Orchard, CorridorSeesObstacleAhead) {
  auto w = orchard_with("crate");
  w.mutable_state().robot = {10.5, 6, 0};
  const auto* hit = corridor_obstacle(w.state());
  ASSERT_NE(hit, nullptr);
  EXPECT_EQ(hit->id, "obs");
  w.mutable_state().robot = {8, 6, 0};
  EXPECT_EQ(corridor_obstacle(w.state()), nullptr);
}

TEST(OrchardProperty, DetourClearanceAtLeastMargin) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ux(4, 36), uy(2, 10), frac(0.2, 0.8);
  for (int i = 0; i < 300; ++i) {
    WorldState s;
    s.bounds = {{0, 0}, {40, 12}};
    const Vec2 obstacle{ux(rng), uy(rng)};
    const double offset = 3 + frac(rng) * 2;
    s.robot = {obstacle.x - offset, obstacle.y + (frac(rng) - 0.5), 0};
    if (!s.bounds.contains(s.robot.position())) continue;
    s.objects.push_back(block("crate", "crate", obstacle.x, obstacle.y, 0.5));
    s.objects.back().kind = "crate";
    World w(s);
    const Vec2 to{std::min(39.0, obstacle.x + offset), obstacle.y};
    std::vector<Vec2> path;
    try {
      path = detour(w.state(), w.robot().position(), to, *w.find("crate"));
    } catch (const WorldError&) {
      continue;
    }
    path.insert(path.begin(), w.robot().position());
    const Box fp = w.find("crate")->footprint();
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      for (int t = 0; t <= 200; ++t) {
        ASSERT_GE(point_box_distance(path[k] + (path[k + 1] - path[k]) * (t / 200.0), fp), kDetourMargin - 1e-9);
      }
    }
  }
}

TEST_F(NodeFixture, NavRejectsOutOfBounds) {
  SimNode node(bus, World(empty_world()));
  node.start();
  auto h = bus.send_goal("nav/goto", {{"x", 1e6}, {"y", 0}});
  EXPECT_EQ(h.status(), mb::ActionStatus::kRejected);
}

TEST_F(NodeFixture, NavSucceedsWithinTolerance) {
  SimNode node(bus, World(empty_world()));
  node.start();
  auto h = bus.send_goal("nav/goto", {{"x", 3}, {"y", 4}});
  std::vector<double> remaining;
  auto [status, result] = h.await_result(10000);
  while (auto fb = h.pop_feedback()) remaining.push_back(fb->at("distance_remaining").get<double>());
  EXPECT_EQ(status, mb::ActionStatus::kSucceeded);
  EXPECT_LE(result["final_distance"].get<double>(), kNavTolerance);
  EXPECT_EQ(result["reached"], true);
  for (std::size_t i = 1; i < remaining.size(); ++i) EXPECT_LE(remaining[i], remaining[i - 1]);
}

TEST_F(NodeFixture, NavAbortsWhenWalledOff) {
  WorldState s = empty_world();
  s.walls = {{{4, 4}, {6, 4.2}}, {{4, 5.8}, {6, 6}}, {{4, 4}, {4.2, 6}}, {{5.8, 4}, {6, 6}}};
  SimNode node(bus, World(s));
  node.start();
  auto h = bus.send_goal("nav/goto", {{"x", 5}, {"y", 5}});
  auto [status, result] = h.await_result(60000);
  EXPECT_EQ(status, mb::ActionStatus::kAborted);
  EXPECT_EQ(result["reached"], false);
}

TEST_F(NodeFixture, NavHonorsCancel) {
  SimNode node(bus, World(empty_world()));
  node.start();
  auto h = bus.send_goal("nav/goto", {{"x", 10}, {"y", 0}});
  loop.run_for(300);
  EXPECT_EQ(bus.cancel_goal(h), mb::ActionStatus::kCanceled);
  const double x = node.world().robot().x;
  loop.run_for(1000);
  EXPECT_EQ(node.world().robot().x, x);
}

TEST_F(NodeFixture, DetectService) {
  WorldState s = empty_world();
  s.objects = {block("c", "chair", 3, 4)};
  SimNode node(bus, World(s));
  node.start();
  const auto r = bus.call_service("detect", {{"queries", {"chair"}}}, 1000);
  ASSERT_EQ(r["detections"].size(), 1u);
  EXPECT_EQ(r["detections"][0]["label"], "chair");
}

TEST_F(NodeFixture, SnapshotsEveryTenTicks) {
  SimNode node(bus, World(empty_world()), {100, 10});
  auto sub = bus.subscribe("world/snapshot");
  node.start();
  loop.run_for(3050);
  EXPECT_EQ(sub.size(), 3u);
}

TEST(WorldDeterminism, SameCommandsSameHashes) {
  auto run = [] {
    auto w = orchard_with("crate");
    std::vector<std::string> hashes;
    w.set_nav_goal(Vec2{10, 6});
    for (int t = 0; t < 40; ++t) {
      w.step();
      hashes.push_back(state_hash(w.state()));
    }
    return hashes;
  };
  EXPECT_EQ(run(), run());
}

TEST(WorldIo, RoundTrip) {
  const auto s = load_world(std::string(RAI_SCENARIO_DIR) + "/worlds/tabletop.json");
  EXPECT_FALSE(s.regions.empty());
  const auto again = world_from_json(to_json(s));
  EXPECT_EQ(canonical_state(again), canonical_state(s));
}

TEST(WorldIo, BadDocument) { EXPECT_THROW(world_from_json(json{{"bounds", "x"}}), WorldError); }
