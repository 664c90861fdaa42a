#include <benchmark/benchmark.h>

#include <optional>

#include "cdf/config.hpp"
#include "cdf/harness.hpp"
#include "cdf/inference.hpp"
#include "cdf/sim.hpp"

using namespace cdf;

namespace {

const WorldMap& world() {
  static const WorldMap w = build_t_intersection(WorldConfig{});
  return w;
}

AgentsState spawn(Intent intent, double ttc, const SimParams& sp) {
  const Path& opath = world().path(intent);
  const Path& epath = world().ego_path();
  const auto conflict = world().conflict(Intent::TurnLeft);
  const double s_hold = hold_stop_s(opath, sp.obstacle_vehicle.footprint);
  const Vec2 op = opath.line.point_at(s_hold);
  const double s_ego = conflict->s_on_ego_path - sp.behavior.ego_target_speed * ttc;
  const Vec2 ep = epath.line.point_at(s_ego);

  AgentsState st;
  st.pose.obstacle = {op.x, op.y, opath.line.heading_at(s_hold), 0.0};
  st.pose.ego = {ep.x, ep.y, epath.line.heading_at(s_ego), sp.behavior.ego_target_speed};
  st.obstacle_ctrl.intent = intent;
  st.obstacle_ctrl.yield_state = YieldState::Approaching;
  st.obstacle_ctrl.path = &opath;
  st.ego_ctrl.intent = Intent::Straight;
  st.ego_ctrl.yield_state = YieldState::Proceeding;
  st.ego_ctrl.path = &epath;
  return st;
}

}  // namespace

static void BM_BicycleStep(benchmark::State& state) {
  VehicleParams p;
  VehiclePose pose{0.0, 0.0, 0.3, 10.0};
  const ControlInput u{0.5, 0.1};
  const ProcessNoise n{0.01, 0.001};
  for (auto _ : state) {
    pose = step(pose, u, n, p, 0.1);
    benchmark::DoNotOptimize(pose);
  }
}
BENCHMARK(BM_BicycleStep);

static void BM_EgoControlTick(benchmark::State& state) {
  SimParams sp;
  AgentsState st = spawn(Intent::TurnLeft, 4.3, sp);
  ControllerState ctrl = st.ego_ctrl;
  for (auto _ : state) {
    auto out = ego_control(st.pose.ego, st.pose.obstacle, ctrl, sp.ego_vehicle,
                           sp.behavior, sp.dt);
    ctrl = out.second;
    benchmark::DoNotOptimize(out.first);
  }
}
BENCHMARK(BM_EgoControlTick);

static void BM_GenerativeTick(benchmark::State& state) {
  SimParams sp;
  Rng rng(5);
  AgentsState st = spawn(Intent::TurnLeft, 4.3, sp);
  for (auto _ : state) {
    StepRecord rec = advance(st, world(), sp, std::nullopt, std::nullopt, rng);
    benchmark::DoNotOptimize(rec);
    if (st.tick >= 100) st = spawn(Intent::TurnLeft, 4.3, sp);
  }
}
BENCHMARK(BM_GenerativeTick);

// One filtered episode chunk: init plus 50 propagate/weigh/resample rounds
// with the particle count on the x axis.
static void BM_FilterChunk(benchmark::State& state) {
  SimParams sp;
  InferenceParams ip;
  ip.n_particles = static_cast<int>(state.range(0));
  for (auto _ : state) {
    AgentsState truth = spawn(Intent::TurnLeft, 4.3, sp);
    Rng world_rng = Rng::substream(11, 0);
    ParticleFilter pf(world(), sp, ip, Rng::substream(11, 1));
    pf.init(truth.pose, truth.obstacle_ctrl, truth.ego_ctrl);
    for (int k = 0; k < 50; ++k) {
      StepRecord rec = advance(truth, world(), sp, std::nullopt, std::nullopt, world_rng);
      pf.step(rec.ego_u, truth.pose);
    }
    benchmark::DoNotOptimize(pf.ess());
  }
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_FilterChunk)->Arg(100)->Arg(1000);

static void BM_Episode(benchmark::State& state) {
  Config cfg;
  const WorldMap& w = world();
  const Mode mode = state.range(0) == 0 ? Mode::Cdf : Mode::Reactive;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    EpisodeResult r = run_episode(cfg, w, mode, seed++);
    benchmark::DoNotOptimize(r.min_gap);
  }
}
BENCHMARK(BM_Episode)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
