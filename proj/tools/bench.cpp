// Timing comparison of the OpenMP kernels against their serial references
// on a default-size candidate grid.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "snvc/confidence_maps.hpp"
#include "snvc/feature_sampling.hpp"
#include "snvc/oracle_backend.hpp"
#include "snvc/ref.hpp"
#include "snvc/rng.hpp"
#include "snvc/voxel_grid.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  using clock = std::chrono::steady_clock;
  double best = 1e100;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = clock::now();
    fn();
    const auto t1 = clock::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-20s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int repeats = 3;
  if (argc > 1) repeats = std::max(1, std::atoi(argv[1]));

  const snvc::GridSpec spec;  // default 192 x 32 x 128
  snvc::Box3D proposal;
  proposal.x = 1.0;
  proposal.y = 1.0;
  proposal.z = 20.0;
  proposal.h = 1.5;
  proposal.w = 1.6;
  proposal.l = 3.9;
  proposal.theta = 0.4;
  snvc::Box3D gt = proposal;
  gt.x += 0.25;
  gt.z -= 0.2;
  gt.theta += 0.05;

  std::printf("grid %d x %d x %d = %lld candidates, %d threads\n", spec.n_l,
              spec.n_h, spec.n_w,
              static_cast<long long>(spec.candidate_count()),
              omp_get_max_threads());
  std::printf("%-20s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  const snvc::VernierGrid grid = snvc::build_grid(proposal, spec);
  report("build_grid",
         time_ms([&] { snvc::ref::build_grid(proposal, spec); }, repeats),
         time_ms([&] { snvc::build_grid(proposal, spec); }, repeats));

  snvc::SceneSpec scene_spec;
  scene_spec.n_boxes = 1;
  scene_spec.depth_range = {proposal.z, proposal.z};
  snvc::SeededRng rng(7);
  const snvc::Scene scene = snvc::render_scene(scene_spec, rng);

  report("aggregate_stereo",
         time_ms([&] { snvc::ref::aggregate_stereo(grid, scene.left,
                                                   scene.right, scene_spec.rig); },
                 repeats),
         time_ms([&] { snvc::aggregate_stereo(grid, scene.left, scene.right,
                                              scene_spec.rig); },
                 repeats));

  snvc::FeatureVolume volume;
  volume.extents = {64, 16, 128};
  volume.origin = {-12.0, -1.0, 8.0};
  volume.cell_size = 0.3;
  volume.channels = 8;
  volume.data.assign(static_cast<std::size_t>(64) * 16 * 128 * 8, 0.5f);
  report("aggregate_volume",
         time_ms([&] { snvc::ref::aggregate_volume(grid, volume); }, repeats),
         time_ms([&] { snvc::aggregate_volume(grid, volume); }, repeats));

  report("label_occupancy",
         time_ms([&] { snvc::ref::label_occupancy(grid, scene.cloud, gt); },
                 repeats),
         time_ms([&] { snvc::label_occupancy(grid, scene.cloud, gt); },
                 repeats));

  report("encode",
         time_ms([&] { snvc::ref::encode(grid, gt, 4.0); }, repeats),
         time_ms([&] { snvc::encode(grid, gt, 4.0); }, repeats));

  return 0;
}
