#pragma once

#include <complex>
#include <random>
#include <vector>

#include "clusterfeed/mom.hpp"
#include "clusterfeed/port_model.hpp"
#include "clusterfeed/wire_scene.hpp"

namespace fixtures {

using namespace clusterfeed;

inline WireScene half_wave_dipole(double frequency, int segments, double radius_over_lambda = 1e-3) {
  const double lambda = kSpeedOfLight / frequency;
  SceneSpec s;
  s.name = "dipole";
  Wire w;
  w.start = {0.0, 0.0, -lambda / 4};
  w.end = {0.0, 0.0, lambda / 4};
  w.radius = radius_over_lambda * lambda;
  w.segments = segments;
  s.wires = {w};
  s.ports = {{0, segments / 2, 1}};
  s.frequencies = {frequency};
  s.reference_impedance = {50.0};
  return build_scene(s);
}

inline const WireScene& dipoles4() {
  static const WireScene scene = [] {
    ParallelDipoles p;
    p.frequencies = linear_grid(700e6, 800e6, 51);
    return build_scene(parallel_dipoles(p));
  }();
  return scene;
}

inline const PortModel& dipoles4_at(double f) {
  static std::vector<PortModel> cache;
  for (const auto& pm : cache) {
    if (pm.frequency == f) return pm;
  }
  cache.push_back(reduce_to_ports(assemble_impedance(dipoles4(), f), dipoles4()));
  return cache.back();
}

inline CVec random_feed(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = {d(rng), d(rng)};
  return v;
}

}  // namespace fixtures
