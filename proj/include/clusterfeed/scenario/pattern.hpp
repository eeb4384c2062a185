#pragma once

#include <vector>

#include "clusterfeed/cluster_algebra.hpp"
#include "clusterfeed/far_field.hpp"
#include "clusterfeed/mom.hpp"
#include "clusterfeed/wire_scene.hpp"

namespace clusterfeed::scenario {

enum class CutKind { kConstantPhi, kConstantTheta };

struct PatternCut {
  CutKind kind = CutKind::kConstantTheta;
  double fixed = 1.5707963267948966;  // radians
  int resolution = 360;                // samples over the full sweep
};

struct PatternTable {
  CutKind kind = CutKind::kConstantTheta;
  double fixed = 0.0;
  std::vector<double> angles;  // swept angle, radians
  /// fields[0] is the total feed v, fields[m + 1] the feed with only cluster m active.
  std::vector<std::vector<FarField>> fields;

  double magnitude(std::size_t channel, std::size_t k) const { return std::sqrt(fields[channel][k].intensity()); }
};

/// Basis currents of a port feed: I = Z^-1 (zeta P) v.
CVec feed_currents(const MomOperator& mom, const WireScene& scene, const CVec& v, double zeta = 1.0);

/// Far fields of v and of each cluster alone along a great-circle cut.
/// A constant-theta cut sweeps phi over [0, 2 pi); a constant-phi cut sweeps
/// theta over [0, 2 pi) through the plane phi = fixed (theta > pi is read as
/// the opposite half plane).
PatternTable pattern_export(const MomOperator& mom, const WireScene& scene, const ClusterPlan& plan, const CVec& v,
                            const PatternCut& cut, double zeta = 1.0);

/// Angle (radians) of the largest |F| of a channel.
double main_lobe(const PatternTable& table, std::size_t channel);

}  // namespace clusterfeed::scenario
