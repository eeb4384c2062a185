#include "clusterfeed/scenario/pattern.hpp"

#include <cmath>

#include "clusterfeed/errors.hpp"

namespace clusterfeed::scenario {

CVec feed_currents(const MomOperator& mom, const WireScene& scene, const CVec& v, double zeta) {
  if (v.size() != scene.port_count()) throw DomainError("feed_currents: one voltage per port");
  Eigen::PartialPivLU<CMat> lu(mom.z);
  return lu.solve(excitation_matrix(scene, zeta) * v);
}

PatternTable pattern_export(const MomOperator& mom, const WireScene& scene, const ClusterPlan& plan, const CVec& v,
                            const PatternCut& cut, double zeta) {
  if (cut.resolution < 4) throw ValidationError("pattern: resolution must be at least 4");
  Eigen::PartialPivLU<CMat> lu(mom.z);
  const CMat e = excitation_matrix(scene, zeta);
  std::vector<CVec> currents{lu.solve(e * v)};
  for (int m = 0; m < plan.clusters(); ++m) currents.push_back(lu.solve(e * plan.isolate(v, m)));

  PatternTable t;
  t.kind = cut.kind;
  t.fixed = cut.fixed;
  t.fields.resize(currents.size());
  for (int k = 0; k < cut.resolution; ++k) {
    const double a = 2.0 * kPi * k / cut.resolution;
    t.angles.push_back(a);
    double theta = cut.fixed, phi = a;
    double flip = 1.0;
    if (cut.kind == CutKind::kConstantPhi) {
      theta = a;
      phi = cut.fixed;
      if (a > kPi) {
        // same direction expressed with theta in [0, pi]; theta_hat flips sign
        theta = 2.0 * kPi - a;
        phi = cut.fixed + kPi;
        flip = -1.0;
      }
    }
    for (std::size_t c = 0; c < currents.size(); ++c) {
      FarField f = far_field(mom, currents[c], theta, phi);
      f.theta *= flip;
      f.phi *= flip;
      t.fields[c].push_back(f);
    }
  }
  return t;
}

double main_lobe(const PatternTable& table, std::size_t channel) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < table.angles.size(); ++k) {
    if (table.fields[channel][k].intensity() > table.fields[channel][best].intensity()) best = k;
  }
  return table.angles[best];
}

}  // namespace clusterfeed::scenario
