#include <gtest/gtest.h>

#include <random>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/feed_report.hpp"
#include "fixtures.hpp"

using namespace clusterfeed;

TEST(PortModel, PowerBalanceAndPassivity) {
  const PortModel& pm = fixtures::dipoles4_at(750e6);
  std::mt19937_64 rng(3);
  for (int s = 0; s < 200; ++s) {
    const CVec v = fixtures::random_feed(rng, 4);
    const double prad = radiated_power(pm, v);
    const double circuit = 0.5 * v.dot(pm.y0.adjoint() * v).real();
    EXPECT_NEAR(prad, circuit, 1e-10 * std::abs(circuit));
    const double eta = total_efficiency(pm, v);
    EXPECT_GE(eta, 0.0);
    EXPECT_LE(eta, 1.0 + 1e-9);
  }
}

TEST(PortModel, SusceptanceIsMinusImaginaryAdmittance) {
  const PortModel& pm = fixtures::dipoles4_at(750e6);
  EXPECT_LT((pm.b0 + pm.y0.imag()).norm(), 1e-10 * pm.y0.norm());
}

TEST(PortModel, IncidentPowerSplitsIntoRadiatedAndReflected) {
  const PortModel& pm = fixtures::dipoles4_at(720e6);
  std::mt19937_64 rng(5);
  const CVec v = fixtures::random_feed(rng, 4);
  // b = S a with S = (Lambda^-1 - Lambda y0) K^-1 for the reflected wave
  const CMat lam = pm.lambda.cast<cplx>().asDiagonal();
  const CMat lam_inv = pm.lambda.cwiseInverse().cast<cplx>().asDiagonal();
  const CVec b = 0.5 * (lam_inv - lam * pm.y0) * v;
  EXPECT_NEAR(incident_power(pm, v), radiated_power(pm, v) + 0.5 * b.squaredNorm(), 1e-12 * incident_power(pm, v));
}

TEST(PortModel, EfficiencyOfZeroFeedIsUndefined) {
  const PortModel& pm = fixtures::dipoles4_at(750e6);
  EXPECT_THROW(total_efficiency(pm, CVec::Zero(4)), DomainError);
}

TEST(PortModel, FarFieldSourceAgreesWithResistance) {
  const WireScene& s = fixtures::dipoles4();
  const MomOperator mom = assemble_impedance(s, 750e6);
  PortReductionOptions ff;
  ff.source = RadiationSource::kFarField;
  const PortModel a = reduce_to_ports(mom, s);
  const PortModel b = reduce_to_ports(mom, s, ff);
  EXPECT_LT((a.g0 - b.g0).norm() / a.g0.norm(), 1e-3);
}

TEST(PortModel, ZetaScalingLeavesMetricsUnchanged) {
  const WireScene& s = fixtures::dipoles4();
  const MomOperator mom = assemble_impedance(s, 740e6);
  PortReductionOptions scaled;
  scaled.zeta = 3.7;
  const PortModel a = reduce_to_ports(mom, s);
  const PortModel b = reduce_to_ports(mom, s, scaled);
  const ClusterPlan plan(s.cluster_of_port());
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const CVec v = fixtures::random_feed(rng, 4);
    const FeedReport ra = feed_report(a, plan, v);
    const FeedReport rb = feed_report(b, plan, v / scaled.zeta);
    EXPECT_NEAR(ra.efficiency, rb.efficiency, 1e-9);
    EXPECT_NEAR(ra.beta(0, 1), rb.beta(0, 1), 1e-9);
    EXPECT_NEAR(ra.gamma(0, 1), rb.gamma(0, 1), 1e-9);
    EXPECT_NEAR(ra.alpha(1), rb.alpha(1), 1e-9);
  }
}

TEST(PortModel, JsonRoundTrip) {
  const PortModel& pm = fixtures::dipoles4_at(750e6);
  const PortModel back = port_model_from_json(nlohmann::json::parse(port_model_to_json(pm).dump()));
  EXPECT_EQ((back.y0 - pm.y0).norm(), 0.0);
  EXPECT_EQ((back.g0 - pm.g0).norm(), 0.0);
  EXPECT_EQ((back.k - pm.k).norm(), 0.0);
}

TEST(PortModel, RejectsNonHermitianRadiationMatrix) {
  CMat y = CMat::Identity(2, 2) * 0.01;
  CMat g = y;
  g(0, 1) = cplx(0.0, 1e-3);
  RVec z0 = RVec::Constant(2, 50.0);
  EXPECT_THROW(PortModel::from_network(1e9, y, g, RMat::Zero(2, 2), z0), ValidationError);
  EXPECT_THROW(PortModel::from_network(1e9, y, y, RMat::Zero(2, 2), RVec::Constant(2, -1.0)), ValidationError);
}

TEST(PortModel, SingularImpedanceIsReported) {
  const WireScene& s = fixtures::dipoles4();
  MomOperator mom = assemble_impedance(s, 750e6);
  mom.z.setZero();
  EXPECT_THROW(reduce_to_ports(mom, s), SingularSystemError);
}
