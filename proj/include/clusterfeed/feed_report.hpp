#pragma once

#include <optional>

#include "clusterfeed/cluster_algebra.hpp"
#include "clusterfeed/port_model.hpp"

namespace clusterfeed {

/// All derived metrics of one feeding vector. Cluster indices are 0-based.
struct FeedReport {
  CVec v;  // volts
  CVec a;  // incident power waves, sqrt(W)
  double radiated_power = 0.0;
  double reactive_power = 0.0;
  double incident_power = 0.0;
  double efficiency = 0.0;

  CMat power_terms;  // P_mn = (1/2) v_m^H g0_mn v_n
  RVec alpha;        // alpha_mm
  RMat beta;         // strictly upper triangle used
  RMat gamma;        // strictly upper triangle used
  CMat rho;
  RMat ecc;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> correlation_defined;

  int clusters() const { return static_cast<int>(alpha.size()); }
  /// Sum of alpha_mm plus sum of beta_mn over m < n.
  double ratio_sum() const;
  std::optional<cplx> correlation(int m, int n) const;
  std::optional<double> envelope_correlation(int m, int n) const;
  /// alpha_22 / alpha_11 for two clusters.
  double self_ratio() const { return alpha(1) / alpha(0); }
};

/// Relative zero-power threshold below which a cluster counts as switched off.
inline constexpr double kZeroPowerThreshold = 1e-14;

FeedReport feed_report(const PortModel& pm, const ClusterPlan& plan, const CVec& v);

}  // namespace clusterfeed
