#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clusterfeed/linalg.hpp"

namespace clusterfeed {

struct PortModel;

/// Partition of N ports into M clusters. Cluster indices are 0-based here.
class ClusterPlan {
 public:
  ClusterPlan() = default;
  explicit ClusterPlan(std::vector<int> cluster_of_port);

  int clusters() const { return static_cast<int>(selectors_.size()); }
  Eigen::Index ports() const { return static_cast<Eigen::Index>(membership_.size()); }
  const std::vector<int>& membership() const { return membership_; }
  const std::vector<Eigen::Index>& ports_of(int m) const { return ports_of_[m]; }

  /// Boolean selector C_m (N x N_m): C_m(k, l) = 1 iff port k is the l-th port of cluster m.
  const RMat& selector(int m) const { return selectors_[m]; }

  /// v_m = C_m^T v
  CVec restrict(const CVec& v, int m) const;
  /// [0; ..; v_m; ..; 0], i.e. C_m C_m^T v
  CVec isolate(const CVec& v, int m) const;

 private:
  std::vector<int> membership_;
  std::vector<std::vector<Eigen::Index>> ports_of_;
  std::vector<RMat> selectors_;
};

/// C_m C_m^H g0 C_n C_n^H: zero outside the (m, n) block.
CMat embed(const ClusterPlan& plan, const CMat& g0, int m, int n);

/// Hermitian forms with (1/2) v^H A_m v = P_mm, (1/2) v^H S_mn v = P_mn + P_nm
/// and (1/2) v^H T_mn v = i (P_mn - P_nm).
class ConstraintMatrices {
 public:
  ConstraintMatrices(const ClusterPlan& plan, const CMat& g0);

  const CMat& self(int m) const { return self_[m]; }
  const CMat& real_mutual(int m, int n) const { return real_[pair_index(m, n)]; }
  const CMat& imag_mutual(int m, int n) const { return imag_[pair_index(m, n)]; }
  int clusters() const { return clusters_; }

 private:
  int pair_index(int m, int n) const;

  int clusters_ = 0;
  std::vector<CMat> self_;
  std::vector<CMat> real_;
  std::vector<CMat> imag_;
};

ConstraintMatrices constraint_matrices(const ClusterPlan& plan, const CMat& g0);

/// Envelope correlation of two clusters from realized power ratios:
/// E = ((1 + R) / (2 sqrt R))^2 (beta^2 + gamma^2) / (beta - 1)^2.
double ecc_from_ratios(double beta, double gamma, double self_ratio);

/// alpha_11 = (1 - beta) / (1 + R) for two clusters with R = alpha_22 / alpha_11.
double self_ratio_alpha(double beta, double self_ratio);

/// Constant-ECC ellipse in the (beta, gamma) plane.
struct Ellipse {
  double center_beta = 0.0;
  double center_gamma = 0.0;
  double semi_beta = 0.0;
  double semi_gamma = 0.0;

  /// Point at parameter t in [0, 2 pi).
  std::pair<double, double> point(double t) const;
  bool contains(double beta, double gamma) const;
};

Ellipse ecc_isoline(double ecc, double self_ratio);

struct RatioInterval {
  double min = 0.0;
  double max = 0.0;
  CVec min_vector;  // realizes min (as v for which the ratio equals min)
  CVec max_vector;

  bool contains(double x, double tol = 1e-9) const { return x >= min - tol && x <= max + tol; }
};

struct PairIntervals {
  int m = 0;
  int n = 1;
  RatioInterval beta;
  RatioInterval gamma;
};

struct FeasibleIntervals {
  std::vector<RatioInterval> alpha;
  std::vector<PairIntervals> pairs;
  Eigen::Index deflated = 0;
  std::vector<std::string> warnings;

  const PairIntervals& pair(int m, int n) const;
};

FeasibleIntervals feasible_intervals(const ClusterPlan& plan, const PortModel& pm);

struct PairTarget {
  int m = 0;
  int n = 1;
  double beta = 0.0;
  double gamma = 0.0;
};

/// User targets for power ratios; clusters are 0-based.
struct RatioTargets {
  std::optional<double> self_ratio;           // R = alpha_22 / alpha_11 (two clusters)
  std::vector<std::optional<double>> alpha;   // explicit alpha_mm
  std::vector<PairTarget> pairs;
  std::optional<double> ecc_cap;

  /// Two clusters with alpha_11 from R and beta.
  static RatioTargets two_cluster(double self_ratio, double beta, double gamma);
  /// Two clusters, only R and an ECC ceiling; beta and gamma are free.
  static RatioTargets ecc_capped(double self_ratio, double ecc_cap);

  /// alpha_mm targets after applying R (if set); nullopt entries are unconstrained.
  std::vector<std::optional<double>> resolved_alpha(int clusters) const;

  /// Throws ValidationError if the targets break the ratio-sum identity or are
  /// malformed for the given cluster count.
  void validate(int clusters) const;
};

/// Empty string if every target lies inside the feasible intervals, otherwise a reason.
std::string screen_targets(const RatioTargets& targets, const FeasibleIntervals& intervals, int clusters);

}  // namespace clusterfeed
