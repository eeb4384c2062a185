#include "clusterfeed/feed_report.hpp"

#include <cmath>

#include "clusterfeed/errors.hpp"

namespace clusterfeed {

double FeedReport::ratio_sum() const {
  double sum = alpha.sum();
  for (int m = 0; m < clusters(); ++m) {
    for (int n = m + 1; n < clusters(); ++n) sum += beta(m, n);
  }
  return sum;
}

std::optional<cplx> FeedReport::correlation(int m, int n) const {
  if (!correlation_defined(m, n)) return std::nullopt;
  return rho(m, n);
}

std::optional<double> FeedReport::envelope_correlation(int m, int n) const {
  if (!correlation_defined(m, n)) return std::nullopt;
  return ecc(m, n);
}

FeedReport feed_report(const PortModel& pm, const ClusterPlan& plan, const CVec& v) {
  if (v.size() != pm.ports() || plan.ports() != pm.ports()) {
    throw DomainError("feed_report: feeding vector, plan and port model disagree in size");
  }
  if (v.squaredNorm() == 0.0) throw DomainError("feed_report: zero feeding vector");

  FeedReport r;
  r.v = v;
  r.a = pm.k * v;
  r.radiated_power = radiated_power(pm, v);
  r.reactive_power = reactive_power(pm, v);
  r.incident_power = 0.5 * r.a.squaredNorm();
  r.efficiency = r.incident_power > 0.0 ? r.radiated_power / r.incident_power : 0.0;

  const int mc = plan.clusters();
  r.power_terms.resize(mc, mc);
  for (int m = 0; m < mc; ++m) {
    const CVec vm = plan.isolate(v, m);
    for (int n = 0; n < mc; ++n) {
      r.power_terms(m, n) = 0.5 * vm.dot(pm.g0 * plan.isolate(v, n));
    }
  }
  for (int m = 0; m < mc; ++m) r.power_terms(m, m) = r.power_terms(m, m).real();

  const double prad = r.radiated_power;
  r.alpha.resize(mc);
  r.beta = RMat::Zero(mc, mc);
  r.gamma = RMat::Zero(mc, mc);
  r.rho = CMat::Zero(mc, mc);
  r.ecc = RMat::Zero(mc, mc);
  r.correlation_defined.setConstant(mc, mc, false);
  for (int m = 0; m < mc; ++m) r.alpha(m) = r.power_terms(m, m).real() / prad;
  for (int m = 0; m < mc; ++m) {
    for (int n = m + 1; n < mc; ++n) {
      // beta = 2 Re P_mn / Prad, gamma = i (alpha_mn - alpha_nm) = 2 Im P_nm / Prad
      r.beta(m, n) = 2.0 * r.power_terms(m, n).real() / prad;
      r.gamma(m, n) = 2.0 * r.power_terms(n, m).imag() / prad;
      r.beta(n, m) = r.beta(m, n);
      r.gamma(n, m) = -r.gamma(m, n);
    }
  }
  const double floor = kZeroPowerThreshold * std::abs(prad);
  for (int m = 0; m < mc; ++m) {
    for (int n = 0; n < mc; ++n) {
      const double pmm = r.power_terms(m, m).real();
      const double pnn = r.power_terms(n, n).real();
      if (pmm <= floor || pnn <= floor) continue;
      r.rho(m, n) = r.power_terms(m, n) / std::sqrt(pmm * pnn);
      r.ecc(m, n) = std::norm(r.rho(m, n));
      r.correlation_defined(m, n) = true;
    }
  }
  return r;
}

}  // namespace clusterfeed
