#include "clusterfeed/wire_scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "clusterfeed/errors.hpp"
#include "clusterfeed/linalg.hpp"

namespace clusterfeed {

namespace {

// Closest distance between segments [p0,p1] and [q0,q1].
double segment_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                        const Eigen::Vector3d& q0, const Eigen::Vector3d& q1) {
  const Eigen::Vector3d d1 = p1 - p0;
  const Eigen::Vector3d d2 = q1 - q0;
  const Eigen::Vector3d r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  const double c = d1.dot(r);
  const double b = d1.dot(d2);
  const double denom = a * e - b * b;
  double s = denom > 1e-300 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

Eigen::Vector3d read_vec3(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw ValidationError(std::string("expected a 3-vector for '") + what + "'");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<double> read_frequencies(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object()) {
    const int count = j.value("count", 51);
    return linear_grid(j.at("start").get<double>(), j.at("stop").get<double>(), count);
  }
  if (j.is_number()) return {j.get<double>()};
  throw ValidationError("frequencies must be a list, a number or {start, stop, count}");
}

}  // namespace

std::vector<double> linear_grid(double start, double stop, int count) {
  if (count < 1) throw ValidationError("grid count must be positive");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out[i] = start + (stop - start) * static_cast<double>(i) / (count - 1);
  }
  // exact zero where the grid crosses it symmetrically
  for (double& x : out) {
    if (std::abs(x) < 1e-14 * std::max(std::abs(start), std::abs(stop))) x = 0.0;
  }
  return out;
}

int default_segments(double length, double max_frequency) {
  const double half_wave = kSpeedOfLight / max_frequency / 2.0;
  int basis = static_cast<int>(std::ceil(41.0 * length / half_wave - 1e-9));
  basis = std::max(basis, 3);
  if (basis % 2 == 0) ++basis;
  return basis + 1;
}

std::vector<int> WireScene::cluster_of_port() const {
  std::vector<int> out;
  out.reserve(ports_.size());
  for (const auto& p : ports_) out.push_back(p.cluster - 1);
  return out;
}

Eigen::Vector3d WireScene::direction(int wire) const {
  const Wire& w = wires_[wire];
  return (w.end - w.start).normalized();
}

Eigen::Vector3d WireScene::node(int wire, int index) const {
  const Wire& w = wires_[wire];
  return w.start + (w.end - w.start) * (static_cast<double>(index) / w.segments);
}

double WireScene::max_electrical_length() const {
  const double fmax = *std::max_element(frequencies_.begin(), frequencies_.end());
  double longest = 0.0;
  for (const auto& w : wires_) longest = std::max(longest, (w.end - w.start).norm());
  return longest * fmax / kSpeedOfLight;
}

WireScene build_scene(const SceneSpec& spec) {
  if (spec.wires.empty()) throw ValidationError("scene has no wires");
  if (spec.ports.empty()) throw ValidationError("scene has no ports");
  if (spec.frequencies.empty()) throw ValidationError("scene has no frequencies");

  WireScene scene;
  scene.name_ = spec.name;
  scene.wires_ = spec.wires;
  scene.ports_ = spec.ports;
  scene.frequencies_ = spec.frequencies;

  for (double f : spec.frequencies) {
    if (!(f > 0.0) || !std::isfinite(f)) throw ValidationError("frequencies must be positive and finite");
  }

  int offset = 0;
  for (std::size_t i = 0; i < spec.wires.size(); ++i) {
    const Wire& w = spec.wires[i];
    const double length = (w.end - w.start).norm();
    std::ostringstream who;
    who << "wire " << i;
    if (!(length > 0.0)) throw ValidationError(who.str() + " has zero length");
    if (w.segments < 2) throw ValidationError(who.str() + " needs at least 2 segments");
    if (!(w.radius > 0.0)) throw ValidationError(who.str() + " needs a positive radius");
    const double seg = length / w.segments;
    if (!(w.radius < 0.2 * seg)) {
      std::ostringstream msg;
      msg << who.str() << " violates the thin-wire limit: radius " << w.radius
          << " m must be below 0.2 x segment length (" << 0.2 * seg << " m)";
      throw ValidationError(msg.str());
    }
    scene.segment_length_.push_back(seg);
    scene.basis_offset_.push_back(offset);
    offset += w.segments - 1;
  }
  scene.basis_count_ = offset;

  for (std::size_t i = 0; i < spec.wires.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.wires.size(); ++j) {
      const Wire& a = spec.wires[i];
      const Wire& b = spec.wires[j];
      const double d = segment_distance(a.start, a.end, b.start, b.end);
      if (d <= a.radius + b.radius) {
        std::ostringstream msg;
        msg << "wires " << i << " and " << j << " overlap (axis distance " << d << " m)";
        throw ValidationError(msg.str());
      }
    }
  }

  std::set<std::pair<int, int>> used;
  int max_cluster = 0;
  for (std::size_t k = 0; k < spec.ports.size(); ++k) {
    const Port& p = spec.ports[k];
    std::ostringstream who;
    who << "port " << k;
    if (p.wire < 0 || p.wire >= static_cast<int>(spec.wires.size())) {
      throw ValidationError(who.str() + " references a missing wire");
    }
    const int segs = spec.wires[p.wire].segments;
    if (p.junction <= 0 || p.junction >= segs) {
      throw ValidationError(who.str() + " must sit on an interior junction (1.." + std::to_string(segs - 1) +
                            "), not on a wire end");
    }
    if (!used.insert({p.wire, p.junction}).second) {
      throw ValidationError(who.str() + " shares its junction with another port");
    }
    if (p.cluster < 1) throw ValidationError(who.str() + " has a cluster index below 1");
    max_cluster = std::max(max_cluster, p.cluster);
  }
  for (int m = 1; m <= max_cluster; ++m) {
    const bool present = std::any_of(spec.ports.begin(), spec.ports.end(),
                                     [m](const Port& p) { return p.cluster == m; });
    if (!present) throw ValidationError("cluster " + std::to_string(m) + " has no ports");
  }
  scene.clusters_ = max_cluster;

  const auto n_ports = spec.ports.size();
  if (spec.reference_impedance.empty()) {
    scene.reference_impedance_.assign(n_ports, 50.0);
  } else if (spec.reference_impedance.size() == 1) {
    scene.reference_impedance_.assign(n_ports, spec.reference_impedance.front());
  } else if (spec.reference_impedance.size() == n_ports) {
    scene.reference_impedance_ = spec.reference_impedance;
  } else {
    throw ValidationError("reference_impedance needs one value or one per port");
  }
  for (double z : scene.reference_impedance_) {
    if (!(z > 0.0)) throw ValidationError("reference impedance must be real and positive");
  }
  return scene;
}

SceneSpec parallel_dipoles(const ParallelDipoles& p) {
  if (p.count < 1) throw ValidationError("parallel_dipoles: count must be positive");
  if (static_cast<int>(p.clusters.size()) != p.count) {
    throw ValidationError("parallel_dipoles: one cluster index per dipole required");
  }
  const double length = p.length_factor * kSpeedOfLight / (2.0 * p.center_frequency);
  const double spacing = p.spacing_factor * length;
  double radius = length / 1000.0;
  if (p.strip_width) radius = *p.strip_width / 4.0;
  if (p.radius) radius = *p.radius;
  const double fmax = *std::max_element(p.frequencies.begin(), p.frequencies.end());
  int segments = p.segments ? *p.segments : default_segments(length, fmax);
  if (segments % 2 != 0) ++segments;  // center feed needs a junction at the midpoint

  SceneSpec spec;
  spec.name = "parallel-dipoles";
  spec.frequencies = p.frequencies;
  spec.reference_impedance = {p.reference_impedance};
  for (int i = 0; i < p.count; ++i) {
    const double x = (i - 0.5 * (p.count - 1)) * spacing;
    Wire w;
    w.start = {x, 0.0, -0.5 * length};
    w.end = {x, 0.0, 0.5 * length};
    w.radius = radius;
    w.segments = segments;
    spec.wires.push_back(w);
    spec.ports.push_back(Port{i, segments / 2, p.clusters[i]});
  }
  return spec;
}

SceneSpec scene_spec_from_json(const nlohmann::json& config) {
  if (!config.is_object()) throw ValidationError("scene description must be an object");
  try {
    std::vector<double> freqs;
    if (config.contains("band")) freqs = read_frequencies(config.at("band"));
    else if (config.contains("frequencies")) freqs = read_frequencies(config.at("frequencies"));

    std::vector<double> z0;
    if (config.contains("reference_impedance")) {
      const auto& j = config.at("reference_impedance");
      z0 = j.is_array() ? j.get<std::vector<double>>() : std::vector<double>{j.get<double>()};
    }

    SceneSpec spec;
    if (config.contains("preset")) {
      const auto& pj = config.at("preset");
      const std::string type = pj.value("type", "parallel_dipoles");
      if (type != "parallel_dipoles") throw ValidationError("unknown scene preset '" + type + "'");
      ParallelDipoles p;
      p.count = pj.value("count", p.count);
      p.center_frequency = pj.value("center_frequency", p.center_frequency);
      p.length_factor = pj.value("length_factor", p.length_factor);
      p.spacing_factor = pj.value("spacing_factor", p.spacing_factor);
      if (pj.contains("radius")) p.radius = pj.at("radius").get<double>();
      if (pj.contains("strip_width")) p.strip_width = pj.at("strip_width").get<double>();
      if (pj.contains("segments")) p.segments = pj.at("segments").get<int>();
      if (pj.contains("clusters")) p.clusters = pj.at("clusters").get<std::vector<int>>();
      else {
        // first half of the row in cluster 1, second half in cluster 2
        p.clusters.assign(p.count, 1);
        for (int i = (p.count + 1) / 2; i < p.count; ++i) p.clusters[i] = 2;
      }
      if (!freqs.empty()) p.frequencies = freqs;
      else p.frequencies = {p.center_frequency};
      if (!z0.empty()) p.reference_impedance = z0.front();
      spec = parallel_dipoles(p);
      if (z0.size() > 1) spec.reference_impedance = z0;
    } else {
      if (!config.contains("wires") || !config.contains("ports")) {
        throw ValidationError("scene needs 'wires' and 'ports' (or a 'preset')");
      }
      if (freqs.empty()) throw ValidationError("scene needs 'band' or 'frequencies'");
      const double fmax = *std::max_element(freqs.begin(), freqs.end());
      for (const auto& wj : config.at("wires")) {
        Wire w;
        w.start = read_vec3(wj.at("start"), "start");
        w.end = read_vec3(wj.at("end"), "end");
        const double length = (w.end - w.start).norm();
        w.radius = wj.contains("radius") ? wj.at("radius").get<double>() : length / 1000.0;
        if (wj.contains("strip_width")) w.radius = wj.at("strip_width").get<double>() / 4.0;
        w.segments = wj.contains("segments") ? wj.at("segments").get<int>()
                                              : default_segments(length, fmax);
        spec.wires.push_back(w);
      }
      for (const auto& pj : config.at("ports")) {
        Port p;
        p.wire = pj.at("wire").get<int>();
        p.cluster = pj.value("cluster", 1);
        if (pj.contains("segment")) {
          p.junction = pj.at("segment").get<int>();
        } else if (pj.contains("position")) {
          // fractional position along the wire, snapped to the nearest junction
          if (p.wire < 0 || p.wire >= static_cast<int>(spec.wires.size())) {
            throw ValidationError("port references a missing wire");
          }
          const int segs = spec.wires[p.wire].segments;
          p.junction = static_cast<int>(std::lround(pj.at("position").get<double>() * segs));
        } else {
          throw ValidationError("port needs 'segment' or 'position'");
        }
        spec.ports.push_back(p);
      }
      spec.frequencies = freqs;
      spec.reference_impedance = z0;
    }
    spec.name = config.value("name", spec.name);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid scene description: ") + e.what());
  }
}

WireScene build_scene(const nlohmann::json& config) { return build_scene(scene_spec_from_json(config)); }

}  // namespace clusterfeed
