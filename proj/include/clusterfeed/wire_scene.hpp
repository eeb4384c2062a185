#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace clusterfeed {

struct Wire {
  Eigen::Vector3d start;
  Eigen::Vector3d end;
  double radius = 0.0;  // meters
  int segments = 0;
};

/// Delta-gap port sitting on the junction between segments junction-1 and junction.
struct Port {
  int wire = 0;
  int junction = 0;
  int cluster = 1;  // 1-based, as in scene files
};

/// Input to build_scene; everything in SI units.
struct SceneSpec {
  std::string name;
  std::vector<Wire> wires;
  std::vector<Port> ports;
  std::vector<double> frequencies;
  std::vector<double> reference_impedance;  // one per port, or a single value for all
};

class WireScene {
 public:
  const std::string& name() const { return name_; }
  const std::vector<Wire>& wires() const { return wires_; }
  const std::vector<Port>& ports() const { return ports_; }
  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<double>& reference_impedance() const { return reference_impedance_; }

  int port_count() const { return static_cast<int>(ports_.size()); }
  int cluster_count() const { return clusters_; }
  /// 0-based cluster of every port.
  std::vector<int> cluster_of_port() const;

  double segment_length(int wire) const { return segment_length_[wire]; }
  Eigen::Vector3d direction(int wire) const;
  Eigen::Vector3d node(int wire, int index) const;

  /// Triangle basis functions live on interior junctions, segments-1 per wire.
  int basis_count() const { return basis_count_; }
  int basis_index(int wire, int junction) const { return basis_offset_[wire] + junction - 1; }
  int port_basis(int port) const { return basis_index(ports_[port].wire, ports_[port].junction); }

  /// Largest wire length divided by the shortest wavelength in the band.
  double max_electrical_length() const;

 private:
  friend WireScene build_scene(const SceneSpec& spec);

  std::string name_;
  std::vector<Wire> wires_;
  std::vector<Port> ports_;
  std::vector<double> frequencies_;
  std::vector<double> reference_impedance_;
  std::vector<double> segment_length_;
  std::vector<int> basis_offset_;
  int basis_count_ = 0;
  int clusters_ = 0;
};

/// Validates the description and caches derived geometry. Throws ValidationError.
WireScene build_scene(const SceneSpec& spec);
WireScene build_scene(const nlohmann::json& config);

SceneSpec scene_spec_from_json(const nlohmann::json& config);

/// Segment count for a wire of the given length: 41 basis functions per half
/// wavelength at the highest frequency, rounded up to an odd basis count.
int default_segments(double length, double max_frequency);

struct ParallelDipoles {
  int count = 4;
  double center_frequency = 750e6;
  double length_factor = 0.916;   // L = factor * c0 / (2 f0)
  double spacing_factor = 0.25;   // spacing = factor * L
  std::optional<double> radius;   // default L / 1000
  std::optional<double> strip_width;  // equivalent radius w / 4
  std::optional<int> segments;
  std::vector<int> clusters{1, 1, 2, 2};
  std::vector<double> frequencies{750e6};
  double reference_impedance = 50.0;
};

/// z-directed center-fed dipoles spaced along x and centered on the origin.
SceneSpec parallel_dipoles(const ParallelDipoles& p);

std::vector<double> linear_grid(double start, double stop, int count);

}  // namespace clusterfeed
