#pragma once

#include <vector>

#include "clusterfeed/linalg.hpp"
#include "clusterfeed/wire_scene.hpp"

namespace clusterfeed {

struct Segment {
  Eigen::Vector3d start;
  Eigen::Vector3d direction;  // unit
  double length = 0.0;
  double radius = 0.0;
  int wire = 0;
};

/// Triangle basis: rises linearly over one segment and falls over the next.
struct TriangleBasis {
  int rising = 0;   // segment index
  int falling = 0;  // segment index
};

/// Dense Galerkin impedance matrix of one frequency. Immutable once assembled.
struct MomOperator {
  double frequency = 0.0;
  double wavenumber = 0.0;
  CMat z;  // Z = R0 + iX0, ohms
  std::vector<Segment> segments;
  std::vector<TriangleBasis> basis;

  RMat resistance() const { return z.real(); }
  RMat reactance() const { return z.imag(); }
};

struct AssemblyOptions {
  int gauss_order = 8;        // per segment, smooth kernel parts
  double near_factor = 3.0;   // pairs closer than this many segment lengths get singular treatment
};

/// Thin-wire EFIE (reduced kernel) with piecewise-triangular Galerkin testing.
/// exp(+jwt) convention, so a half-wave dipole shows a positive input reactance.
MomOperator assemble_impedance(const WireScene& scene, double frequency,
                               const AssemblyOptions& options = {});

/// Delta-gap excitation of a unit voltage at the given port.
CVec excitation_vector(const WireScene& scene, int port);

/// Columns are the excitation vectors of all ports, scaled by zeta (the D operator
/// combined with port indexing).
CMat excitation_matrix(const WireScene& scene, double zeta = 1.0);

}  // namespace clusterfeed
