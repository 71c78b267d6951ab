#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phoband/dielectric.hpp"
#include "phoband/mesh.hpp"
#include "phoband/sim.hpp"

namespace phoband {

/// Piecewise-linear path through the Brillouin zone [-pi, pi]^2.
struct KPath {
  std::vector<Vec2> vertices;
  std::vector<std::string> labels;  ///< one per vertex, may be empty
  int samples_per_segment = 8;     ///< intervals per segment

  /// M1 = (pi, pi) -> M3 = (0, 0) -> M5 = (pi, 0) -> M1.
  static KPath standard(int samples_per_segment = 8);

  void validate() const;
};

struct KSample {
  int segment_index;
  double path_param;  ///< arclength fraction in [0, 1]
  Vec2 k;
};

/// Samples every segment at samples_per_segment + 1 points; a join vertex is kept once,
/// in the earlier segment.
std::vector<KSample> sample_path(const KPath& path);

/// Arclength fraction of every path vertex.
std::vector<double> vertex_params(const KPath& path);

struct BandRecord {
  int segment_index = 0;
  double path_param = 0.0;
  Vec2 k{0.0, 0.0};
  std::vector<cplx> eigenvalues;  ///< omega a / c, sorted by real then imaginary part
};

struct BandFailure {
  std::size_t sample;
  std::string message;
};

struct BandMetadata {
  double mesh_h = 0.0;
  int n_dofs = 0;
  std::string model;
  SearchRegion region;
  SimConfig cfg;
  std::vector<double> vertex_params;
  std::vector<std::string> vertex_labels;
  std::vector<BandFailure> failures;
};

struct BandDiagram {
  std::vector<BandRecord> records;
  BandMetadata metadata;
};

/// Assembles once, then runs the eigenvalue search at every sampled k. Failures at
/// individual k are recorded in metadata and the sweep continues.
/// Throws RegionNotAdmissible up front.
BandDiagram sweep_bands(const UnitCellMesh& mesh, const DielectricModel& model, const KPath& path,
                        const SearchRegion& region, const SimConfig& cfg);

struct ConvergenceRow {
  int n = 0;       ///< subdivisions per side
  double h = 0.0;  ///< longest edge of the mesh
  cplx omega;      ///< omega a / c
  std::optional<double> xi;
  std::optional<double> order;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
};

struct ConvergenceSetup {
  int n0 = 10;
  int levels = 4;
  double disc_radius = 0.378;
  InclusionMass mass_rule = InclusionMass::AreaFraction;
  Vec2 k{kPi, kPi};
};

/// Tracks the first eigenvalue (smallest real part) found on the coarsest mesh through
/// `levels` uniformly refined meshes. Throws AmbiguousTracking when the nearest-eigenvalue
/// pairing fails.
ConvergenceReport convergence_study(const ConvergenceSetup& setup, const DielectricModel& model,
                                    const SearchRegion& region, const SimConfig& cfg);

/// xi_{i+1} = |w_i - w_{i+1}| / |w_{i+1}| and order_{i+1} = log2(xi_i / xi_{i+1}).
void fill_convergence_columns(ConvergenceReport& report);

/// Index of the estimate nearest to `previous`; throws AmbiguousTracking when none lies within
/// `max_distance` or the two nearest are tied to within `tie_tolerance`.
std::size_t track_nearest(const std::vector<cplx>& candidates, cplx previous, double max_distance, double tie_tolerance);

}  // namespace phoband
