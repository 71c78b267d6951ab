#include "phoband/bands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <sstream>

#include "phoband/assembly.hpp"
#include "phoband/errors.hpp"

namespace phoband {

namespace {

double distance(const Vec2& a, const Vec2& b) { return std::hypot(b[0] - a[0], b[1] - a[1]); }

std::vector<cplx> values_of(const std::vector<EigenvalueEstimate>& est) {
  std::vector<cplx> out;
  out.reserve(est.size());
  for (const auto& e : est) out.push_back(e.value);
  return out;
}

}  // namespace

KPath KPath::standard(int samples_per_segment) {
  KPath p;
  p.vertices = {{kPi, kPi}, {0.0, 0.0}, {kPi, 0.0}, {kPi, kPi}};
  p.labels = {"M1", "M3", "M5", "M1"};
  p.samples_per_segment = samples_per_segment;
  return p;
}

void KPath::validate() const {
  if (vertices.size() < 2) throw InvalidParameter("k-path needs at least two vertices");
  if (samples_per_segment < 1) throw InvalidParameter("samples_per_segment must be at least 1");
  if (!labels.empty() && labels.size() != vertices.size()) {
    throw InvalidParameter("k-path labels must match the vertex count");
  }
  constexpr double slack = 1e-12;
  for (const auto& v : vertices) {
    if (std::abs(v[0]) > kPi + slack || std::abs(v[1]) > kPi + slack) {
      throw InvalidParameter("k-path vertex outside the Brillouin zone [-pi, pi]^2");
    }
  }
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    if (distance(vertices[i], vertices[i + 1]) == 0.0) throw InvalidParameter("consecutive k-path vertices coincide");
  }
}

std::vector<double> vertex_params(const KPath& path) {
  std::vector<double> s{0.0};
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) s.push_back(s.back() + distance(path.vertices[i], path.vertices[i + 1]));
  const double total = s.back();
  for (double& v : s) v /= total;
  return s;
}

std::vector<KSample> sample_path(const KPath& path) {
  path.validate();
  const auto vp = vertex_params(path);
  std::vector<KSample> out;
  const int m = path.samples_per_segment;
  for (std::size_t seg = 0; seg + 1 < path.vertices.size(); ++seg) {
    const Vec2& a = path.vertices[seg];
    const Vec2& b = path.vertices[seg + 1];
    for (int i = seg == 0 ? 0 : 1; i <= m; ++i) {
      const double t = static_cast<double>(i) / m;
      const Vec2 k = i == m ? b : Vec2{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
      const double s = i == m ? vp[seg + 1] : vp[seg] + t * (vp[seg + 1] - vp[seg]);
      out.push_back({static_cast<int>(seg), s, k});
    }
  }
  return out;
}

BandDiagram sweep_bands(const UnitCellMesh& mesh, const DielectricModel& model, const KPath& path,
                        const SearchRegion& region, const SimConfig& cfg) {
  cfg.validate();
  const double guard = 10.0 * cfg.beta0;
  if (!region_is_holomorphic(model, region, guard)) {
    throw RegionNotAdmissible("search region intersects the pole guard of " + model.describe());
  }
  const auto samples = sample_path(path);
  const auto dofs = build_periodic_dof_map(mesh);
  const auto bundle = assemble(mesh, dofs);

  BandDiagram diagram;
  diagram.records.resize(samples.size());
  diagram.metadata.mesh_h = mesh.h;
  diagram.metadata.n_dofs = dofs.n_dofs;
  diagram.metadata.model = model.describe();
  diagram.metadata.region = region;
  diagram.metadata.cfg = cfg;
  diagram.metadata.vertex_params = vertex_params(path);
  diagram.metadata.vertex_labels = path.labels;

  // k-points are the parallel unit; each search then runs its solves serially.
  SimConfig inner = cfg;
  inner.execution = Execution::Serial;
  std::vector<std::string> failure(samples.size());
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(dynamic) if (cfg.execution == Execution::Parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& rec = diagram.records[i];
    rec.segment_index = samples[i].segment_index;
    rec.path_param = samples[i].path_param;
    rec.k = samples[i].k;
    try {
      auto op = std::make_shared<const BlochOperator>(bundle, samples[i].k, model, guard);
      rec.eigenvalues = values_of(find_eigenvalues(bloch_fn(op, guard), region, inner).eigenvalues);
    } catch (const std::exception& e) {
      failure[i] = e.what();
      if (failure[i].empty()) failure[i] = "unknown error";
    }
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!failure[i].empty()) diagram.metadata.failures.push_back({i, failure[i]});
  }
  return diagram;
}

std::size_t track_nearest(const std::vector<cplx>& candidates, cplx previous, double max_distance,
                          double tie_tolerance) {
  if (candidates.empty()) throw AmbiguousTracking("no eigenvalue found to continue the tracked branch");
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
    return std::abs(candidates[a] - previous) < std::abs(candidates[b] - previous);
  });
  const double d0 = std::abs(candidates[order[0]] - previous);
  if (d0 > max_distance) {
    std::ostringstream os;
    os << "nearest eigenvalue " << candidates[order[0]] << " is " << d0 << " away from " << previous
       << " (limit " << max_distance << ")";
    throw AmbiguousTracking(os.str());
  }
  if (order.size() > 1) {
    const double d1 = std::abs(candidates[order[1]] - previous);
    if (d1 <= max_distance && d1 - d0 < tie_tolerance) {
      std::ostringstream os;
      os << "eigenvalues " << candidates[order[0]] << " and " << candidates[order[1]] << " are equally close to "
         << previous;
      throw AmbiguousTracking(os.str());
    }
  }
  return order[0];
}

void fill_convergence_columns(ConvergenceReport& report) {
  auto& rows = report.rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].xi.reset();
    rows[i].order.reset();
    if (i >= 1) rows[i].xi = std::abs(rows[i - 1].omega - rows[i].omega) / std::abs(rows[i].omega);
    if (i >= 2) rows[i].order = std::log2(*rows[i - 1].xi / *rows[i].xi);
  }
}

ConvergenceReport convergence_study(const ConvergenceSetup& setup, const DielectricModel& model,
                                    const SearchRegion& region, const SimConfig& cfg) {
  if (setup.levels < 2) throw InvalidParameter("convergence study needs at least 2 levels");
  cfg.validate();
  const double guard = 10.0 * cfg.beta0;
  if (!region_is_holomorphic(model, region, guard)) {
    throw RegionNotAdmissible("search region intersects the pole guard of " + model.describe());
  }
  ConvergenceReport report;
  UnitCellMesh mesh = generate_structured(setup.n0, setup.disc_radius, setup.mass_rule);
  int n = setup.n0;
  for (int level = 0; level < setup.levels; ++level) {
    if (level > 0) {
      mesh = refine_uniform(mesh);
      n *= 2;
    }
    const auto dofs = build_periodic_dof_map(mesh);
    const auto bundle = assemble(mesh, dofs);
    auto op = std::make_shared<const BlochOperator>(bundle, setup.k, model, guard);
    const auto found = values_of(find_eigenvalues(bloch_fn(op, guard), region, cfg).eigenvalues);
    cplx omega;
    if (level == 0) {
      if (found.empty()) throw AmbiguousTracking("no eigenvalue in the search region on the coarsest mesh");
      omega = found.front();
    } else {
      omega = found[track_nearest(found, report.rows.back().omega, region.diameter() / 4.0, 2.0 * cfg.beta0)];
    }
    report.rows.push_back({n, mesh.h, omega, std::nullopt, std::nullopt});
  }
  fill_convergence_columns(report);
  return report;
}

}  // namespace phoband
