#include "phoband/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "phoband/errors.hpp"

namespace phoband {

namespace {

// Direction of the contour shift used when a node lands on an eigenvalue.
const cplx kJitterDirection = std::polar(1.0, 0.3);
// Children share a recycled solver anchored one parent radius off the parent centre.
// A surviving square tends to have an eigenvalue near its centre, and an LU taken there
// is close to singular.
const cplx kAnchorOffset = std::polar(1.0, 0.7);

cplx node(const SearchRegion& sq, int q, int m0) {
  const double theta = kTwoPi * (q + 1) / m0;
  return sq.center + std::polar(sq.radius(), theta);
}

}  // namespace

void SimConfig::validate() const {
  if (!(delta0 > 0.0)) throw InvalidParameter("delta0 must be positive");
  if (!(beta0 > 0.0)) throw InvalidParameter("beta0 must be positive");
  if (m0 < 4 || m0 % 2 != 0) throw InvalidParameter("m0 must be even and at least 4");
  if (max_level < 0) throw InvalidParameter("max_level must be non-negative");
  if (!(solve_tol > 0.0)) throw InvalidParameter("solve_tol must be positive");
}

VecC random_probe(int dimension, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VecC g(dimension);
  for (int i = 0; i < dimension; ++i) {
    double x, y;
    do {
      x = u(rng);
      y = u(rng);
    } while (x * x + y * y > 1.0 || (x == 0.0 && y == 0.0));
    g[i] = cplx(x, y);
  }
  return g / g.norm();
}

BatchIndicators indicator_batch(const HolomorphicMatrixFn& fn, std::span<const SearchRegion> squares, const VecC& g,
                                int m0, double solve_tol, Execution execution, NodeSolve strategy,
                                std::span<const cplx> anchors) {
  BatchIndicators out;
  out.values.assign(squares.size(), 0.0);
  out.failed.assign(squares.size(), 0);
  if (squares.empty()) return out;
  if (!anchors.empty() && anchors.size() != squares.size()) throw std::invalid_argument("one anchor per square");
  if (strategy == NodeSolve::Recycled && !fn.affine) throw InvalidParameter("recycled node solves need affine terms");
  const bool recycle = strategy == NodeSolve::Recycled ||
                       (strategy == NodeSolve::Auto && fn.affine && fn.dimension > kDirectSolveMaxDimension);

  // jobs are runs of squares sharing an anchor
  std::vector<std::size_t> start{0};
  for (std::size_t s = 1; s < squares.size(); ++s) {
    const bool same = !anchors.empty() && anchors[s] == anchors[s - 1];
    if (!(recycle && same)) start.push_back(s);
  }
  start.push_back(squares.size());
  const auto jobs = static_cast<std::ptrdiff_t>(start.size() - 1);
  std::exception_ptr error;

#pragma omp parallel if (execution == Execution::Parallel)
  {
    LinearSolver direct(solve_tol);
    std::size_t fallbacks = 0;
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < jobs; ++j) {
      try {
        std::unique_ptr<RecycledNodeSolver> recycled;
        if (recycle) {
          const cplx anchor = anchors.empty() ? squares[start[j]].center : anchors[start[j]];
          try {
            recycled = std::make_unique<RecycledNodeSolver>(fn, anchor, g, solve_tol);
          } catch (const SingularSystem&) {
          }
        }
        for (std::size_t s = start[j]; s < start[j + 1]; ++s) {
          const SearchRegion& sq = squares[s];
          VecC sum = VecC::Zero(fn.dimension);
          bool failed = false;
          for (int q = 0; q < m0; ++q) {
            const cplx z = node(sq, q, m0);
            LinearSolveReport rep;
            bool ok = false;
            if (recycled) {
              rep = recycled->solve(z);
              ok = rep.condition_flag == SolveStatus::Ok;
            }
            if (!ok) {
              if (recycled) ++fallbacks;
              try {
                rep = direct.solve(fn.evaluate(z), g);
                ok = rep.condition_flag == SolveStatus::Ok;
              } catch (const SingularSystem&) {
              }
            }
            if (!ok) {
              failed = true;
              break;
            }
            sum += std::polar(1.0, kTwoPi * (q + 1) / m0) * rep.solution;
          }
          out.failed[s] = failed ? 1 : 0;
          out.values[s] = failed ? std::numeric_limits<double>::infinity() : sq.radius() / m0 * sum.norm();
        }
      } catch (...) {
#pragma omp critical(phoband_sim_error)
        if (!error) error = std::current_exception();
      }
    }
#pragma omp atomic
    out.direct_fallbacks += fallbacks;
  }
  if (error) std::rethrow_exception(error);
  return out;
}

double indicator(const HolomorphicMatrixFn& fn, const SearchRegion& region, const VecC& g, int m0,
                 double solve_tol, NodeSolve strategy) {
  if (!fn.is_admissible(region)) {
    std::ostringstream os;
    os << "contour around " << region.center << " (radius " << region.radius() << ") is too close to a pole";
    throw PoleProximity(os.str());
  }
  const SearchRegion one[] = {region};
  return indicator_batch(fn, one, g, m0, solve_tol, Execution::Serial, strategy).values.front();
}

SimResult find_eigenvalues(const HolomorphicMatrixFn& fn, const SearchRegion& region, const SimConfig& cfg) {
  cfg.validate();
  if (!(region.half_side > 0.0)) throw InvalidParameter("search region must have positive half side");
  if (!fn.is_admissible(region)) {
    std::ostringstream os;
    os << "search region centred at " << region.center << " with half side " << region.half_side
       << " is not admissible (pole inside the guarded circumscribing disk)";
    throw RegionNotAdmissible(os.str());
  }

  SimResult result;
  const VecC g = random_probe(fn.dimension, cfg.rng_seed);
  std::vector<SearchRegion> frontier{SearchRegion{region.center, region.half_side, 0}};
  std::vector<cplx> anchors{region.center};
  std::vector<SearchRegion> terminal;
  std::vector<double> terminal_indicator;

  while (!frontier.empty()) {
    if (frontier.size() > cfg.max_frontier) {
      std::ostringstream os;
      os << "quadtree frontier of " << frontier.size() << " squares at level " << frontier.front().level
         << " exceeds max_frontier=" << cfg.max_frontier;
      throw BudgetExceeded(os.str());
    }
    auto batch = indicator_batch(fn, frontier, g, cfg.m0, cfg.solve_tol, cfg.execution, cfg.node_solve, anchors);
    result.stats.squares += frontier.size();
    result.stats.solves += frontier.size() * cfg.m0;
    result.stats.direct_fallbacks += batch.direct_fallbacks;

    std::vector<SearchRegion> retry;
    std::vector<cplx> retry_anchors;
    std::vector<std::size_t> retry_index;
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      if (!batch.failed[s]) continue;
      SearchRegion shifted = frontier[s];
      shifted.center += cfg.beta0 / 10.0 * kJitterDirection;
      retry.push_back(shifted);
      retry_anchors.push_back(anchors[s]);
      retry_index.push_back(s);
    }
    if (!retry.empty()) {
      const auto again =
          indicator_batch(fn, retry, g, cfg.m0, cfg.solve_tol, cfg.execution, cfg.node_solve, retry_anchors);
      result.stats.jitter_retries += retry.size();
      result.stats.solves += retry.size() * cfg.m0;
      result.stats.direct_fallbacks += again.direct_fallbacks;
      for (std::size_t r = 0; r < retry.size(); ++r) batch.values[retry_index[r]] = again.values[r];
    }

    std::vector<SearchRegion> next;
    std::vector<cplx> next_anchors;
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      const SearchRegion& sq = frontier[s];
      const bool survived = batch.values[s] > cfg.delta0;
      result.trace.push_back({sq.level, sq.center, sq.half_side, batch.values[s], survived});
      if (!survived) continue;
      if (sq.diameter() <= cfg.beta0) {
        terminal.push_back(sq);
        terminal_indicator.push_back(batch.values[s]);
      } else if (sq.level >= cfg.max_level) {
        std::ostringstream os;
        os << "reached max_level=" << cfg.max_level << " with square of diameter " << sq.diameter()
           << " still above delta0 (indicator " << batch.values[s] << ")";
        throw BudgetExceeded(os.str());
      } else {
        for (const auto& child : sq.children()) {
          next.push_back(child);
          next_anchors.push_back(sq.center + sq.radius() * kAnchorOffset);
        }
      }
    }
    frontier = std::move(next);
    anchors = std::move(next_anchors);
  }

  // Single-linkage merge of terminal centres closer than 2 beta0.
  const std::size_t nt = terminal.size();
  std::vector<std::size_t> parent(nt);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < nt; ++a) {
    for (std::size_t b = a + 1; b < nt; ++b) {
      if (std::abs(terminal[a].center - terminal[b].center) <= 2.0 * cfg.beta0) {
        const auto ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups(nt);
  for (std::size_t a = 0; a < nt; ++a) groups[find(a)].push_back(a);
  for (const auto& grp : groups) {
    if (grp.empty()) continue;
    cplx sum(0.0);
    double hs = 0.0, ind = 0.0;
    for (std::size_t a : grp) {
      sum += terminal[a].center;
      hs = std::max(hs, terminal[a].half_side);
      ind = std::max(ind, terminal_indicator[a]);
    }
    result.eigenvalues.push_back({sum / static_cast<double>(grp.size()), hs, ind});
  }
  std::ranges::sort(result.eigenvalues, [](const EigenvalueEstimate& a, const EigenvalueEstimate& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return result;
}

void write_indicator_map(std::span<const IndicatorRecord> trace, std::ostream& out) {
  out.precision(17);
  out << "# level re_center im_center half_side indicator\n";
  for (const auto& r : trace) {
    if (!r.survived) continue;
    out << r.level << ' ' << r.center.real() << ' ' << r.center.imag() << ' ' << r.half_side << ' ' << r.indicator
        << '\n';
  }
}

}  // namespace phoband
