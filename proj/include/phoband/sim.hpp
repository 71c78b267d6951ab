#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "phoband/nep.hpp"
#include "phoband/region.hpp"

namespace phoband {

enum class Execution { Serial, Parallel };

/// How the m0 node systems of one circle are solved.
enum class NodeSolve {
  Direct,    ///< sparse LU at every node
  Recycled,  ///< RecycledNodeSolver per group of squares, LU fallback; needs fn.affine
  Auto,      ///< Recycled above kDirectSolveMaxDimension when fn.affine is set, else Direct
};

inline constexpr int kDirectSolveMaxDimension = 256;

struct SimConfig {
  double delta0 = 0.01;  ///< indicator threshold
  double beta0 = 1e-4;   ///< precision: terminal squares have diameter <= beta0
  int m0 = 16;           ///< trapezoid nodes per circle
  std::uint64_t rng_seed = 20240501;
  int max_level = 30;
  std::size_t max_frontier = 4096;
  double solve_tol = kDefaultSolveTol;
  Execution execution = Execution::Parallel;
  NodeSolve node_solve = NodeSolve::Auto;

  /// Throws InvalidParameter unless delta0 > 0, beta0 > 0, m0 >= 4 and even.
  void validate() const;
};

struct EigenvalueEstimate {
  cplx value;            ///< centroid of the merged terminal squares
  double box_half_side;  ///< largest half side among them
  double indicator;      ///< largest indicator among them
};

/// One evaluated square of the quadtree.
struct IndicatorRecord {
  int level;
  cplx center;
  double half_side;
  double indicator;
  bool survived;
};

struct SimStats {
  std::size_t squares = 0;
  std::size_t solves = 0;
  std::size_t jitter_retries = 0;
  std::size_t direct_fallbacks = 0;  ///< node solves the recycled solver handed to sparse LU
};

struct SimResult {
  std::vector<EigenvalueEstimate> eigenvalues;  ///< sorted by real, then imaginary part
  std::vector<IndicatorRecord> trace;           ///< every evaluated square, level by level
  SimStats stats;
};

/// Components i.i.d. uniform on the complex unit disk, then scaled to unit 2-norm.
VecC random_probe(int dimension, std::uint64_t seed);

/// Trapezoid approximation of || (1/2 pi i) \oint T(w)^{-1} g dw || on the circle
/// circumscribing `region`. Returns +inf if a node solve is singular or ill-conditioned.
/// Throws PoleProximity if the circle is not admissible.
double indicator(const HolomorphicMatrixFn& fn, const SearchRegion& region, const VecC& g, int m0,
                 double solve_tol = kDefaultSolveTol, NodeSolve strategy = NodeSolve::Direct);

/// Indicator of each square; squares are distributed over OpenMP threads.
/// `failed[s]` is set when a node of square s hit a singular or ill-conditioned system.
/// Consecutive squares with equal `anchors` entries share one recycled node solver
/// anchored there; an empty span anchors each square at its own centre.
struct BatchIndicators {
  std::vector<double> values;
  std::vector<char> failed;
  std::size_t direct_fallbacks = 0;
};
BatchIndicators indicator_batch(const HolomorphicMatrixFn& fn, std::span<const SearchRegion> squares, const VecC& g,
                                int m0, double solve_tol, Execution execution, NodeSolve strategy = NodeSolve::Auto,
                                std::span<const cplx> anchors = {});

/// All eigenvalues of fn inside `region` to precision beta0 (breadth-first quadtree).
/// Throws RegionNotAdmissible or BudgetExceeded.
SimResult find_eigenvalues(const HolomorphicMatrixFn& fn, const SearchRegion& region, const SimConfig& cfg);

/// Surviving squares as rows "level re im half_side indicator" below a '#' header.
void write_indicator_map(std::span<const IndicatorRecord> trace, std::ostream& out);

}  // namespace phoband
