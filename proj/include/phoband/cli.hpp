#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "phoband/bands.hpp"
#include "phoband/config.hpp"
#include "phoband/sim.hpp"

namespace phoband {

struct RunOptions {
  bool dump_matrices = false;             ///< write A, Sx, Sy, Ma, Mb triplet files to the output dir
  std::optional<std::uint64_t> seed;      ///< overrides search.seed
  std::optional<cplx> demo_root;          ///< indicator-map: use T(w) = w - root instead of the FEM operator
  std::optional<Vec2> k;                  ///< indicator-map: Bloch vector, default first path vertex
};

/// Subcommand bodies. Each writes its artifacts under cfg.output_dir and returns the
/// in-memory result; errors propagate as exceptions.
BandDiagram run_bands(RunConfig cfg, const RunOptions& opt = {});
ConvergenceReport run_converge(RunConfig cfg, const RunOptions& opt = {});
SimResult run_indicator_map(RunConfig cfg, const RunOptions& opt = {});

}  // namespace phoband
