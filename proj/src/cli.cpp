#include "phoband/cli.hpp"

#include <fstream>

#include "phoband/assembly.hpp"
#include "phoband/errors.hpp"
#include "phoband/output.hpp"

namespace phoband {

namespace {

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = cfg.output_dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void apply(RunConfig& cfg, const RunOptions& opt) {
  if (opt.seed) cfg.sim.rng_seed = *opt.seed;
}

void dump_matrices(const RunConfig& cfg, const OperatorBundle& b) {
  const std::pair<const char*, const SparseReal*> mats[] = {
      {"A.txt", &b.A}, {"Sx.txt", &b.Sx}, {"Sy.txt", &b.Sy}, {"Ma.txt", &b.Ma}, {"Mb.txt", &b.Mb}};
  for (const auto& [name, m] : mats) {
    auto out = open_output(cfg, name);
    dump_triplets(*m, out);
  }
}

}  // namespace

BandDiagram run_bands(RunConfig cfg, const RunOptions& opt) {
  apply(cfg, opt);
  const auto mesh = cfg.build_mesh();
  if (opt.dump_matrices) dump_matrices(cfg, assemble(mesh, build_periodic_dof_map(mesh)));
  BandDiagram diagram = sweep_bands(mesh, cfg.model(), cfg.kpath, cfg.region, cfg.sim);
  if (cfg.wants("csv")) {
    auto out = open_output(cfg, "bands.csv");
    write_bands_csv(diagram, out);
  }
  if (cfg.wants("json")) {
    auto out = open_output(cfg, "bands.json");
    write_bands_json(diagram, out);
  }
  if (cfg.wants("svg")) {
    auto out = open_output(cfg, "bands.svg");
    write_bands_svg(diagram, out);
  }
  return diagram;
}

ConvergenceReport run_converge(RunConfig cfg, const RunOptions& opt) {
  apply(cfg, opt);
  if (!cfg.mesh_n) throw ConfigError("converge refines structured meshes and needs mesh.n, not mesh files");
  if (opt.dump_matrices) {
    const auto mesh = generate_structured(cfg.converge.n0, cfg.r, cfg.mass_rule);
    dump_matrices(cfg, assemble(mesh, build_periodic_dof_map(mesh)));
  }
  const auto report = convergence_study(cfg.converge, cfg.model(), cfg.region, cfg.sim);
  auto out = open_output(cfg, "converge.csv");
  write_converge_csv(report, out);
  return report;
}

SimResult run_indicator_map(RunConfig cfg, const RunOptions& opt) {
  apply(cfg, opt);
  HolomorphicMatrixFn fn;
  if (opt.demo_root) {
    std::vector<Eigen::MatrixXcd> c(2, Eigen::MatrixXcd(1, 1));
    c[0](0, 0) = -*opt.demo_root;
    c[1](0, 0) = 1.0;
    fn = polynomial_fn(std::move(c));
  } else {
    const auto mesh = cfg.build_mesh();
    const auto bundle = assemble(mesh, build_periodic_dof_map(mesh));
    if (opt.dump_matrices) dump_matrices(cfg, bundle);
    const Vec2 k = opt.k ? *opt.k : cfg.kpath.vertices.front();
    fn = bloch_fn(std::make_shared<const BlochOperator>(bundle, k, cfg.model(), cfg.guard()), cfg.guard());
  }
  auto result = find_eigenvalues(fn, cfg.region, cfg.sim);
  auto out = open_output(cfg, "indicator_map.txt");
  write_indicator_map(result.trace, out);
  return result;
}

}  // namespace phoband
