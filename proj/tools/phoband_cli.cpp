// phoband: band structures of dispersive 2D photonic crystals (TE).
//
//   phoband bands config.ini
//   phoband converge config.ini --seed 7
//   phoband indicator-map config.ini --demo-root 1.5,0.2

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "phoband/cli.hpp"
#include "phoband/config.hpp"
#include "phoband/errors.hpp"

namespace {

enum Exit { kOk = 0, kSolverError = 1, kConfigError = 2, kPartial = 3 };

phoband::Vec2 parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw phoband::ConfigError("expected two comma-separated numbers: " + s);
  return {phoband::eval_expression(s.substr(0, comma)), phoband::eval_expression(s.substr(comma + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photonic band structures of dispersive 2D crystals (TE polarization)"};
  app.require_subcommand(1);

  std::string config_path;
  bool dump = false;
  std::optional<std::uint64_t> seed;
  std::string demo_root, kvec;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_flag("--dump-matrices", dump, "write A, Sx, Sy, Ma, Mb as 'row col re im' triplets");
    sub->add_option("--seed", seed, "override search.seed");
  };
  auto* bands = app.add_subcommand("bands", "band diagram along the k path: bands.csv, bands.svg");
  auto* converge = app.add_subcommand("converge", "eigenvalue under uniform refinement: converge.csv");
  auto* imap = app.add_subcommand("indicator-map", "surviving quadtree squares: indicator_map.txt");
  for (auto* sub : {bands, converge, imap}) add_common(sub);
  imap->add_option("--demo-root", demo_root, "use the scalar function w - root (re,im) instead of the operator");
  imap->add_option("--k", kvec, "Bloch vector k1,k2 (default: first path vertex)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;  // --help exits 0
  }

  try {
    auto cfg = phoband::load_config(config_path);
    phoband::RunOptions opt;
    opt.dump_matrices = dump;
    opt.seed = seed;
    if (!demo_root.empty()) {
      const auto p = parse_pair(demo_root);
      opt.demo_root = phoband::cplx(p[0], p[1]);
    }
    if (!kvec.empty()) opt.k = parse_pair(kvec);

    if (app.got_subcommand(bands)) {
      const auto diagram = phoband::run_bands(cfg, opt);
      for (const auto& f : diagram.metadata.failures) {
        std::cerr << fmt::format("phoband: k sample {} failed: {}\n", f.sample, f.message);
      }
      std::cout << fmt::format("{} k samples written to {}\n", diagram.records.size(), cfg.output_dir.string());
      return diagram.metadata.failures.empty() ? kOk : kPartial;
    }
    if (app.got_subcommand(converge)) {
      const auto report = phoband::run_converge(cfg, opt);
      for (const auto& r : report.rows) {
        std::cout << fmt::format("n={:4d} omega/2pi={:.6f}{:+.6f}i xi={} order={}\n", r.n, r.omega.real() / phoband::kTwoPi,
                                 r.omega.imag() / phoband::kTwoPi, r.xi ? fmt::format("{:.4g}", *r.xi) : "-",
                                 r.order ? fmt::format("{:.4f}", *r.order) : "-");
      }
      return kOk;
    }
    const auto result = phoband::run_indicator_map(cfg, opt);
    std::cout << fmt::format("{} squares evaluated, {} eigenvalue(s)\n", result.stats.squares,
                             result.eigenvalues.size());
    return kOk;
  } catch (const phoband::ConfigError& e) {
    std::cerr << "phoband: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const phoband::ParseError& e) {
    std::cerr << "phoband: parse error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "phoband: error: " << e.what() << '\n';
    return kSolverError;
  }
}
