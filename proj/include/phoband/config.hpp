#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phoband/bands.hpp"
#include "phoband/dielectric.hpp"
#include "phoband/mesh.hpp"
#include "phoband/region.hpp"
#include "phoband/sim.hpp"

namespace phoband {

/// Flat `section.key = value` file. Lines starting with '#' are comments.
/// Numeric values accept pi and the operators + - * / with parentheses.
struct RunConfig {
  double r = 0.378;

  ModelKind model_kind = ModelKind::Constant;
  std::map<std::string, double> model_params;  ///< eps_b, eps_inf, omega_L, omega_T, omega_p, gamma
  double eps_background = 1.0;

  std::optional<int> mesh_n;
  std::filesystem::path node_file, ele_file;
  InclusionMass mass_rule = InclusionMass::AreaFraction;

  KPath kpath = KPath::standard();
  SearchRegion region{cplx(5.0, 0.0), 4.8, 0};
  SimConfig sim;

  ConvergenceSetup converge;

  std::filesystem::path output_dir = ".";
  std::vector<std::string> formats{"csv", "svg"};

  /// Throws ConfigError for inconsistent or out-of-range settings.
  void validate() const;

  DielectricModel model() const;
  double guard() const { return 10.0 * sim.beta0; }
  bool wants(const std::string& format) const;

  /// Structured mesh from mesh.n or the imported files. Throws like generate_structured / import_mesh.
  UnitCellMesh build_mesh() const;
};

/// Relative mesh paths are resolved against `base_dir`. Throws ConfigError.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& file);

/// Evaluates a numeric expression such as "2*pi*8.75/8.12". Throws ConfigError.
double eval_expression(const std::string& text);

}  // namespace phoband
