#include "phoband/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "phoband/errors.hpp"

namespace phoband {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text) : s_(text) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("bad numeric expression '" + s_ + "': " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = factor();
    for (;;) {
      if (eat('*')) v *= factor();
      else if (eat('/')) v /= factor();
      else return v;
    }
  }
  double factor() {
    if (eat('-')) return -factor();
    if (eat('+')) return factor();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    skip();
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return kPi;
    }
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  std::string s_;
  std::size_t pos_ = 0;
};

int to_int(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return v;
}

Vec2 to_pair(const std::string& key, const std::string& value) {
  const auto parts = split(value, ',');
  if (parts.size() != 2) throw ConfigError(key + ": expected two comma-separated numbers, got '" + value + "'");
  return {eval_expression(parts[0]), eval_expression(parts[1])};
}

const std::set<std::string> kModelParams{"eps_b", "eps_inf", "omega_L", "omega_T", "omega_p", "gamma"};

std::vector<std::string> required_params(ModelKind kind) {
  switch (kind) {
    case ModelKind::Constant: return {"eps_b"};
    case ModelKind::Lorentz: return {"eps_inf", "omega_L", "omega_T"};
    case ModelKind::DrudeLossless: return {"omega_p"};
    case ModelKind::DrudeLossy: return {"omega_p", "gamma"};
  }
  return {};
}

}  // namespace

double eval_expression(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty numeric value");
  return ExpressionParser(t).parse();
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::optional<std::vector<std::string>> labels;
  std::string line;
  int lineno = 0;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    try {
      if (key == "geometry.r") {
        cfg.r = eval_expression(value);
      } else if (key == "material.kind") {
        cfg.model_kind = model_kind_from_string(value);
      } else if (section == "material" && kModelParams.count(name)) {
        cfg.model_params[name] = eval_expression(value);
      } else if (key == "material.eps_background") {
        cfg.eps_background = eval_expression(value);
      } else if (key == "mesh.n") {
        cfg.mesh_n = to_int(key, value);
      } else if (key == "mesh.node_file") {
        cfg.node_file = resolve(value);
      } else if (key == "mesh.ele_file") {
        cfg.ele_file = resolve(value);
      } else if (key == "mesh.inclusion_mass") {
        if (value == "area_fraction") cfg.mass_rule = InclusionMass::AreaFraction;
        else if (value == "tagged") cfg.mass_rule = InclusionMass::Tagged;
        else throw ConfigError("mesh.inclusion_mass must be area_fraction or tagged");
      } else if (key == "kpath.vertices") {
        cfg.kpath.vertices.clear();
        for (const auto& v : split(value, ';')) cfg.kpath.vertices.push_back(to_pair(key, v));
      } else if (key == "kpath.labels") {
        labels = split(value, ',');
      } else if (key == "kpath.samples_per_segment") {
        cfg.kpath.samples_per_segment = to_int(key, value);
      } else if (key == "search.center") {
        const auto c = to_pair(key, value);
        cfg.region.center = cplx(c[0], c[1]);
      } else if (key == "search.half_side") {
        cfg.region.half_side = eval_expression(value);
      } else if (key == "search.bounds") {
        const auto b = split(value, ',');
        if (b.size() != 4) throw ConfigError("search.bounds expects re_lo, re_hi, im_lo, im_hi");
        cfg.region = SearchRegion::from_bounds(eval_expression(b[0]), eval_expression(b[1]), eval_expression(b[2]),
                                               eval_expression(b[3]));
      } else if (key == "search.delta0") {
        cfg.sim.delta0 = eval_expression(value);
      } else if (key == "search.beta0") {
        cfg.sim.beta0 = eval_expression(value);
      } else if (key == "search.m0") {
        cfg.sim.m0 = to_int(key, value);
      } else if (key == "search.seed") {
        cfg.sim.rng_seed = static_cast<std::uint64_t>(std::stoull(value));
      } else if (key == "search.max_level") {
        cfg.sim.max_level = to_int(key, value);
      } else if (key == "search.max_frontier") {
        cfg.sim.max_frontier = static_cast<std::size_t>(to_int(key, value));
      } else if (key == "converge.n0") {
        cfg.converge.n0 = to_int(key, value);
      } else if (key == "converge.levels") {
        cfg.converge.levels = to_int(key, value);
      } else if (key == "converge.k") {
        cfg.converge.k = to_pair(key, value);
      } else if (key == "output.dir") {
        cfg.output_dir = resolve(value);
      } else if (key == "output.formats") {
        cfg.formats = split(value, ',');
      } else {
        throw ConfigError("unknown key");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + " (" + key + "): " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(lineno) + " (" + key + "): " + e.what());
    }
  }
  if (seen.count("search.bounds") && (seen.count("search.center") || seen.count("search.half_side"))) {
    throw ConfigError("give either search.bounds or search.center/half_side, not both");
  }
  if (seen.count("kpath.vertices") && !labels) cfg.kpath.labels.clear();
  if (labels) cfg.kpath.labels = *labels;
  if (!seen.count("converge.n0") && cfg.mesh_n) cfg.converge.n0 = *cfg.mesh_n;
  cfg.converge.disc_radius = cfg.r;
  cfg.converge.mass_rule = cfg.mass_rule;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  return parse_config(in, file.parent_path());
}

void RunConfig::validate() const {
  const bool have_files = !node_file.empty() || !ele_file.empty();
  if (mesh_n && have_files) throw ConfigError("mesh.n and mesh files are mutually exclusive");
  if (!mesh_n && !have_files) throw ConfigError("one of mesh.n or mesh.node_file + mesh.ele_file is required");
  if (have_files && (node_file.empty() || ele_file.empty())) {
    throw ConfigError("mesh.node_file and mesh.ele_file must be given together");
  }
  if (mesh_n && *mesh_n < 2) throw ConfigError("mesh.n must be at least 2");
  if (!(r > 0.0 && r < 0.5)) throw ConfigError("geometry.r must lie in (0, 1/2)");
  for (const auto& p : required_params(model_kind)) {
    if (!model_params.count(p)) {
      throw ConfigError("material." + p + " is required for kind " + std::string(to_string(model_kind)));
    }
  }
  const auto need = required_params(model_kind);
  for (const auto& [name, v] : model_params) {
    if (std::find(need.begin(), need.end(), name) == need.end()) {
      throw ConfigError("material." + name + " does not apply to kind " + std::string(to_string(model_kind)));
    }
  }
  if (!(region.half_side > 0.0)) throw ConfigError("search.half_side must be positive");
  if (converge.levels < 2) throw ConfigError("converge.levels must be at least 2");
  if (converge.n0 < 2) throw ConfigError("converge.n0 must be at least 2");
  for (const auto& f : formats) {
    if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
  }
  try {
    sim.validate();
    kpath.validate();
    (void)model();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

DielectricModel RunConfig::model() const {
  auto p = [&](const char* name) { return model_params.at(name); };
  switch (model_kind) {
    case ModelKind::Constant: return DielectricModel::constant(p("eps_b"), eps_background);
    case ModelKind::Lorentz:
      return DielectricModel::lorentz(p("eps_inf"), p("omega_L"), p("omega_T"), eps_background);
    case ModelKind::DrudeLossless: return DielectricModel::drude_lossless(p("omega_p"), eps_background);
    case ModelKind::DrudeLossy: return DielectricModel::drude_lossy(p("omega_p"), p("gamma"), eps_background);
  }
  throw ConfigError("unknown material kind");
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

UnitCellMesh RunConfig::build_mesh() const {
  if (mesh_n) return generate_structured(*mesh_n, r, mass_rule);
  for (const auto& f : {node_file, ele_file}) {
    if (!std::filesystem::exists(f)) throw ConfigError("mesh file does not exist: " + f.string());
  }
  return import_mesh_files(node_file.string(), ele_file.string(), r, mass_rule);
}

}  // namespace phoband
