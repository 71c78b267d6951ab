#include "phoband/dielectric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phoband/errors.hpp"

namespace phoband {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr cplx kI{0.0, 1.0};

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParameter(std::string("invalid dielectric parameters: ") + what);
}

void check_guard(const std::vector<cplx>& poles, cplx omega, double guard, const char* what) {
  for (cplx p : poles) {
    if (std::abs(omega - p) <= guard) {
      std::ostringstream os;
      os << what << ": omega=" << omega << " lies within " << guard << " of pole " << p;
      throw PoleProximity(os.str());
    }
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Constant:
      return "Constant";
    case ModelKind::Lorentz:
      return "Lorentz";
    case ModelKind::DrudeLossless:
      return "DrudeLossless";
    case ModelKind::DrudeLossy:
      return "DrudeLossy";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (ModelKind k : {ModelKind::Constant, ModelKind::Lorentz, ModelKind::DrudeLossless, ModelKind::DrudeLossy}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown material kind '" + std::string(name) + "'");
}

DielectricModel::DielectricModel(ModelParams params, double eps_background)
    : params_(params), eps_background_(eps_background) {
  require(eps_background > 0.0 && std::isfinite(eps_background), "eps_background must be positive");
}

DielectricModel DielectricModel::constant(double eps_b, double eps_background) {
  require(eps_b > 0.0 && std::isfinite(eps_b), "Constant requires eps_b > 0");
  return DielectricModel(ConstantParams{eps_b}, eps_background);
}

DielectricModel DielectricModel::lorentz(double eps_inf, double omega_L, double omega_T, double eps_background) {
  require(eps_inf > 0.0, "Lorentz requires eps_inf > 0");
  require(omega_T > 0.0 && omega_L > omega_T, "Lorentz requires omega_L > omega_T > 0");
  return DielectricModel(LorentzParams{eps_inf, omega_L, omega_T}, eps_background);
}

DielectricModel DielectricModel::drude_lossless(double omega_p, double eps_background) {
  require(omega_p > 0.0, "Drude requires omega_p > 0");
  return DielectricModel(DrudeLosslessParams{omega_p}, eps_background);
}

DielectricModel DielectricModel::drude_lossy(double omega_p, double gamma, double eps_background) {
  require(omega_p > 0.0, "Drude requires omega_p > 0");
  require(gamma > 0.0, "DrudeLossy requires gamma > 0");
  return DielectricModel(DrudeLossyParams{omega_p, gamma}, eps_background);
}

ModelKind DielectricModel::kind() const {
  return std::visit(overloaded{[](const ConstantParams&) { return ModelKind::Constant; },
                               [](const LorentzParams&) { return ModelKind::Lorentz; },
                               [](const DrudeLosslessParams&) { return ModelKind::DrudeLossless; },
                               [](const DrudeLossyParams&) { return ModelKind::DrudeLossy; }},
                    params_);
}

cplx DielectricModel::eval(cplx w, double guard) const {
  check_guard(singularities(), w, guard, "eval");
  return std::visit(
      overloaded{[](const ConstantParams& p) { return cplx(p.eps_b); },
                 [w](const LorentzParams& p) {
                   return p.eps_inf * (p.omega_L * p.omega_L - w * w) / (p.omega_T * p.omega_T - w * w);
                 },
                 [w](const DrudeLosslessParams& p) { return 1.0 - p.omega_p * p.omega_p / (w * w); },
                 [w](const DrudeLossyParams& p) { return 1.0 - p.omega_p * p.omega_p / (w * (w + kI * p.gamma)); }},
      params_);
}

cplx DielectricModel::derivative(cplx w, double guard) const {
  check_guard(singularities(), w, guard, "derivative");
  return std::visit(overloaded{[](const ConstantParams&) { return cplx(0.0); },
                               [w](const LorentzParams& p) {
                                 const cplx d = p.omega_T * p.omega_T - w * w;
                                 return p.eps_inf * 2.0 * w * (p.omega_L * p.omega_L - p.omega_T * p.omega_T) / (d * d);
                               },
                               [w](const DrudeLosslessParams& p) { return 2.0 * p.omega_p * p.omega_p / (w * w * w); },
                               [w](const DrudeLossyParams& p) {
                                 const cplx d = w * w + kI * p.gamma * w;
                                 return p.omega_p * p.omega_p * (2.0 * w + kI * p.gamma) / (d * d);
                               }},
                    params_);
}

cplx DielectricModel::omega_sq_eps(cplx w, double guard) const {
  check_guard(poles(), w, guard, "omega_sq_eps");
  return std::visit(
      overloaded{[w](const ConstantParams& p) { return w * w * p.eps_b; },
                 [w](const LorentzParams& p) {
                   return w * w * p.eps_inf * (p.omega_L * p.omega_L - w * w) / (p.omega_T * p.omega_T - w * w);
                 },
                 [w](const DrudeLosslessParams& p) { return w * w - p.omega_p * p.omega_p; },
                 [w](const DrudeLossyParams& p) { return w * w - p.omega_p * p.omega_p * w / (w + kI * p.gamma); }},
      params_);
}

std::vector<cplx> DielectricModel::poles() const {
  return std::visit(overloaded{[](const ConstantParams&) { return std::vector<cplx>{}; },
                               [](const LorentzParams& p) {
                                 return std::vector<cplx>{cplx(p.omega_T), cplx(-p.omega_T)};
                               },
                               [](const DrudeLosslessParams&) { return std::vector<cplx>{}; },
                               [](const DrudeLossyParams& p) { return std::vector<cplx>{cplx(0.0, -p.gamma)}; }},
                    params_);
}

std::vector<cplx> DielectricModel::singularities() const {
  auto s = poles();
  if (kind() == ModelKind::DrudeLossless || kind() == ModelKind::DrudeLossy) s.push_back(cplx(0.0));
  return s;
}

bool DielectricModel::real_coefficients() const { return kind() != ModelKind::DrudeLossy; }

std::string DielectricModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind()) << "{";
  std::visit(overloaded{[&](const ConstantParams& p) { os << "eps_b=" << p.eps_b; },
                        [&](const LorentzParams& p) {
                          os << "eps_inf=" << p.eps_inf << ", omega_L=" << p.omega_L << ", omega_T=" << p.omega_T;
                        },
                        [&](const DrudeLosslessParams& p) { os << "omega_p=" << p.omega_p; },
                        [&](const DrudeLossyParams& p) { os << "omega_p=" << p.omega_p << ", gamma=" << p.gamma; }},
             params_);
  os << ", eps_background=" << eps_background_ << "}";
  return os.str();
}

bool region_is_holomorphic(const DielectricModel& model, const SearchRegion& region, double guard) {
  const double radius = region.radius();
  return std::ranges::all_of(model.poles(), [&](cplx p) {
    const double dist = std::max(0.0, std::abs(p - region.center) - radius);
    return dist > guard;
  });
}

}  // namespace phoband
