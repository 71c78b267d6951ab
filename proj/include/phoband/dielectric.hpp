#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phoband/region.hpp"
#include "phoband/types.hpp"

namespace phoband {

enum class ModelKind { Constant, Lorentz, DrudeLossless, DrudeLossy };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct ConstantParams {
  double eps_b;
};
struct LorentzParams {
  double eps_inf;
  double omega_L;
  double omega_T;
};
struct DrudeLosslessParams {
  double omega_p;
};
struct DrudeLossyParams {
  double omega_p;
  double gamma;
};

using ModelParams = std::variant<ConstantParams, LorentzParams, DrudeLosslessParams, DrudeLossyParams>;

/// Default distance a frequency must keep from any model pole (10 * beta0 at the default precision).
inline constexpr double kDefaultPoleGuard = 1e-3;

/// Inclusion permittivity eps_b(omega) plus the background value eps_a, in reduced units (a = c = 1).
///
/// Construction validates the parameters; a constructed model is immutable and
/// every member is safe to call concurrently.
class DielectricModel {
 public:
  static DielectricModel constant(double eps_b, double eps_background = 1.0);
  static DielectricModel lorentz(double eps_inf, double omega_L, double omega_T, double eps_background = 1.0);
  static DielectricModel drude_lossless(double omega_p, double eps_background = 1.0);
  static DielectricModel drude_lossy(double omega_p, double gamma, double eps_background = 1.0);

  ModelKind kind() const;
  const ModelParams& params() const { return params_; }
  double eps_background() const { return eps_background_; }

  /// eps_b(omega). Throws PoleProximity within `guard` of a singularity of eps_b.
  cplx eval(cplx omega, double guard = kDefaultPoleGuard) const;

  /// d eps_b / d omega, closed form.
  cplx derivative(cplx omega, double guard = kDefaultPoleGuard) const;

  /// omega^2 * eps_b(omega), evaluated without dividing by omega so that
  /// removable singularities at 0 stay removable. Guarded against poles().
  cplx omega_sq_eps(cplx omega, double guard = kDefaultPoleGuard) const;

  /// Poles of omega |-> omega^2 eps_b(omega).
  std::vector<cplx> poles() const;

  /// Poles of eps_b itself (a superset of poles(); Drude adds 0).
  std::vector<cplx> singularities() const;

  /// True when eps_b(conj w) = conj(eps_b(w)).
  bool real_coefficients() const;

  std::string describe() const;

 private:
  DielectricModel(ModelParams params, double eps_background);

  ModelParams params_;
  double eps_background_;
};

/// True iff every pole of omega^2 eps_b lies farther than `guard` from the disk
/// circumscribing `region`.
bool region_is_holomorphic(const DielectricModel& model, const SearchRegion& region, double guard);

}  // namespace phoband
