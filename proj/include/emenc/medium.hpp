#pragma once

#include <functional>
#include <variant>

#include "emenc/shape.hpp"
#include "emenc/vec3.hpp"

namespace emenc {

/// Constant background (eps0, mu0, sigma0) in normalized units.
struct BackgroundMedium {
  double eps0 = 1.0;
  double mu0 = 1.0;
  double sigma0 = 0.0;

  double wave_speed() const;
  /// Throws invalid_material unless eps0 > 0, mu0 > 0, sigma0 >= 0.
  void validate() const;
};

/// A bounded real field on D: a single number for piecewise-constant obstacles, or a callable.
class MaterialField {
 public:
  using Fn = std::function<double(const Vec3&)>;

  MaterialField(double value = 0.0) : v_(value) {}  // NOLINT(google-explicit-constructor)
  MaterialField(Fn fn) : v_(std::move(fn)) {}       // NOLINT(google-explicit-constructor)

  bool is_constant() const { return std::holds_alternative<double>(v_); }
  double constant() const { return std::get<double>(v_); }
  double operator()(const Vec3& x) const {
    return is_constant() ? std::get<double>(v_) : std::get<Fn>(v_)(x);
  }

 private:
  std::variant<double, Fn> v_;
};

/// Obstacle D with perturbations: eps_r = 1 + e, mu_r = 1 + m, sigma = sigma0 + h on D.
struct ObstacleSpec {
  Shape shape;
  MaterialField e_pert;
  MaterialField m_pert;
  MaterialField h_pert;

  bool piecewise_constant() const {
    return e_pert.is_constant() && m_pert.is_constant() && h_pert.is_constant();
  }
  double eps_r(const Vec3& x) const { return 1.0 + e_pert(x); }
  double mu_r(const Vec3& x) const { return 1.0 + m_pert(x); }

  /// Throws invalid_material if eps_r <= 0, mu_r <= 0 or sigma0 + h < 0 anywhere (sampled for
  /// callable fields).
  void validate(const BackgroundMedium& bg) const;
};

/// Default number of accepted quasi-random interior samples for callable material fields.
inline constexpr int kMaterialSamples = 10000;

/// Interior sample points of D (Halton in the bounding box, rejection on membership).
std::vector<Vec3> interior_samples(const Shape& shape, int count);

enum class MaterialClass { A_I, A_II, neither };
const char* to_string(MaterialClass c);

struct MaterialClassification {
  MaterialClass cls = MaterialClass::neither;
  /// Infimum over D of the left-hand side of the satisfied condition; for `neither` the larger of
  /// the two infima (which is <= 0).
  double margin = 0.0;
};

MaterialClassification classify_material(const ObstacleSpec& obstacle, const BackgroundMedium& bg);

/// Infima over D of (1 - 1/eps_r) + (1 - mu_r) and (1 - eps_r) + (1 - 1/mu_r).
struct JumpMargins {
  double a1 = 0.0;
  double a2 = 0.0;
};
JumpMargins jump_margins(const ObstacleSpec& obstacle);

enum class Region { A1, A2, boundary, outside_both };
const char* to_string(Region r);

/// Location of a homogeneous material in the (mu_r, eps_r) plane:
///   A1 = { eps_r > 1/(2 - mu_r), 0 < mu_r < 2 },  A2 = { 0 < eps_r < 2 - 1/mu_r, mu_r > 1/2 }.
/// Points on either boundary curve (including (1,1), the only common boundary point) map to
/// `boundary`.
Region region_membership(double eps_r, double mu_r);

/// dist({p}, dD) - eta. Throws geometry if the closed ball meets the closure of D.
double dist_D_B(const Shape& shape, const Vec3& p, double eta);

}  // namespace emenc
