#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "revgeo/errors.hpp"
#include "revgeo/spline.hpp"

namespace revgeo {

using Vec3 = std::array<double, 3>;

inline constexpr double pi = std::numbers::pi;

/// Reduces an angle to (-pi, pi].
inline double wrap_angle(double a)
{
  double r = std::remainder(a, 2.0 * pi);
  if (r <= -pi)
    r += 2.0 * pi;
  return r;
}

/// Reduces an angle to [0, 2 pi).
inline double wrap_positive(double a)
{
  double r = std::fmod(a, 2.0 * pi);
  if (r < 0.0)
    r += 2.0 * pi;
  if (r >= 2.0 * pi)
    r -= 2.0 * pi;
  return r;
}

inline double norm(const Vec3& a)
{
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

inline double distance3(const Vec3& a, const Vec3& b)
{
  return norm(Vec3{a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

/// Profile curve (phi(u), psi(u)) and its first two derivatives.
struct ProfileJet
{
  Jet phi;
  Jet psi;
};

/// Chart coordinates. v lives on the universal cover and is never wrapped
/// by the library; reduce it with wrap_angle() only for display.
struct SurfacePoint
{
  double u = 0.0;
  double v = 0.0;
};

/// Tangent at p in the orthonormal (parallel, meridian) frame.
struct TangentVector
{
  SurfacePoint p;
  double a_par = 0.0;
  double a_mer = 0.0;
};

/// Heading theta of a tangent together with its angles to the parallel
/// (alpha) and the meridian (beta).
struct Heading
{
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// First fundamental form quantities; F is identically zero.
struct Metric
{
  double E = 0.0;
  double G = 0.0;
  double E_u = 0.0;
  double G_u = 0.0;
  double rho = 0.0;
};

namespace profiles {

struct Sphere
{
  double R;
  ProfileJet operator()(double u) const
  {
    const double s = std::sin(u), c = std::cos(u);
    return {{R * s, R * c, -R * s}, {R * c, -R * s, -R * c}};
  }
};

struct Cylinder
{
  double R;
  ProfileJet operator()(double u) const { return {{R, 0.0, 0.0}, {u, 1.0, 0.0}}; }
};

struct Cone
{
  double slope;
  ProfileJet operator()(double u) const { return {{u, 1.0, 0.0}, {slope * u, slope, 0.0}}; }
};

// psi = a u^2
struct Paraboloid
{
  double a;
  ProfileJet operator()(double u) const { return {{u, 1.0, 0.0}, {a * u * u, 2.0 * a * u, 2.0 * a}}; }
};

struct Catenoid
{
  double a;
  ProfileJet operator()(double u) const
  {
    const double ch = std::cosh(u / a), sh = std::sinh(u / a);
    return {{a * ch, sh, ch / a}, {u, 1.0, 0.0}};
  }
};

struct Torus
{
  double R;
  double r;
  ProfileJet operator()(double u) const
  {
    const double s = std::sin(u), c = std::cos(u);
    return {{R + r * c, -r * s, -r * c}, {r * s, r * c, -r * s}};
  }
};

struct Plane
{
  ProfileJet operator()(double u) const { return {{u, 1.0, 0.0}, {0.0, 0.0, 0.0}}; }
};

struct Custom
{
  CubicSpline phi;
  CubicSpline psi;
  ProfileJet operator()(double u) const { return {phi(u), psi(u)}; }
};

} // namespace profiles

using Profile = std::variant<profiles::Sphere, profiles::Cylinder, profiles::Cone, profiles::Paraboloid,
                             profiles::Catenoid, profiles::Torus, profiles::Plane, profiles::Custom>;

/// One (u, phi, psi) row of a custom profile table.
struct ProfileSample
{
  double u;
  double phi;
  double psi;
};

/// Declarative description of a surface, as found in scenario files.
struct ProfileSpec
{
  std::string kind;
  std::map<std::string, double> params;
  std::vector<ProfileSample> samples; // custom only
  std::optional<double> u_min;
  std::optional<double> u_max;
  std::optional<double> axis_guard;
};

/// Surface of revolution r(u, v) = (phi(u) cos v, phi(u) sin v, psi(u)).
///
/// Admissible chart: u in [u_min, u_max] and phi(u) > axis_guard. Points on
/// or near the rotation axis are excluded. Axis values lists the profile
/// parameters where the curve meets the axis smoothly (phi = 0, phi' != 0,
/// psi' = 0); meridians can be continued through those.
class ProfileSurface
{
public:
  ProfileSurface(std::string kind, Profile profile, double u_min, double u_max, double axis_guard,
                 std::vector<double> axis_values = {})
    : kind_(std::move(kind))
    , profile_(std::move(profile))
    , u_min_(u_min)
    , u_max_(u_max)
    , axis_guard_(axis_guard)
    , axis_values_(std::move(axis_values))
  {
    if (!(u_min_ < u_max_))
      throw ConfigError("surface: u_min must be below u_max");
    if (!(axis_guard_ > 0.0))
      throw ConfigError("surface: axis guard must be positive");
  }

  const std::string& kind() const { return kind_; }
  const Profile& profile() const { return profile_; }
  double u_min() const { return u_min_; }
  double u_max() const { return u_max_; }
  double axis_guard() const { return axis_guard_; }
  const std::vector<double>& axis_values() const { return axis_values_; }

  bool is_sphere() const { return std::holds_alternative<profiles::Sphere>(profile_); }

  /// Profile jet without any chart check (needed just past the axis when
  /// continuing a meridian).
  ProfileJet jet(double u) const
  {
    return std::visit([u](const auto& p) { return p(u); }, profile_);
  }

  bool on_chart(double u) const
  {
    return std::isfinite(u) && u >= u_min_ && u <= u_max_ && jet(u).phi.f > axis_guard_;
  }

  bool on_chart(const SurfacePoint& p) const { return on_chart(p.u) && std::isfinite(p.v); }

  void require_on_chart(const SurfacePoint& p) const
  {
    if (!std::isfinite(p.u) || !std::isfinite(p.v) || p.u < u_min_ || p.u > u_max_)
      throw ChartError("point off chart: u=" + std::to_string(p.u));
    if (!(jet(p.u).phi.f > axis_guard_))
      throw ChartError("point on axis guard: u=" + std::to_string(p.u));
  }

  /// Metric at u; no chart check.
  Metric metric_unchecked(double u) const
  {
    const ProfileJet j = jet(u);
    Metric m;
    m.E = j.phi.df * j.phi.df + j.psi.df * j.psi.df;
    m.G = j.phi.f * j.phi.f;
    m.E_u = 2.0 * (j.phi.df * j.phi.ddf + j.psi.df * j.psi.ddf);
    m.G_u = 2.0 * j.phi.f * j.phi.df;
    m.rho = j.phi.f;
    return m;
  }

  Metric metric_at(double u) const
  {
    require_on_chart(SurfacePoint{u, 0.0});
    return metric_unchecked(u);
  }

  Vec3 embed(const SurfacePoint& p) const
  {
    require_on_chart(p);
    return embed_unchecked(p);
  }

  Vec3 embed_unchecked(const SurfacePoint& p) const
  {
    const ProfileJet j = jet(p.u);
    return {j.phi.f * std::cos(p.v), j.phi.f * std::sin(p.v), j.psi.f};
  }

private:
  std::string kind_;
  Profile profile_;
  double u_min_;
  double u_max_;
  double axis_guard_;
  std::vector<double> axis_values_;
};

namespace surfaces {

inline ProfileSurface sphere(double R = 1.0)
{
  if (!(R > 0.0))
    throw ConfigError("sphere: radius must be positive");
  return {"sphere", profiles::Sphere{R}, 0.0, pi, 1e-6 * R, {0.0, pi}};
}

inline ProfileSurface cylinder(double R = 1.0, double u_min = -10.0, double u_max = 10.0)
{
  if (!(R > 0.0))
    throw ConfigError("cylinder: radius must be positive (R=0 lies on the axis)");
  return {"cylinder", profiles::Cylinder{R}, u_min, u_max, 1e-6 * R};
}

inline ProfileSurface cone(double slope = 1.0, double u_max = 10.0)
{
  if (!std::isfinite(slope))
    throw ConfigError("cone: slope must be finite");
  return {"cone", profiles::Cone{slope}, 0.0, u_max, 1e-6};
}

inline ProfileSurface paraboloid(double a = 0.5, double u_max = 10.0)
{
  if (!(a != 0.0) || !std::isfinite(a))
    throw ConfigError("paraboloid: coefficient must be finite and nonzero");
  return {"paraboloid", profiles::Paraboloid{a}, 0.0, u_max, 1e-6, {0.0}};
}

inline ProfileSurface catenoid(double a = 1.0)
{
  if (!(a > 0.0))
    throw ConfigError("catenoid: waist radius must be positive");
  return {"catenoid", profiles::Catenoid{a}, -5.0 * a, 5.0 * a, 1e-6 * a};
}

inline ProfileSurface torus(double R = 2.0, double r = 1.0)
{
  if (!(r > 0.0) || !(R > r))
    throw ConfigError("torus: need R > r > 0");
  return {"torus", profiles::Torus{R, r}, -2.0 * pi, 2.0 * pi, 1e-6 * (R - r)};
}

inline ProfileSurface plane(double u_max = 100.0)
{
  return {"plane", profiles::Plane{}, 0.0, u_max, 1e-6, {0.0}};
}

inline ProfileSurface custom(const std::vector<ProfileSample>& samples)
{
  if (samples.size() < 4)
    throw ConfigError("custom profile: need at least 4 samples");
  std::vector<double> u, phi, psi;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    if (!std::isfinite(s.u) || !std::isfinite(s.phi) || !std::isfinite(s.psi))
      throw ConfigError("custom profile: non-finite sample " + std::to_string(k));
    if (k > 0 && !(s.u > samples[k - 1].u))
      throw ConfigError("custom profile: samples must be strictly increasing in u (sample " + std::to_string(k) +
                        ")");
    if (!(s.phi > 0.0))
      throw ConfigError("custom profile: phi must be positive (sample " + std::to_string(k) + ")");
    u.push_back(s.u);
    phi.push_back(s.phi);
    psi.push_back(s.psi);
  }
  double phi_min = phi.front();
  for (double p : phi)
    phi_min = std::min(phi_min, p);
  return {"custom", profiles::Custom{CubicSpline(u, phi), CubicSpline(u, psi)}, u.front(), u.back(),
          std::min(1e-6, 1e-3 * phi_min)};
}

} // namespace surfaces

namespace detail {

inline double require_param(const ProfileSpec& spec, const std::string& name)
{
  auto it = spec.params.find(name);
  if (it == spec.params.end())
    throw ConfigError(spec.kind + ": missing parameter '" + name + "'");
  return it->second;
}

inline double param_or(const ProfileSpec& spec, const std::string& name, double fallback)
{
  auto it = spec.params.find(name);
  return it == spec.params.end() ? fallback : it->second;
}

} // namespace detail

/// Builds a surface from a declarative spec, applying optional overrides of
/// the chart bounds and axis guard.
inline ProfileSurface make_surface(const ProfileSpec& spec)
{
  using detail::param_or;
  using detail::require_param;

  auto base = [&]() -> ProfileSurface {
    const std::string& k = spec.kind;
    if (k == "sphere")
      return surfaces::sphere(param_or(spec, "R", 1.0));
    if (k == "cylinder")
      return surfaces::cylinder(require_param(spec, "R"));
    if (k == "cone")
      return surfaces::cone(require_param(spec, "slope"));
    if (k == "paraboloid")
      return surfaces::paraboloid(require_param(spec, "a"));
    if (k == "catenoid")
      return surfaces::catenoid(param_or(spec, "a", 1.0));
    if (k == "torus")
      return surfaces::torus(require_param(spec, "R"), require_param(spec, "r"));
    if (k == "plane")
      return surfaces::plane();
    if (k == "custom")
      return surfaces::custom(spec.samples);
    throw ConfigError("unknown surface kind '" + k + "'");
  }();

  if (!spec.u_min && !spec.u_max && !spec.axis_guard)
    return base;
  return ProfileSurface(base.kind(), base.profile(), spec.u_min.value_or(base.u_min()),
                        spec.u_max.value_or(base.u_max()), spec.axis_guard.value_or(base.axis_guard()),
                        base.axis_values());
}

/// Unit tangent cos(theta) e_parallel + sin(theta) e_meridian. theta = 0 is
/// the increasing-v parallel direction, theta = pi/2 the increasing-u
/// meridian direction. Positive angles turn from e_parallel to e_meridian.
inline TangentVector tangent_from_heading(const ProfileSurface& S, const SurfacePoint& p, double theta)
{
  S.require_on_chart(p);
  return {p, std::cos(theta), std::sin(theta)};
}

inline Heading heading_from_tangent(const TangentVector& t)
{
  if (t.a_par == 0.0 && t.a_mer == 0.0)
    throw DomainError("heading of a zero tangent");
  Heading h;
  h.theta = std::atan2(t.a_mer, t.a_par);
  if (h.theta == -pi)
    h.theta = pi;
  h.alpha = h.theta;
  h.beta = pi / 2.0 - h.theta;
  return h;
}

inline Heading heading_from_tangent(const ProfileSurface& S, const TangentVector& t)
{
  S.require_on_chart(t.p);
  return heading_from_tangent(t);
}

} // namespace revgeo
