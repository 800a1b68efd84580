#pragma once

// Bounded domains {rho < 0} in C^n given by a defining function and its
// holomorphic gradient (d rho/d z_1, ..., d rho/d z_n).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kjet/circle.hpp"
#include "kjet/disc.hpp"
#include "kjet/errors.hpp"

namespace kjet {

struct DomainFlags {
  bool psh = false;
  bool convex = false;
  bool strictly_convex = false;
};

/// Serializable description of a built-in domain.
struct DomainSpec {
  std::string kind;  // disc | ball | ellipsoid | complex_ellipsoid | custom
  std::vector<double> coeffs;
  std::vector<int> exponents;
};

namespace detail {

inline CVec random_point_in_ball(std::mt19937_64& rng, std::size_t n, double radius) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  CVec v(static_cast<Eigen::Index>(n));
  for (auto& z : v) z = cplx(normal(rng), normal(rng));
  v.normalize();
  return v * (radius * std::pow(uni(rng), 1.0 / (2.0 * static_cast<double>(n))));
}

// Holomorphic gradient by central differences: (d/dx - i d/dy) / 2.
inline CVec finite_difference_gradient(const std::function<double(const CVec&)>& rho, const CVec& z,
                                       double h) {
  CVec g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    CVec zp = z, zm = z;
    zp(i) += h;
    zm(i) -= h;
    const double dx = (rho(zp) - rho(zm)) / (2.0 * h);
    zp = z;
    zm = z;
    zp(i) += cplx(0.0, h);
    zm(i) -= cplx(0.0, h);
    const double dy = (rho(zp) - rho(zm)) / (2.0 * h);
    g(i) = cplx(0.5 * dx, -0.5 * dy);
  }
  return g;
}

}  // namespace detail

class Domain {
 public:
  using Rho = std::function<double(const CVec&)>;
  using Gradient = std::function<CVec(const CVec&)>;

  inline static constexpr double fd_step = 1e-6;

  /// Without `drho` the gradient falls back to central differences with
  /// step 1e-6. A supplied gradient is checked against finite differences
  /// at 100 random probe points.
  Domain(std::size_t n, Rho rho, Gradient drho, DomainFlags flags, double bounding_radius, CVec reference,
         DomainSpec spec = {"custom", {}, {}})
      : n_(n),
        rho_(std::move(rho)),
        drho_(std::move(drho)),
        flags_(flags),
        radius_(bounding_radius),
        reference_(std::move(reference)),
        spec_(std::move(spec)) {
    detail::require(n_ >= 1, Errc::InvalidInput, "domain dimension must be >= 1");
    detail::require(static_cast<std::size_t>(reference_.size()) == n_, Errc::InvalidInput,
                    "reference point dimension mismatch");
    detail::require(bounding_radius > 0.0, Errc::InvalidInput, "bounding radius must be positive");
    detail::require(rho_(reference_) < 0.0, Errc::InvalidInput, "reference point must satisfy rho < 0");
    if (!drho_) {
      drho_ = [r = rho_](const CVec& z) { return detail::finite_difference_gradient(r, z, fd_step); };
      return;
    }
    std::mt19937_64 rng(0x5eed);
    for (int trial = 0; trial < 100; ++trial) {
      const CVec z = detail::random_point_in_ball(rng, n_, radius_);
      const CVec analytic = drho_(z);
      const CVec fd = detail::finite_difference_gradient(rho_, z, fd_step);
      const double err = (analytic - fd).norm();
      detail::require(err <= 1e-5 * std::max(1.0, analytic.norm()), Errc::InvalidInput,
                      "gradient disagrees with finite differences (error " + std::to_string(err) + ")");
    }
  }

  std::size_t dim() const noexcept { return n_; }
  double rho(const CVec& z) const { return rho_(z); }
  CVec drho(const CVec& z) const { return drho_(z); }
  const DomainFlags& flags() const noexcept { return flags_; }
  double bounding_radius() const noexcept { return radius_; }
  const CVec& reference_point() const noexcept { return reference_; }
  const DomainSpec& spec() const noexcept { return spec_; }

 private:
  std::size_t n_;
  Rho rho_;
  Gradient drho_;
  DomainFlags flags_;
  double radius_;
  CVec reference_;
  DomainSpec spec_;
};

/// rho(z) = sum a_j |z_j|^2 - 1.
inline Domain make_ellipsoid(const std::vector<double>& a) {
  detail::require(!a.empty(), Errc::InvalidInput, "ellipsoid needs at least one coefficient");
  for (double aj : a)
    if (!(aj > 0.0)) detail::fail(Errc::NonPositiveCoefficient, "coefficient " + std::to_string(aj));
  const std::size_t n = a.size();
  auto rho = [a](const CVec& z) {
    double s = -1.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::norm(z(static_cast<Eigen::Index>(j)));
    return s;
  };
  auto drho = [a](const CVec& z) {
    CVec g(z.size());
    for (std::size_t j = 0; j < a.size(); ++j)
      g(static_cast<Eigen::Index>(j)) = a[j] * std::conj(z(static_cast<Eigen::Index>(j)));
    return g;
  };
  const double radius = 1.0 / std::sqrt(*std::min_element(a.begin(), a.end()));
  const bool unit = std::all_of(a.begin(), a.end(), [](double x) { return x == 1.0; });
  return Domain(n, rho, drho, {true, true, true}, radius,
                CVec::Zero(static_cast<Eigen::Index>(n)),
                {unit ? (n == 1 ? "disc" : "ball") : "ellipsoid", a, {}});
}

inline Domain make_ball(std::size_t n) { return make_ellipsoid(std::vector<double>(n, 1.0)); }

inline Domain make_unit_disc() { return make_ball(1); }

/// rho(z) = sum a_j |z_j|^{2 m_j} - 1, integer m_j >= 1.
inline Domain make_complex_ellipsoid(const std::vector<int>& m, std::vector<double> a = {}) {
  detail::require(!m.empty(), Errc::InvalidInput, "complex ellipsoid needs exponents");
  if (a.empty()) a.assign(m.size(), 1.0);
  detail::require(a.size() == m.size(), Errc::InvalidInput, "coefficient/exponent count mismatch");
  for (int mj : m) detail::require(mj >= 1, Errc::InvalidInput, "exponents must be integers >= 1");
  for (double aj : a)
    if (!(aj > 0.0)) detail::fail(Errc::NonPositiveCoefficient, "coefficient " + std::to_string(aj));
  auto rho = [a, m](const CVec& z) {
    double s = -1.0;
    for (std::size_t j = 0; j < m.size(); ++j) s += a[j] * std::pow(std::norm(z(static_cast<Eigen::Index>(j))), m[j]);
    return s;
  };
  auto drho = [a, m](const CVec& z) {
    CVec g(z.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
      const cplx zj = z(static_cast<Eigen::Index>(j));
      g(static_cast<Eigen::Index>(j)) = a[j] * m[j] * std::pow(std::norm(zj), m[j] - 1) * std::conj(zj);
    }
    return g;
  };
  double r2 = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) r2 += std::pow(a[j], -1.0 / m[j]);
  const bool quadratic = std::all_of(m.begin(), m.end(), [](int x) { return x == 1; });
  return Domain(m.size(), rho, drho, {true, true, quadratic}, std::sqrt(r2) * (1.0 + 1e-9),
                CVec::Zero(static_cast<Eigen::Index>(m.size())), {"complex_ellipsoid", a, m});
}

inline bool contains(const Domain& omega, const CVec& z, double margin) { return omega.rho(z) <= -margin; }

struct ConvexityReport {
  double min_second_difference = std::numeric_limits<double>::infinity();
  bool violated = false;       // claims_strictly_convex but curvature < threshold somewhere
  bool weakly_convex = false;  // curvature < threshold somewhere, regardless of claims
  int probes = 0;
  CVec worst_point;
  CVec worst_direction;
  inline static constexpr double threshold = 1e-8;
};

namespace detail {

// Boundary point on the ray reference + t * dir, t > 0, by bisection.
inline CVec shoot_to_boundary(const Domain& omega, const CVec& dir) {
  const CVec& p = omega.reference_point();
  double lo = 0.0;
  double hi = 2.0 * omega.bounding_radius() + p.norm();
  if (!(omega.rho(p + hi * dir) > 0.0)) fail(Errc::DegenerateRay, "ray does not leave the domain");
  CVec z = p;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    z = p + mid * dir;
    const double r = omega.rho(z);
    if (std::abs(r) <= 1e-10) return z;
    (r < 0.0 ? lo : hi) = mid;
  }
  fail(Errc::DegenerateRay, "bisection did not reach |rho| <= 1e-10");
}

// Richardson-extrapolated second difference of rho along a real chord.
inline double chord_curvature(const Domain& omega, const CVec& b, const CVec& v) {
  const double rb = omega.rho(b);
  auto second = [&](double h) { return (omega.rho(b + h * v) - 2.0 * rb + omega.rho(b - h * v)) / (h * h); };
  const double h = 1e-2;
  return (4.0 * second(h / 2) - second(h)) / 3.0;
}

}  // namespace detail

/// Samples boundary points and real tangent directions and reports the
/// smallest second difference of rho along tangent chords. Coordinate-axis
/// rays and directions are always probed; `trials` random ones are added.
inline ConvexityReport convexity_probe(const Domain& omega, int trials, unsigned long long seed) {
  ConvexityReport rep;
  const auto n = static_cast<Eigen::Index>(omega.dim());
  auto probe = [&](const CVec& b, CVec v) {
    const CVec g = omega.drho(b);
    const double gn = g.squaredNorm();
    if (gn > 0.0) {
      // tangent: Re sum v_j drho_j = 0
      const cplx pairing = (v.array() * g.array()).sum();
      v -= (pairing.real() / gn) * g.conjugate();
    }
    if (v.norm() < 1e-12) return;
    v.normalize();
    const double c = detail::chord_curvature(omega, b, v);
    ++rep.probes;
    if (c < rep.min_second_difference) {
      rep.min_second_difference = c;
      rep.worst_point = b;
      rep.worst_direction = v;
    }
  };

  std::vector<CVec> basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    CVec e = CVec::Zero(n);
    e(i) = 1.0;
    basis.push_back(e);
    basis.push_back(cplx(0.0, 1.0) * e);
  }
  for (const auto& ray : basis) {
    for (const CVec& dir : {ray, CVec(-ray)}) {
      const CVec b = detail::shoot_to_boundary(omega, dir);
      for (const auto& v : basis) probe(b, v);
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int t = 0; t < trials; ++t) {
    CVec dir(n), v(n);
    for (auto& z : dir) z = cplx(normal(rng), normal(rng));
    for (auto& z : v) z = cplx(normal(rng), normal(rng));
    dir.normalize();
    probe(detail::shoot_to_boundary(omega, dir), v);
  }
  rep.weakly_convex = rep.min_second_difference < ConvexityReport::threshold;
  rep.violated = omega.flags().strictly_convex && rep.weakly_convex;
  return rep;
}

/// theta -> rho(f(e^{i theta})) as a real circle function.
inline CircleFunction boundary_distance_profile(const Domain& omega, const AnalyticDisc& f, std::size_t N) {
  detail::require(f.dim() == omega.dim(), Errc::InvalidInput, "disc and domain dimensions differ");
  return CircleFunction::sample(N, 1, [&](double t) { return cplx(omega.rho(f.value(unit(t)))); });
}

}  // namespace kjet
