#pragma once

// Rational analytic discs Delta -> C^n and the explicit constructions used
// throughout: Blaschke products, Schwarz equality discs, reparametrization.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "kjet/circle.hpp"
#include "kjet/errors.hpp"

namespace kjet {

/// Polynomial coefficients in ascending order.
using Poly = std::vector<cplx>;

inline cplx horner(const Poly& p, cplx z) {
  cplx acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
  return acc;
}

inline Poly poly_multiply(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, cplx{0.0});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// First `count` Taylor coefficients at 0 of num/den (den[0] != 0).
inline Poly series_divide(const Poly& num, const Poly& den, std::size_t count) {
  Poly out(count, cplx{0.0});
  for (std::size_t j = 0; j < count; ++j) {
    cplx acc = j < num.size() ? num[j] : cplx{0.0};
    for (std::size_t i = 1; i <= j && i < den.size(); ++i) acc -= den[i] * out[j - i];
    out[j] = acc / den[0];
  }
  return out;
}

struct RationalComponent {
  Poly num;
  Poly den{cplx{1.0}};
};

class AnalyticDisc {
 public:
  AnalyticDisc() = default;

  explicit AnalyticDisc(std::vector<RationalComponent> comps) : comps_(std::move(comps)) { validate(); }

  /// f(zeta) = sum_j coeffs[j] zeta^j with coeffs[j] in C^n.
  static AnalyticDisc polynomial(const std::vector<CVec>& coeffs) {
    detail::require(!coeffs.empty(), Errc::InvalidInput, "polynomial disc needs coefficients");
    const auto n = static_cast<std::size_t>(coeffs.front().size());
    std::vector<RationalComponent> comps(n);
    for (std::size_t c = 0; c < n; ++c) {
      comps[c].num.resize(coeffs.size());
      for (std::size_t j = 0; j < coeffs.size(); ++j) {
        detail::require(static_cast<std::size_t>(coeffs[j].size()) == n, Errc::InvalidInput,
                        "coefficient dimension mismatch");
        comps[c].num[j] = coeffs[j](static_cast<Eigen::Index>(c));
      }
    }
    return AnalyticDisc(std::move(comps));
  }

  static AnalyticDisc scalar(Poly num, Poly den = {cplx{1.0}}) {
    return AnalyticDisc({RationalComponent{std::move(num), std::move(den)}});
  }

  std::size_t dim() const noexcept { return comps_.size(); }
  const RationalComponent& component(std::size_t c) const { return comps_.at(c); }
  const std::vector<RationalComponent>& components() const noexcept { return comps_; }

  bool is_polynomial() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const RationalComponent& rc) {
      return std::all_of(rc.den.begin() + 1, rc.den.end(), [](cplx z) { return z == cplx{0.0}; });
    });
  }

  /// Largest numerator or denominator degree over components.
  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& rc : comps_) d = std::max({d, rc.num.size() - 1, rc.den.size() - 1});
    return d;
  }

  /// Evaluation without the closed-disc check; used on slightly larger circles.
  CVec value(cplx z) const {
    CVec v(static_cast<Eigen::Index>(dim()));
    for (std::size_t c = 0; c < dim(); ++c)
      v(static_cast<Eigen::Index>(c)) = horner(comps_[c].num, z) / horner(comps_[c].den, z);
    return v;
  }

  /// Taylor coefficients a_0..a_{order} at the origin.
  std::vector<CVec> taylor(std::size_t order) const {
    std::vector<CVec> out(order + 1, CVec::Zero(static_cast<Eigen::Index>(dim())));
    for (std::size_t c = 0; c < dim(); ++c) {
      const Poly s = series_divide(comps_[c].num, comps_[c].den, order + 1);
      for (std::size_t j = 0; j <= order; ++j) out[j](static_cast<Eigen::Index>(c)) = s[j];
    }
    return out;
  }

 private:
  void validate() const {
    detail::require(!comps_.empty(), Errc::InvalidInput, "disc needs at least one component");
    for (const auto& rc : comps_) {
      detail::require(!rc.num.empty() && !rc.den.empty(), Errc::InvalidInput, "empty polynomial");
      for (const auto& z : rc.num)
        detail::require(std::isfinite(z.real()) && std::isfinite(z.imag()), Errc::InvalidInput,
                        "non-finite numerator coefficient");
      for (const auto& z : rc.den)
        detail::require(std::isfinite(z.real()) && std::isfinite(z.imag()), Errc::InvalidInput,
                        "non-finite denominator coefficient");
      if (rc.den.size() > 1) check_denominator(rc.den);
      else detail::require(rc.den[0] != cplx{0.0}, Errc::InvalidInput, "zero denominator");
    }
  }

  // No zeros in the closed disc: modulus >= 1e-9 on b(Delta) and winding 0.
  static void check_denominator(const Poly& den) {
    std::size_t N = 256;
    while (N < 8 * den.size()) N *= 2;
    for (;; N *= 2) {
      const auto trace = CircleFunction::sample(N, 1, [&](double t) { return horner(den, unit(t)); });
      try {
        const int w = winding_number(trace, 1e-9);
        detail::require(w == 0, Errc::InvalidInput, "denominator vanishes inside the unit disc");
        return;
      } catch (const Error& e) {
        if (e.code() == Errc::NearZero)
          detail::fail(Errc::InvalidInput, "denominator vanishes on the unit circle");
        if (e.code() != Errc::AliasRisk || N >= (std::size_t{1} << 16)) throw;
      }
    }
  }

  std::vector<RationalComponent> comps_;
};

inline CVec eval(const AnalyticDisc& f, cplx z) {
  if (std::abs(z) > 1.0 + 1e-15)
    detail::fail(Errc::OutsideClosedDisc, "|zeta| = " + std::to_string(std::abs(z)) + " > 1");
  return f.value(z);
}

inline CircleFunction boundary_trace(const AnalyticDisc& f, std::size_t N) {
  return CircleFunction::sample(N, f.dim(), [&](double t) { return f.value(unit(t)); });
}

/// prod_j (zeta - a_j) / (1 - conj(a_j) zeta).
inline AnalyticDisc blaschke_product(const std::vector<cplx>& zeros) {
  Poly num{cplx{1.0}}, den{cplx{1.0}};
  for (const auto& a : zeros) {
    if (!(std::abs(a) < 1.0))
      detail::fail(Errc::ModulusNotLessThanOne, "Blaschke zero with |a| = " + std::to_string(std::abs(a)));
    num = poly_multiply(num, {-a, cplx{1.0}});
    den = poly_multiply(den, {cplx{1.0}, -std::conj(a)});
  }
  return AnalyticDisc::scalar(std::move(num), std::move(den));
}

/// zeta * (e^{i theta} zeta + a) / (1 + conj(a) e^{i theta} zeta): f(0) = 0,
/// f'(0) = a and |f''(0)| = 2(1 - |a|^2).
inline AnalyticDisc schwarz_equality_disc(cplx a, double theta) {
  if (!(std::abs(a) < 1.0))
    detail::fail(Errc::ModulusNotLessThanOne, "|a| = " + std::to_string(std::abs(a)));
  const cplx rot = unit(theta);
  return AnalyticDisc::scalar({cplx{0.0}, a, rot}, {cplx{1.0}, std::conj(a) * rot});
}

/// f_lambda(zeta) = f(lambda zeta), 0 < lambda <= 1.
inline AnalyticDisc reparametrize(const AnalyticDisc& f, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    detail::fail(Errc::BadLambda, "lambda must lie in (0, 1], got " + std::to_string(lambda));
  std::vector<RationalComponent> comps = f.components();
  for (auto& rc : comps) {
    double s = 1.0;
    for (auto& z : rc.num) { z *= s; s *= lambda; }
    s = 1.0;
    for (auto& z : rc.den) { z *= s; s *= lambda; }
  }
  return AnalyticDisc(std::move(comps));
}

/// Rotated disc zeta -> f(e^{i alpha} zeta).
inline AnalyticDisc rotate(const AnalyticDisc& f, double alpha) {
  std::vector<RationalComponent> comps = f.components();
  for (auto& rc : comps) {
    for (std::size_t j = 0; j < rc.num.size(); ++j) rc.num[j] *= unit(alpha * static_cast<double>(j));
    for (std::size_t j = 0; j < rc.den.size(); ++j) rc.den[j] *= unit(alpha * static_cast<double>(j));
  }
  return AnalyticDisc(std::move(comps));
}

/// Slack 2(1 - |f'(0)|^2) - |f''(0)| of the second-order Schwarz inequality
/// for a centered scalar self-map of the disc.
inline double schwarz_bound_check(const AnalyticDisc& f, std::size_t N = default_grid) {
  detail::require(f.dim() == 1, Errc::InvalidInput, "schwarz_bound_check needs a scalar disc");
  const auto trace = boundary_trace(f, N);
  for (std::size_t m = 0; m < N; ++m)
    if (std::abs(trace(m)) > 1.0 + 1e-10)
      detail::fail(Errc::NotSelfMap, "|f| = " + std::to_string(std::abs(trace(m))) + " on the boundary");
  const auto a = f.taylor(2);
  if (std::abs(a[0](0)) > 1e-12) detail::fail(Errc::NotCentered, "f(0) != 0");
  const double d1 = std::abs(a[1](0));
  const double d2 = 2.0 * std::abs(a[2](0));
  return 2.0 * (1.0 - d1 * d1) - d2;
}

}  // namespace kjet
