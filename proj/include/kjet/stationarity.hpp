#pragma once

// k-stationarity of boundary-attached discs: a positive weight c on the
// circle such that zeta^k c d rho(f) extends holomorphically. Also the
// pairing S(lambda), a local extremality probe around a stationary disc,
// an Euler-Lagrange residual for solver witnesses and the Fourier-moment
// functionals that encode the jet constraint.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kjet/circle.hpp"
#include "kjet/disc.hpp"
#include "kjet/domain.hpp"
#include "kjet/errors.hpp"
#include "kjet/extension.hpp"
#include "kjet/jets.hpp"
#include "kjet/kobayashi.hpp"

namespace kjet {

struct StationarityConfig {
  std::size_t grid = default_grid;
  std::size_t harmonics = 0;  // degree M of log c; 0 selects grid / 4
  double stat_tol = 1e-8;
  double boundary_tol = 1e-8;
  int max_iter = 100;

  std::size_t resolved_harmonics() const { return harmonics ? harmonics : grid / 4; }
};

struct StationarityCertificate {
  CircleFunction c;   // positive weight, mean(log c) = 0
  AnalyticDisc lift;  // extension of zeta^k c d rho(f)
  double residual = 0.0;
  double tolerance = 0.0;
  std::optional<int> winding;  // scalar construction only
  double boundary_defect = 0.0;
  std::size_t k = 0;
  std::size_t harmonics = 0;  // 0 for the scalar construction (all modes)
};

namespace detail {

inline CircleFunction times_zeta_power(const CircleFunction& u, std::size_t k) {
  CircleFunction out = u;
  for (std::size_t c = 0; c < u.dim(); ++c)
    for (std::size_t m = 0; m < u.size(); ++m) out(m, c) *= unit(grid_angle(m * k % u.size(), u.size()));
  return out;
}

// h(theta) = sum_m x[2m-2] cos(m theta) + x[2m-1] sin(m theta).
inline CircleFunction trig_polynomial(const Eigen::VectorXd& x, std::size_t N) {
  FourierSpectrum H(N, 1);
  const auto M = static_cast<int>(x.size() / 2);
  for (int m = 1; m <= M; ++m) {
    const cplx hm = 0.5 * cplx(x(2 * m - 2), -x(2 * m - 1));
    H(m) = hm;
    H(-m) = std::conj(hm);
  }
  CircleFunction h = inverse_transform(H);
  for (std::size_t m = 0; m < N; ++m) h(m) = h(m).real();
  return h;
}

inline CircleFunction weighted(const CircleFunction& base, const CircleFunction& h) {
  CircleFunction out = base;
  for (std::size_t m = 0; m < base.size(); ++m) {
    const double w = std::exp(h(m).real());
    for (std::size_t c = 0; c < base.dim(); ++c) out(m, c) *= w;
  }
  return out;
}

struct WeightFit {
  CircleFunction h;
  double residual = 1.0;
  int iterations = 0;
};

// Levenberg-Marquardt on the negative modes of e^h * base over the
// coefficients of a mean-zero real trigonometric polynomial h of degree M.
// Pointwise products on the grid are cyclic convolutions of spectra, so the
// Jacobian columns are shifted copies of the current spectrum.
inline WeightFit fit_weight(const CircleFunction& base, std::size_t M, int max_iter, double target) {
  const std::size_t N = base.size();
  const std::size_t n = base.dim();
  detail::require(M >= 1 && M < N / 2, Errc::InvalidInput, "harmonic degree must lie in [1, N/2)");
  const auto P = static_cast<Eigen::Index>(2 * M);
  const auto half = static_cast<int>(N / 2);
  const auto R = static_cast<Eigen::Index>(n * N);  // n components, N/2 modes, re + im

  auto shifted = [&](const FourierSpectrum& s, int j, std::size_t c) {
    int i = (j % static_cast<int>(N) + static_cast<int>(N)) % static_cast<int>(N);
    if (i >= half) i -= static_cast<int>(N);
    return s(i, c);
  };
  auto residual_vector = [&](const FourierSpectrum& s) {
    Eigen::VectorXd r(R);
    Eigen::Index at = 0;
    for (std::size_t c = 0; c < n; ++c)
      for (int j = -half; j < 0; ++j) {
        r(at++) = s(j, c).real();
        r(at++) = s(j, c).imag();
      }
    return r;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(P);
  WeightFit fit;
  fit.h = trig_polynomial(x, N);
  FourierSpectrum F = fourier_transform(weighted(base, fit.h));
  Eigen::VectorXd r = residual_vector(F);
  double cost = r.squaredNorm();
  fit.residual = negative_tail_residual(F);
  double damping = 1e-6;

  for (; fit.iterations < max_iter && fit.residual > target; ++fit.iterations) {
    Eigen::MatrixXd J(R, P);
    for (Eigen::Index p = 0; p < P; ++p) {
      const int m = static_cast<int>(p / 2) + 1;
      const bool is_cos = p % 2 == 0;
      Eigen::Index at = 0;
      for (std::size_t c = 0; c < n; ++c)
        for (int j = -half; j < 0; ++j) {
          const cplx lo = shifted(F, j - m, c), hi = shifted(F, j + m, c);
          const cplx d = is_cos ? 0.5 * (lo + hi) : (lo - hi) / cplx(0.0, 2.0);
          J(at++, p) = d.real();
          J(at++, p) = d.imag();
        }
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jtr = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += damping * (JtJ.diagonal().array() + 1e-14);
      const Eigen::VectorXd trial = x - A.ldlt().solve(Jtr);
      const CircleFunction th = trig_polynomial(trial, N);
      const FourierSpectrum TF = fourier_transform(weighted(base, th));
      const Eigen::VectorXd tr = residual_vector(TF);
      if (tr.allFinite() && tr.squaredNorm() < cost) {
        x = trial;
        fit.h = th;
        F = TF;
        r = tr;
        cost = r.squaredNorm();
        fit.residual = negative_tail_residual(F);
        damping = std::max(damping / 10.0, 1e-12);
        improved = true;
        break;
      }
      damping *= 10.0;
    }
    if (!improved) break;
  }
  return fit;
}

inline StationarityCertificate certify(const CircleFunction& base, const CircleFunction& h, std::size_t k,
                                       double tol, double defect, std::size_t harmonics) {
  StationarityCertificate cert;
  cert.c = h;
  for (std::size_t m = 0; m < h.size(); ++m) cert.c(m) = std::exp(h(m).real());
  const FourierSpectrum F = fourier_transform(weighted(base, h));
  cert.residual = negative_tail_residual(F);
  cert.tolerance = tol;
  if (cert.residual > tol) throw ResidualAboveTolerance(cert.residual, tol);
  cert.lift = holomorphic_extension(F, tol);
  cert.boundary_defect = defect;
  cert.k = k;
  cert.harmonics = harmonics;
  return cert;
}

}  // namespace detail

/// Weight for a scalar disc with |f| = 1 on the circle and rho = |z|^2 - 1:
/// a continuous logarithm g of zeta^k conj(f) exists iff its winding is 0,
/// and then c = exp(h) with h the real completion of g.
inline StationarityCertificate scalar_stationarity_exact(const AnalyticDisc& f, std::size_t k,
                                                         std::size_t N = default_grid) {
  detail::require(f.dim() == 1, Errc::InvalidInput, "scalar disc expected");
  detail::require(k >= 1, Errc::InvalidInput, "order must be >= 1");
  const CircleFunction trace = boundary_trace(f, N);
  double defect = 0.0;
  for (std::size_t m = 0; m < N; ++m) defect = std::max(defect, std::abs(std::norm(trace(m)) - 1.0));
  if (defect > 1e-10)
    detail::fail(Errc::NotOnBoundary, "|f| deviates from 1 by " + std::to_string(defect) + " on the circle");

  const CircleFunction u = detail::times_zeta_power(conj(trace), k);
  const int w = winding_number(u, 1e-12);
  if (w != 0) throw NonzeroWinding(w);

  CircleFunction g(N, 1);
  double phase = std::arg(u(0));
  for (std::size_t m = 0; m < N; ++m) {
    if (m > 0) phase += std::arg(u(m) / u(m - 1));
    g(m) = cplx(std::log(std::abs(u(m))), phase);
  }
  const CircleFunction h = real_completion(g);
  auto cert = detail::certify(u, h, k, 1e-10, defect, 0);
  cert.winding = w;
  return cert;
}

/// Searches c = exp(h), h a real trigonometric polynomial of degree M with
/// mean zero, minimizing the negative-mode residual of zeta^k c d rho(f).
/// Success certifies stationarity; failure is a report, not a refutation.
inline StationarityCertificate stationarity_search(const Domain& omega, const AnalyticDisc& f, std::size_t k,
                                                   const StationarityConfig& cfg = {}) {
  detail::require(f.dim() == omega.dim(), Errc::InvalidInput, "disc and domain dimensions differ");
  detail::require(k >= 1, Errc::InvalidInput, "order must be >= 1");
  const std::size_t N = cfg.grid;
  const CircleFunction trace = boundary_trace(f, N);
  double defect = 0.0;
  for (std::size_t m = 0; m < N; ++m) defect = std::max(defect, std::abs(omega.rho(trace.point(m))));
  if (defect > cfg.boundary_tol)
    detail::fail(Errc::NotOnBoundary, "max |rho(f)| = " + std::to_string(defect) + " on the circle");

  CircleFunction grad(N, f.dim());
  for (std::size_t m = 0; m < N; ++m) {
    const CVec g = omega.drho(trace.point(m));
    if (g.norm() < 1e-12)
      detail::fail(Errc::VanishingGradient, "d rho(f) vanishes at node " + std::to_string(m));
    for (std::size_t c = 0; c < f.dim(); ++c) grad(m, c) = g(static_cast<Eigen::Index>(c));
  }
  const CircleFunction base = detail::times_zeta_power(grad, k);
  const std::size_t M = cfg.resolved_harmonics();
  const auto fit = detail::fit_weight(base, M, cfg.max_iter, 1e-4 * cfg.stat_tol);
  return detail::certify(base, fit.h, k, cfg.stat_tol, defect, M);
}

/// S(lambda) = Re sum_j (1 + ... + lambda^{j-1}) / (j! (k-j)!) <f^(j)(0), lift^(k-j)(0)>
/// with the bilinear pairing <v, w> = sum v_i w_i.
inline double pairing_sum(const AnalyticDisc& f, const AnalyticDisc& lift, double lambda, std::size_t k) {
  detail::require(f.dim() == lift.dim(), Errc::InvalidInput, "disc and lift dimensions differ");
  detail::require(k >= 1, Errc::InvalidInput, "order must be >= 1");
  const auto a = f.taylor(k);
  const auto b = lift.taylor(k);
  cplx s = 0.0;
  double geometric = 0.0, power = 1.0;
  for (std::size_t j = 1; j <= k; ++j) {
    geometric += power;
    power *= lambda;
    // f^(j)(0) / j! = a_j and lift^(k-j)(0) / (k-j)! = b_{k-j}
    s += geometric * (a[j].array() * b[k - j].array()).sum();
  }
  return s.real();
}

struct ProbeConfig {
  SolverConfig solver{};
  StationarityConfig stationarity{};
  double perturbation_radius = 0.1;
  double extremality_tol = 1e-3;
  double mu_max = 1.5;
  double mu_tol = 1e-4;  // relative width of the competitor bracket
};

struct ExtremalityReport {
  StationarityCertificate certificate;
  double best_mu = 0.0;            // largest feasible competitor scale found
  double mu_upper = 0.0;           // smallest infeasible scale probed
  AnalyticDisc competitor;
  double min_convexity_pairing = 0.0;  // min over the circle of Re <f - g, d rho(f)>
  double competitor_sign = 0.0;    // (1 - mu) S(mu)
  std::vector<std::pair<double, double>> family;  // (lambda, (1 - lambda) S(lambda))
  double s_at_one = 0.0;
  bool passed = false;
};

/// Raised when a competitor beats the stationary disc by more than the
/// configured tolerance; carries the full witness.
class ProbeFailed : public Error {
 public:
  explicit ProbeFailed(ExtremalityReport report)
      : Error(Errc::ProbeFailed, "competitor with mu = " + std::to_string(report.best_mu) + " > 1"),
        report_(std::move(report)) {}

  const ExtremalityReport& report() const noexcept { return report_; }

 private:
  ExtremalityReport report_;
};

inline constexpr double family_lambdas[] = {0.5, 0.7, 0.9, 0.99};

/// Competitors g with g(0) = f(0) and jet mu . J^k f, whose Taylor tail stays
/// within `perturbation_radius` of f's truncated tail. Reports the largest
/// feasible mu, the convexity pairing against the best competitor and the
/// sign of (1 - lambda) S(lambda) along g_lambda = f(lambda zeta).
inline ExtremalityReport local_extremality_probe(const Domain& omega, const AnalyticDisc& f, std::size_t k,
                                                 const ProbeConfig& cfg = {}) {
  ExtremalityReport rep;
  try {
    rep.certificate = stationarity_search(omega, f, k, cfg.stationarity);
  } catch (const ResidualAboveTolerance& e) {
    detail::fail(Errc::NotCertifiedStationary, e.what());
  }
  detail::require(omega.flags().strictly_convex, Errc::InvalidInput, "probe needs a strictly convex domain");

  const JetVector xi = jet_of_disc(f, k);
  DiscFeasibility problem(omega, xi, cfg.solver);
  const Eigen::VectorXd centre = problem.tail_of(f);
  problem.confine(centre, cfg.perturbation_radius);

  double lo = 0.0, hi = cfg.mu_max;
  Eigen::VectorXd best = centre;
  for (double mu = 1.0; mu > 0.05; mu -= 0.1) {
    auto res = problem.solve(mu, best);
    if (res.feasible) {
      lo = mu;
      best = std::move(res.tail);
      break;
    }
    hi = mu;
  }
  if (lo > 0.0) {
    while (hi - lo > cfg.mu_tol * hi) {
      const double mid = 0.5 * (lo + hi);
      auto res = problem.solve(mid, best);
      if (res.feasible) {
        lo = mid;
        best = std::move(res.tail);
      } else {
        hi = mid;
      }
    }
  }
  rep.best_mu = lo;
  rep.mu_upper = hi;
  if (lo > 0.0) {
    rep.competitor = problem.disc(lo, best);
    const std::size_t N = cfg.stationarity.grid;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < N; ++m) {
      const cplx z = unit(grid_angle(m, N));
      const CVec fz = f.value(z);
      worst = std::min(worst, ((fz - rep.competitor.value(z)).array() * omega.drho(fz).array()).sum().real());
    }
    rep.min_convexity_pairing = worst;
    rep.competitor_sign = (1.0 - lo) * pairing_sum(f, rep.certificate.lift, lo, k);
  }
  bool family_ok = true;
  for (double lambda : family_lambdas) {
    const double v = (1.0 - lambda) * pairing_sum(f, rep.certificate.lift, lambda, k);
    rep.family.emplace_back(lambda, v);
    family_ok = family_ok && v > 0.0;
  }
  rep.s_at_one = pairing_sum(f, rep.certificate.lift, 1.0, k);
  rep.passed = rep.best_mu <= 1.0 + cfg.extremality_tol && family_ok && rep.s_at_one != 0.0;
  if (rep.best_mu > 1.0 + cfg.extremality_tol) throw ProbeFailed(std::move(rep));
  return rep;
}

struct EulerLagrangeConfig {
  std::size_t grid = default_grid;
  std::size_t harmonics = 0;
  double properness_tol = 5e-2;
  double properness_fraction = 0.95;
  double el_tol = 1e-2;
  int max_iter = 100;
};

struct EulerLagrangeReport {
  double properness = 0.0;  // fraction of nodes with rho(f) > -properness_tol
  double residual = 1.0;
  double max_rho = 0.0;
  double min_rho = 0.0;
  CircleFunction c;
  bool passed = false;
};

/// Near-properness and stationarity residual of a solver witness. The
/// weight is fitted without the on-boundary precondition: the witness is
/// only approximately boundary-attached.
inline EulerLagrangeReport euler_lagrange_check(const Domain& omega, const MetricResult& result, std::size_t k,
                                                const EulerLagrangeConfig& cfg = {}) {
  EulerLagrangeReport rep;
  const AnalyticDisc& f = result.extremal;
  const std::size_t N = cfg.grid;
  const CircleFunction trace = boundary_trace(f, N);
  CircleFunction grad(N, f.dim());
  std::size_t proper = 0;
  rep.max_rho = -std::numeric_limits<double>::infinity();
  rep.min_rho = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < N; ++m) {
    const CVec z = trace.point(m);
    const double r = omega.rho(z);
    rep.max_rho = std::max(rep.max_rho, r);
    rep.min_rho = std::min(rep.min_rho, r);
    if (r > -cfg.properness_tol) ++proper;
    const CVec g = omega.drho(z);
    for (std::size_t c = 0; c < f.dim(); ++c) grad(m, c) = g(static_cast<Eigen::Index>(c));
  }
  rep.properness = static_cast<double>(proper) / static_cast<double>(N);
  const std::size_t M = cfg.harmonics ? cfg.harmonics : N / 4;
  const auto fit = detail::fit_weight(detail::times_zeta_power(grad, k), M, cfg.max_iter, 1e-2 * cfg.el_tol);
  rep.residual = fit.residual;
  rep.c = fit.h;
  for (std::size_t m = 0; m < N; ++m) rep.c(m) = std::exp(fit.h(m).real());
  rep.passed = rep.properness >= cfg.properness_fraction && rep.residual <= cfg.el_tol;
  return rep;
}

struct PoletskyEntry {
  std::string name;  // phi1_0, phi2_0, phi1_ml, phi2_ml, phi1_j0, phi2_j0, phi1_m, phi2_m, zero1_m, zero2_m
  std::size_t order = 0;
  std::size_t index = 0;  // component h or complement vector l
  double value = 0.0;
  double target = 0.0;
};

struct PoletskyReport {
  std::vector<PoletskyEntry> entries;
  std::size_t j0 = 0;
  double tolerance = 1e-8;
  bool functional_verdict = false;  // all constraints hold
  bool direct_verdict = false;      // f(0) = p and J^k f = mu . xi, mu > 0
  double mu = 0.0;                  // recovered from the direct check
};

namespace detail {

// Vectors eta with sum_i xi_i eta_i = 0: an orthonormal basis of the
// Hermitian complement of conj(xi), seeded from the standard basis.
inline std::vector<CVec> bilinear_complement(const CVec& xi) {
  const auto n = xi.size();
  std::vector<CVec> basis{xi.conjugate().normalized()};
  for (Eigen::Index e = 0; e < n && static_cast<Eigen::Index>(basis.size()) < n + 1; ++e) {
    CVec v = CVec::Zero(n);
    v(e) = 1.0;
    for (const auto& b : basis) v -= b.dot(v) * b;
    if (v.norm() > 1e-8) basis.push_back(v.normalized());
  }
  return {basis.begin() + 1, basis.end()};
}

inline PoletskyReport poletsky_from_moments(const std::vector<CVec>& moments, const JetVector& xi,
                                            const std::vector<CVec>& taylor) {
  if (xi.is_zero()) fail(Errc::ZeroJet, "Poletsky functionals need a nonzero jet");
  const std::size_t k = xi.order();
  const auto n = static_cast<std::size_t>(xi.dim());
  PoletskyReport rep;
  rep.j0 = first_nonzero_index(xi);
  const double tol = rep.tolerance;

  for (std::size_t h = 0; h < n; ++h) {
    const auto hh = static_cast<Eigen::Index>(h);
    rep.entries.push_back({"phi1_0", 0, h, moments[0](hh).real(), xi.point(hh).real()});
    rep.entries.push_back({"phi2_0", 0, h, moments[0](hh).imag(), xi.point(hh).imag()});
  }
  const std::size_t j0 = rep.j0;
  const double phi_j0 = factorial(j0) / xi[j0].squaredNorm() * moments[j0].dot(xi[j0]).real();
  for (std::size_t m = 1; m <= k; ++m) {
    const CVec& c = moments[m];
    if (xi[m].squaredNorm() == 0.0) {
      for (std::size_t h = 0; h < n; ++h) {
        const auto hh = static_cast<Eigen::Index>(h);
        rep.entries.push_back({"zero1_m", m, h, c(hh).real(), 0.0});
        rep.entries.push_back({"zero2_m", m, h, c(hh).imag(), 0.0});
      }
      continue;
    }
    // <c, conj(xi_m)> in the bilinear pairing is the Hermitian product xi_m^* c.
    const cplx along = xi[m].dot(c);
    const auto eta = bilinear_complement(xi[m]);
    for (std::size_t l = 0; l < eta.size(); ++l) {
      const cplx v = (c.array() * eta[l].array()).sum();
      rep.entries.push_back({"phi1_ml", m, l + 1, v.real(), 0.0});
      rep.entries.push_back({"phi2_ml", m, l + 1, v.imag(), 0.0});
    }
    if (m == j0) {
      rep.entries.push_back({"phi1_j0", m, 0, phi_j0, phi_j0});
      rep.entries.push_back({"phi2_j0", m, 0, along.imag(), 0.0});
    } else {
      const double scaled = factorial(m) / xi[m].squaredNorm() * along.real();
      const double power = std::pow(phi_j0, static_cast<double>(m) / static_cast<double>(j0));
      rep.entries.push_back({"phi1_m", m, 0, scaled - power, 0.0});
      rep.entries.push_back({"phi2_m", m, 0, along.imag(), 0.0});
    }
  }
  bool ok = phi_j0 > tol;
  for (const auto& e : rep.entries) ok = ok && std::abs(e.value - e.target) <= tol;
  rep.functional_verdict = ok;

  // Direct check on the jet: f(0) = p and f^(j)(0) = mu^j xi_j for one mu > 0.
  bool direct = (taylor[0] - xi.point).norm() <= tol;
  const cplx t = factorial(j0) * xi[j0].dot(taylor[j0]) / xi[j0].squaredNorm();
  direct = direct && std::abs(t.imag()) <= tol && t.real() > tol;
  const double mu = t.real() > 0.0 ? std::pow(t.real(), 1.0 / static_cast<double>(j0)) : 0.0;
  for (std::size_t j = 1; j <= k && direct; ++j) {
    const CVec diff = taylor[j] * factorial(j) - std::pow(mu, static_cast<double>(j)) * xi[j];
    direct = diff.norm() <= tol * std::max(1.0, xi[j].norm());
  }
  rep.direct_verdict = direct;
  rep.mu = mu;
  return rep;
}

}  // namespace detail

/// Fourier moments c_m = (1/2 pi) int f zeta^{-m} d theta by the trapezoid
/// rule, turned into the functionals that encode f(0) = p and
/// J^k f = mu . xi with mu > 0.
inline PoletskyReport poletsky_functionals(const CircleFunction& trace, const JetVector& xi) {
  detail::require(trace.dim() == xi.dim(), Errc::InvalidInput, "trace and jet dimensions differ");
  detail::require(xi.order() < trace.size() / 2, Errc::InvalidInput, "grid too coarse for the jet order");
  const FourierSpectrum s = fourier_transform(trace);
  std::vector<CVec> moments, taylor;
  for (std::size_t m = 0; m <= xi.order(); ++m) {
    moments.push_back(s.coefficient(static_cast<int>(m)));
    taylor.push_back(moments.back());
  }
  return detail::poletsky_from_moments(moments, xi, taylor);
}

inline PoletskyReport poletsky_functionals(const AnalyticDisc& f, const JetVector& xi,
                                           std::size_t N = default_grid) {
  detail::require(f.dim() == xi.dim(), Errc::InvalidInput, "disc and jet dimensions differ");
  const FourierSpectrum s = fourier_transform(boundary_trace(f, N));
  std::vector<CVec> moments;
  for (std::size_t m = 0; m <= xi.order(); ++m) moments.push_back(s.coefficient(static_cast<int>(m)));
  return detail::poletsky_from_moments(moments, xi, f.taylor(xi.order()));
}

}  // namespace kjet
