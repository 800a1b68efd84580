#pragma once

// Randomized verification suites shared by the command-line `verify`
// command. Each returns a SuiteResult with the worst observed deviation.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kjet/circle.hpp"
#include "kjet/disc.hpp"
#include "kjet/domain.hpp"
#include "kjet/jets.hpp"
#include "kjet/kobayashi.hpp"
#include "kjet/stationarity.hpp"

namespace kjet {

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed() const { return failures == 0; }
};

inline std::vector<cplx> random_blaschke_zeros(std::mt19937_64& rng, std::size_t count, double max_modulus = 0.8) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<cplx> z;
  for (std::size_t j = 0; j < count; ++j) z.push_back(std::polar(max_modulus * std::sqrt(U(rng)), two_pi * U(rng)));
  return z;
}

/// Disc p + sum_{j<=k} mu^j xi_j / j! zeta^j + zeta^{k+1} q_i(zeta) / (1 - b_i zeta)
/// per component, so that its k-jet at 0 is exactly mu . xi.
inline AnalyticDisc disc_with_jet(const JetVector& xi, cplx mu, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const std::size_t k = xi.order();
  std::vector<RationalComponent> comps;
  for (std::size_t i = 0; i < xi.dim(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    Poly jet(k + 1);
    jet[0] = xi.point(ii);
    cplx power = 1.0;
    for (std::size_t j = 1; j <= k; ++j) {
      power *= mu;
      jet[j] = power * xi[j](ii) / factorial(j);
    }
    const cplx b = 0.6 * cplx(U(rng), U(rng)) / std::sqrt(2.0);
    const Poly den{1.0, -b};
    Poly num = poly_multiply(jet, den);
    num.resize(k + 3, 0.0);
    num[k + 1] += cplx(U(rng), U(rng));
    num[k + 2] += cplx(U(rng), U(rng));
    comps.push_back({std::move(num), den});
  }
  return AnalyticDisc(std::move(comps));
}

/// Fourier round trip, negative-mode cancellation by real_completion and
/// winding of zeta^m, m = -8..8, at N = 512.
inline SuiteResult circle_suite(unsigned long long seed, int samples = 20) {
  SuiteResult r{"circle", 0, 0, 0.0, 1e-12};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> G;
  const std::size_t N = default_grid;
  for (int s = 0; s < samples; ++s) {
    const auto u = CircleFunction::sample(N, 1, [&](double) { return cplx(G(rng), G(rng)); });
    const auto back = inverse_transform(fourier_transform(u));
    double err = 0.0, scale = 0.0;
    for (std::size_t m = 0; m < N; ++m) {
      err = std::max(err, std::abs(back(m) - u(m)));
      scale = std::max(scale, std::abs(u(m)));
    }
    const double round_trip = err / scale;
    const auto h = real_completion(u);
    CircleFunction w(N, 1);
    for (std::size_t m = 0; m < N; ++m) w(m) = u(m) + h(m);
    const auto sum = fourier_transform(w);
    // only the real part of the Nyquist mode can be cancelled by a real h
    double neg = 0.0;
    for (int j = sum.min_index() + 1; j < 0; ++j) neg = std::max(neg, std::abs(sum(j)));
    neg = std::max(neg, std::abs(sum(sum.min_index()).real()));
    for (double v : {round_trip, neg}) {
      ++r.cases;
      r.worst = std::max(r.worst, v);
      if (!(v <= r.tolerance)) ++r.failures;
    }
  }
  for (int m = -8; m <= 8; ++m) {
    const auto u = CircleFunction::sample(N, 1, [&](double t) { return unit(m * t); });
    ++r.cases;
    if (winding_number(u, 1e-12) != m) ++r.failures;
  }
  return r;
}

/// |f''(0)| <= 2(1 - |f'(0)|^2) on centered self-maps zeta * B(zeta).
inline SuiteResult schwarz_suite(unsigned long long seed, int samples = 200) {
  SuiteResult r{"schwarz", 0, 0, 0.0, 1e-10};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> deg(0, 4);
  for (int s = 0; s < samples; ++s) {
    auto zeros = random_blaschke_zeros(rng, static_cast<std::size_t>(deg(rng)), 0.95);
    zeros.push_back(0.0);
    const double slack = schwarz_bound_check(blaschke_product(zeros));
    ++r.cases;
    r.worst = std::max(r.worst, -slack);
    if (!(slack >= -r.tolerance)) ++r.failures;
  }
  return r;
}

/// scalar_stationarity_exact versus stationarity_search on random Blaschke
/// products of degree k <= 4: residuals under 1e-8 and weights within 1e-6.
inline SuiteResult blaschke_stationarity_suite(unsigned long long seed, int samples = 20) {
  SuiteResult r{"blaschke_stationarity", 0, 0, 0.0, 1e-6};
  std::mt19937_64 rng(seed);
  const Domain disc = make_unit_disc();
  for (int s = 0; s < samples; ++s) {
    const std::size_t k = 1 + static_cast<std::size_t>(s % 4);
    const AnalyticDisc f = blaschke_product(random_blaschke_zeros(rng, k));
    ++r.cases;
    try {
      const auto exact = scalar_stationarity_exact(f, k);
      const auto found = stationarity_search(disc, f, k);
      double gap = 0.0;
      for (std::size_t m = 0; m < exact.c.size(); ++m) gap = std::max(gap, std::abs(exact.c(m) - found.c(m)));
      r.worst = std::max(r.worst, gap);
      if (!(gap <= r.tolerance) || exact.residual > 1e-8 || found.residual > 1e-8 || *exact.winding != 0)
        ++r.failures;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  return r;
}

/// Functional verdict versus direct jet check on random rational discs,
/// half of them built to satisfy the constraint.
inline SuiteResult poletsky_suite(unsigned long long seed, int samples = 100) {
  SuiteResult r{"poletsky", 0, 0, 0.0, 1e-8};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const std::size_t n = 1 + static_cast<std::size_t>(s % 3);
    const std::size_t k = 1 + static_cast<std::size_t>((s / 3) % 3);
    CVec p(static_cast<Eigen::Index>(n));
    for (auto& z : p) z = 0.3 * cplx(U(rng) - 0.5, U(rng) - 0.5);
    JetVector xi = detail::random_jet(rng, p, k);
    if (k > 1 && s % 5 == 0) xi.components[0].setZero();
    const int mode = s % 4;  // 0, 1: exact; 2: complex mu; 3: perturbed jet
    const cplx mu = mode == 2 ? std::polar(0.4 + 0.5 * U(rng), 0.3 + U(rng)) : cplx(0.2 + 0.8 * U(rng), 0.0);
    AnalyticDisc f = disc_with_jet(xi, mu, rng);
    if (mode == 3) {
      auto comps = f.components();
      const std::size_t j = 1 + static_cast<std::size_t>(U(rng) * k) % k;
      comps[0].num[j] += 1e-3;
      f = AnalyticDisc(std::move(comps));
    }
    const auto rep = poletsky_functionals(f, xi);
    ++r.cases;
    const bool expected = mode <= 1;
    if (rep.functional_verdict != rep.direct_verdict || rep.direct_verdict != expected) ++r.failures;
  }
  return r;
}

/// Solver versus the K^2 closed form of the disc at 0, relative error 2%.
inline SuiteResult disc_metric_suite(unsigned long long seed, int samples = 5, const SolverConfig& cfg = {}) {
  SuiteResult r{"disc_metric", 0, 0, 0.0, 2e-2};
  std::mt19937_64 rng(seed);
  const Domain disc = make_unit_disc();
  for (int s = 0; s < samples; ++s) {
    const JetVector xi = detail::random_jet(rng, CVec::Zero(1), 2);
    const double exact = k2_disc_closed_form(xi);
    ++r.cases;
    try {
      const double rel = std::abs(kobayashi_k_metric(disc, xi, cfg).value - exact) / exact;
      r.worst = std::max(r.worst, rel);
      if (!(rel <= r.tolerance)) ++r.failures;
    } catch (const Error&) {
      ++r.failures;
    }
  }
  return r;
}

}  // namespace kjet
