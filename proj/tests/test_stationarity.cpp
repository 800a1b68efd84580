#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kjet/kjet.hpp"
#include "kjet/suites.hpp"

using namespace kjet;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no kjet::Error thrown";
  return Errc::InvalidInput;
}

CVec vec(std::initializer_list<cplx> xs) {
  CVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const auto& x : xs) v(i++) = x;
  return v;
}

// For f = prod (zeta - a)/(1 - conj(a) zeta) on the circle,
// zeta^k conj(f) prod |1 - conj(a) zeta|^2 = prod (1 - conj(a) zeta)^2, and
// log|1 - conj(a) zeta|^2 has mean zero, so c = prod |1 - conj(a) zeta|^2.
double blaschke_weight(const std::vector<cplx>& a, double theta) {
  double c = 1.0;
  for (const auto& aj : a) c *= std::norm(1.0 - std::conj(aj) * unit(theta));
  return c;
}

cplx blaschke_lift(const std::vector<cplx>& a, cplx z) {
  cplx v = 1.0;
  for (const auto& aj : a) v *= (1.0 - std::conj(aj) * z) * (1.0 - std::conj(aj) * z);
  return v;
}

// Negative-mode residual of zeta^k * scale * c * d rho(f), computed here
// from the certificate's weight rather than by the library's fit.
double residual_for(const Domain& omega, const AnalyticDisc& f, const CircleFunction& c, std::size_t k, double scale) {
  const std::size_t N = c.size();
  const auto tr = boundary_trace(f, N);
  CircleFunction w(N, f.dim());
  for (std::size_t m = 0; m < N; ++m) {
    const CVec g = omega.drho(tr.point(m));
    const cplx zk = unit(static_cast<double>(k) * grid_angle(m, N));
    for (std::size_t i = 0; i < f.dim(); ++i) w(m, i) = zk * scale * c(m).real() * g(static_cast<Eigen::Index>(i));
  }
  return negative_tail_residual(w);
}

void expect_certificate_invariants(const Domain& omega, const AnalyticDisc& f, const StationarityCertificate& cert) {
  const std::size_t N = cert.c.size();
  double mean_log = 0.0;
  for (std::size_t m = 0; m < N; ++m) {
    ASSERT_GT(cert.c(m).real(), 0.0);
    EXPECT_EQ(cert.c(m).imag(), 0.0);
    mean_log += std::log(cert.c(m).real()) / static_cast<double>(N);
  }
  EXPECT_NEAR(mean_log, 0.0, 1e-12);
  EXPECT_LE(cert.residual, cert.tolerance);
  // lift trace against zeta^k c d rho(f), relative mean-square
  const auto tr = boundary_trace(f, N);
  const auto lt = boundary_trace(cert.lift, N);
  double err = 0.0, norm = 0.0;
  for (std::size_t m = 0; m < N; ++m) {
    const CVec want = unit(static_cast<double>(cert.k) * grid_angle(m, N)) * cert.c(m).real() * omega.drho(tr.point(m));
    err += (lt.point(m) - want).squaredNorm();
    norm += want.squaredNorm();
  }
  EXPECT_LE(std::sqrt(err / norm), std::max(cert.residual, 1e-13) * 1.0001);
}

}  // namespace

TEST(ScalarExact, MonomialsHaveUnitWeight) {
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto f = blaschke_product(std::vector<cplx>(k, 0.0));
    const auto cert = scalar_stationarity_exact(f, k);
    EXPECT_LE(cert.residual, 1e-12);
    EXPECT_EQ(*cert.winding, 0);
    for (std::size_t m = 0; m < cert.c.size(); ++m) EXPECT_NEAR(cert.c(m).real(), 1.0, 1e-12);
    const auto lift = cert.lift.taylor(3);
    EXPECT_NEAR(std::abs(lift[0](0) - 1.0), 0.0, 1e-12);
    for (std::size_t j = 1; j <= 3; ++j) EXPECT_NEAR(std::abs(lift[j](0)), 0.0, 1e-12);
    expect_certificate_invariants(make_unit_disc(), f, cert);
  }
}

TEST(ScalarExact, WindingObstruction) {
  try {
    scalar_stationarity_exact(AnalyticDisc::scalar({0.0, 0.0, 1.0}), 1);
    FAIL() << "expected NonzeroWinding";
  } catch (const NonzeroWinding& e) {
    EXPECT_EQ(e.winding(), -1);
    EXPECT_EQ(e.code(), Errc::NonzeroWinding);
  }
  try {
    scalar_stationarity_exact(blaschke_product({0.2, -0.3}), 4);
    FAIL() << "expected NonzeroWinding";
  } catch (const NonzeroWinding& e) {
    EXPECT_EQ(e.winding(), 2);
  }
}

TEST(ScalarExact, NotOnBoundary) {
  EXPECT_EQ(code_of([] { scalar_stationarity_exact(AnalyticDisc::scalar({0.0, 0.5}), 1); }), Errc::NotOnBoundary);
}

TEST(ScalarExact, BlaschkeWeightAndLiftMatchOracle) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 1 + trial % 4;
    const auto a = random_blaschke_zeros(rng, k);
    const auto f = blaschke_product(a);
    const auto cert = scalar_stationarity_exact(f, k);
    for (std::size_t m = 0; m < cert.c.size(); ++m)
      ASSERT_NEAR(cert.c(m).real(), blaschke_weight(a, grid_angle(m, cert.c.size())), 1e-10);
    for (double r : {0.0, 0.5, 0.9})
      EXPECT_NEAR(std::abs(cert.lift.value(r * unit(1.3))(0) - blaschke_lift(a, r * unit(1.3))), 0.0, 1e-10);
    expect_certificate_invariants(make_unit_disc(), f, cert);
  }
}

TEST(Search, AgreesWithScalarConstruction) {
  const auto r = blaschke_stationarity_suite(52, 50);
  EXPECT_TRUE(r.passed()) << "worst gap " << r.worst;
  EXPECT_EQ(r.cases, 50);
}

TEST(Search, BallLinearDisc) {
  const Domain ball = make_ball(2);
  const auto f = AnalyticDisc::polynomial({CVec::Zero(2), vec({1.0, 0.0})});
  const auto cert = stationarity_search(ball, f, 1);
  EXPECT_LE(cert.residual, 1e-8);
  for (std::size_t m = 0; m < cert.c.size(); ++m) EXPECT_NEAR(cert.c(m).real(), 1.0, 1e-10);
  expect_certificate_invariants(ball, f, cert);
}

TEST(Search, Preconditions) {
  const Domain ball = make_ball(2);
  const auto inside = AnalyticDisc::polynomial({CVec::Zero(2), vec({0.5, 0.0}), vec({0.0, 0.25})});
  EXPECT_EQ(code_of([&] { stationarity_search(ball, inside, 1); }), Errc::NotOnBoundary);

  // (|z|^2 - 1)^3 defines the disc but its gradient vanishes on the circle
  auto rho = [](const CVec& z) { return std::pow(std::norm(z(0)) - 1.0, 3); };
  auto drho = [](const CVec& z) { return CVec(CVec::Constant(1, 3.0 * std::pow(std::norm(z(0)) - 1.0, 2) * std::conj(z(0)))); };
  const Domain flat(1, rho, drho, {true, false, false}, 1.0, CVec::Zero(1));
  EXPECT_EQ(code_of([&] { stationarity_search(flat, AnalyticDisc::scalar({0.0, 1.0}), 1); }), Errc::VanishingGradient);
}

TEST(Search, RotationalCovariance) {
  const Domain disc = make_unit_disc();
  const std::size_t N = default_grid;
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const auto f = blaschke_product(random_blaschke_zeros(rng, k));
    const std::size_t shift = 37 * (trial + 1);
    const auto g = rotate(f, grid_angle(shift, N));
    const auto cf = stationarity_search(disc, f, k);
    const auto cg = stationarity_search(disc, g, k);
    EXPECT_NEAR(cf.residual, cg.residual, 1e-10);
    const auto ef = scalar_stationarity_exact(f, k);
    const auto eg = scalar_stationarity_exact(g, k);
    EXPECT_NEAR(ef.residual, eg.residual, 1e-13);
    for (std::size_t m = 0; m < N; ++m) ASSERT_NEAR(eg.c(m).real(), ef.c((m + shift) % N).real(), 1e-10);
  }
}

TEST(Search, GaugeInvariance) {
  const Domain disc = make_unit_disc();
  std::mt19937_64 rng(54);
  const auto f = blaschke_product(random_blaschke_zeros(rng, 3));
  const auto cert = scalar_stationarity_exact(f, 3);
  const double base = residual_for(disc, f, cert.c, 3, 1.0);
  EXPECT_NEAR(base, cert.residual, 1e-14);
  for (double t : {1e-3, 0.5, 7.0, 1e4}) EXPECT_NEAR(residual_for(disc, f, cert.c, 3, t), base, 1e-14);
}

TEST(Pairing, Examples) {
  const auto one = AnalyticDisc::scalar({1.0});
  EXPECT_NEAR(pairing_sum(AnalyticDisc::scalar({0.0, 1.0}), one, 0.9, 1), 1.0, 1e-15);
  for (double lambda : {0.0, 0.5, 0.9})
    EXPECT_NEAR(pairing_sum(AnalyticDisc::scalar({0.0, 0.0, 1.0}), one, lambda, 2), 1.0 + lambda, 1e-15);
  EXPECT_NEAR(pairing_sum(AnalyticDisc::scalar({0.0, 0.0, 1.0}), one, 1.0, 2), 2.0, 1e-15);
}

TEST(Pairing, MatchesBoundaryIntegralOracle) {
  // (1 - lambda) S(lambda) = mean over the circle of
  // Re <f - f(lambda .), zeta^{-k} lift> for any holomorphic lift.
  std::mt19937_64 rng(55);
  std::normal_distribution<double> G;
  const std::size_t N = 1024;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 2, k = 1 + trial % 4;
    const JetVector xi = detail::random_jet(rng, CVec::Zero(static_cast<Eigen::Index>(n)), k);
    const auto f = disc_with_jet(xi, 0.5, rng);
    std::vector<CVec> lc;
    for (std::size_t j = 0; j <= k + 2; ++j) {
      CVec c(static_cast<Eigen::Index>(n));
      for (auto& z : c) z = cplx(G(rng), G(rng));
      lc.push_back(c);
    }
    const auto lift = AnalyticDisc::polynomial(lc);
    for (double lambda : {0.3, 0.7, 0.99}) {
      const auto fl = reparametrize(f, lambda);
      double mean = 0.0;
      for (std::size_t m = 0; m < N; ++m) {
        const cplx z = unit(grid_angle(m, N));
        const CVec d = f.value(z) - fl.value(z);
        const CVec w = std::pow(z, -static_cast<int>(k)) * lift.value(z);
        mean += (d.array() * w.array()).sum().real() / static_cast<double>(N);
      }
      EXPECT_NEAR((1.0 - lambda) * pairing_sum(f, lift, lambda, k), mean, 1e-12);
    }
  }
}

TEST(Pairing, SignPropertyOnStationaryBlaschke) {
  std::mt19937_64 rng(56);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + trial % 4;
    const auto f = blaschke_product(random_blaschke_zeros(rng, k));
    const auto cert = scalar_stationarity_exact(f, k);
    for (double lambda : family_lambdas) EXPECT_GT((1.0 - lambda) * pairing_sum(f, cert.lift, lambda, k), 0.0);
    EXPECT_NE(pairing_sum(f, cert.lift, 1.0, k), 0.0);
  }
}

TEST(Probe, MonomialsAreLocallyExtremal) {
  const Domain disc = make_unit_disc();
  for (std::size_t k = 1; k <= 3; ++k) {
    const auto rep = local_extremality_probe(disc, blaschke_product(std::vector<cplx>(k, 0.0)), k);
    EXPECT_TRUE(rep.passed) << "k=" << k;
    EXPECT_LE(rep.best_mu, 1.0 + 1e-3);
    EXPECT_GT(rep.best_mu, 0.9);
    for (const auto& [lambda, v] : rep.family) EXPECT_GT(v, 0.0) << lambda;
    EXPECT_NE(rep.s_at_one, 0.0);
  }
}

TEST(Probe, Errors) {
  const auto f = AnalyticDisc::scalar({0.0, 0.0, 1.0});
  EXPECT_EQ(code_of([&] { local_extremality_probe(make_unit_disc(), f, 1); }), Errc::NotCertifiedStationary);
  const Domain weak = make_complex_ellipsoid({2});
  EXPECT_EQ(code_of([&] { local_extremality_probe(weak, AnalyticDisc::scalar({0.0, 1.0}), 1); }), Errc::InvalidInput);
}

TEST(EulerLagrange, DiscWitnesses) {
  const Domain disc = make_unit_disc();
  const auto r1 = kobayashi_k_metric(disc, scalar_jet(0.0, {1.0}));
  const auto e1 = euler_lagrange_check(disc, r1, 1);
  EXPECT_TRUE(e1.passed) << e1.properness << " " << e1.residual;
  EXPECT_GT(e1.properness, 0.99);

  // the equality disc has Taylor coefficients decaying like 0.707^j, which a
  // degree-12 tail truncates at the percent level
  SolverConfig fine;
  fine.degree = 48;
  fine.grid = 512;
  fine.bisection_tol = 1e-6;
  const auto r2 = kobayashi_k_metric(disc, scalar_jet(0.0, {1.0, 2.0}), fine);
  const auto e2 = euler_lagrange_check(disc, r2, 2);
  EXPECT_TRUE(e2.passed) << e2.properness << " " << e2.residual;
}

TEST(Poletsky, ConstantDisc) {
  const CVec p = vec({cplx(0.2, -0.1), cplx(0.0, 0.3)});
  const auto f = AnalyticDisc::polynomial({p});
  const JetVector xi(CVec::Zero(2), {vec({1.0, 0.0}), vec({0.0, 1.0})});
  const auto rep = poletsky_functionals(f, xi);
  for (const auto& e : rep.entries) {
    if (e.name == "phi1_0") EXPECT_NEAR(e.value, p(static_cast<Eigen::Index>(e.index)).real(), 1e-15);
    else if (e.name == "phi2_0") EXPECT_NEAR(e.value, p(static_cast<Eigen::Index>(e.index)).imag(), 1e-15);
    else EXPECT_NEAR(e.value, 0.0, 1e-15) << e.name;
  }
  EXPECT_FALSE(rep.functional_verdict);
  EXPECT_FALSE(rep.direct_verdict);
}

TEST(Poletsky, ExactJetAtSevenTenths) {
  std::mt19937_64 rng(57);
  const JetVector xi = detail::random_jet(rng, vec({0.1, cplx(0.0, -0.2)}), 2);
  const auto f = disc_with_jet(xi, 0.7, rng);
  const auto rep = poletsky_functionals(f, xi);
  EXPECT_EQ(rep.j0, 1u);
  for (const auto& e : rep.entries) {
    if (e.name == "phi1_j0") EXPECT_NEAR(e.value, 0.7, 1e-12);
    if (e.order > 0 && e.name != "phi1_j0") EXPECT_NEAR(e.value, 0.0, 1e-12) << e.name;
    if (e.order == 0) EXPECT_NEAR(e.value, e.target, 1e-12) << e.name;
  }
  EXPECT_TRUE(rep.functional_verdict);
  EXPECT_TRUE(rep.direct_verdict);
  EXPECT_NEAR(rep.mu, 0.7, 1e-12);

  const auto trace_rep = poletsky_functionals(boundary_trace(f, 512), xi);
  EXPECT_TRUE(trace_rep.functional_verdict);
}

TEST(Poletsky, ComplexScaleViolatesImaginaryFunctionals) {
  std::mt19937_64 rng(58);
  const JetVector xi = detail::random_jet(rng, CVec::Zero(1), 2);
  const auto f = disc_with_jet(xi, std::polar(0.7, 0.4), rng);
  const auto rep = poletsky_functionals(f, xi);
  double worst = 0.0;
  for (const auto& e : rep.entries)
    if (e.name.rfind("phi2", 0) == 0) worst = std::max(worst, std::abs(e.value));
  EXPECT_GT(worst, 1e-3);
  EXPECT_FALSE(rep.functional_verdict);
  EXPECT_FALSE(rep.direct_verdict);
}

TEST(Poletsky, VerdictsAgree) {
  const auto r = poletsky_suite(59, 100);
  EXPECT_TRUE(r.passed()) << r.failures << " disagreements";
}
