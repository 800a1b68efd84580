#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kjet/domain.hpp"
#include "kjet/kobayashi.hpp"
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

// Admissibility checked independently of the solver: rho on a grid 4x
// finer than the solver grid, and the jet constraint.
void expect_admissible(const Domain& omega, const JetVector& xi, const MetricResult& r) {
  EXPECT_NEAR(r.value * r.lambda, 1.0, 1e-12);
  const auto prof = boundary_distance_profile(omega, r.extremal, 4 * r.config.grid);
  for (std::size_t m = 0; m < prof.size(); ++m) ASSERT_LE(prof(m).real(), 1e-6) << "node " << m;
  const auto got = jet_of_disc(r.extremal, xi.order());
  const auto want = jet_scale(r.lambda, xi);
  EXPECT_LE((got.point - want.point).norm(), 1e-10);
  for (std::size_t j = 1; j <= xi.order(); ++j) EXPECT_LE((got[j] - want[j]).norm(), 1e-10);
  EXPECT_LE(r.report.lambda_lo, r.report.lambda_hi);
  EXPECT_LE(r.report.lambda_hi - r.report.lambda_lo, r.config.bisection_tol * r.report.lambda_hi);
}

}  // namespace

TEST(ClosedForms, K1Examples) {
  EXPECT_EQ(k1_disc_closed_form(0.0, 1.0), 1.0);
  EXPECT_EQ(k1_disc_closed_form(0.0, 0.0), 0.0);
  EXPECT_NEAR(k1_disc_closed_form(0.5, 1.0), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(code_of([] { k1_disc_closed_form(1.0, 1.0); }), Errc::OutsideDomain);
}

TEST(ClosedForms, K2Examples) {
  EXPECT_EQ(k2_disc_closed_form(scalar_jet(0.0, {1.0, 0.0})), 1.0);
  EXPECT_EQ(k2_disc_closed_form(scalar_jet(0.0, {0.0, 2.0})), 1.0);
  EXPECT_NEAR(k2_disc_closed_form(scalar_jet(0.0, {1.0, 2.0})), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(code_of([] { k2_disc_closed_form(scalar_jet(0.1, {1.0, 2.0})); }), Errc::BasePointNotZero);
}

TEST(ClosedForms, K1MatchesAutomorphismWitness) {
  // f(zeta) = phi_p(e^{i arg v} zeta) with phi_p(z) = (z + p) / (1 + conj(p) z)
  // maps the disc onto itself with f(0) = p and f'(0) parallel to v.
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const cplx p = std::polar(0.9 * U(rng), 6.3 * U(rng));
    const cplx v = std::polar(0.1 + U(rng), 6.3 * U(rng));
    const auto f = rotate(AnalyticDisc::scalar({p, 1.0}, {1.0, std::conj(p)}), std::arg(v));
    const auto jet = jet_of_disc(f, 1);
    EXPECT_NEAR(std::abs(jet.point(0) - p), 0.0, 1e-15);
    EXPECT_NEAR(std::arg(jet[1](0) / v), 0.0, 1e-12);
    const auto tr = boundary_trace(f, 256);
    for (std::size_t m = 0; m < tr.size(); ++m) EXPECT_NEAR(std::abs(tr(m)), 1.0, 1e-12);
    const double lambda = std::abs(jet[1](0)) / std::abs(v);
    EXPECT_NEAR(k1_disc_closed_form(p, v), 1.0 / lambda, 1e-12 / lambda);
  }
}

TEST(ClosedForms, DiscK2ExtremalCarriesTheJet) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const JetVector xi = detail::random_jet(rng, CVec::Zero(1), 2);
    const double K = k2_disc_closed_form(xi);
    const AnalyticDisc f = disc_k2_extremal(xi);
    const auto got = jet_of_disc(f, 2);
    const auto want = jet_scale(1.0 / K, xi);
    EXPECT_LE(std::abs(got[1](0) - want[1](0)), 1e-12);
    EXPECT_LE(std::abs(got[2](0) - want[2](0)), 1e-12);
    const auto tr = boundary_trace(f, 1024);
    for (std::size_t m = 0; m < tr.size(); ++m) EXPECT_LE(std::abs(tr(m)), 1.0 + 1e-12);
  }
}

TEST(ClosedForms, PropertySuite) {
  const auto rep = closed_form_property_suite(50, 43);
  EXPECT_TRUE(rep.passed) << rep.worst_violation;
  EXPECT_EQ(rep.checks.size(), 100u);
}

TEST(Solver, DiscK2Root2) {
  const Domain disc = make_unit_disc();
  const JetVector xi = scalar_jet(0.0, {1.0, 2.0});
  const auto r = kobayashi_k_metric(disc, xi);
  EXPECT_NEAR(r.value, std::sqrt(2.0), 0.02 * std::sqrt(2.0));
  expect_admissible(disc, xi, r);
}

TEST(Solver, DiscK1Homogeneous) {
  const Domain disc = make_unit_disc();
  const JetVector xi = scalar_jet(0.0, {2.0});
  const auto r = kobayashi_k_metric(disc, xi);
  EXPECT_NEAR(r.value, 2.0, 0.04);
  expect_admissible(disc, xi, r);
}

TEST(Solver, DiscK1OffCentre) {
  const Domain disc = make_unit_disc();
  const JetVector xi = scalar_jet(cplx(0.3, -0.4), {cplx(0.5, 0.5)});
  const auto r = kobayashi_k_metric(disc, xi);
  const double exact = k1_disc_closed_form(xi.point(0), xi[1](0));
  EXPECT_NEAR(r.value, exact, 0.02 * exact);
  expect_admissible(disc, xi, r);
}

TEST(Solver, BallK1) {
  const Domain ball = make_ball(2);
  const JetVector xi(CVec::Zero(2), {vec({1.0, 0.0})});
  const auto r = kobayashi_k_metric(ball, xi);
  EXPECT_NEAR(r.value, 1.0, 0.02);
  expect_admissible(ball, xi, r);
}

TEST(Solver, Deterministic) {
  const Domain ball = make_ellipsoid({1.0, 2.0});
  const JetVector xi(CVec::Zero(2), {vec({0.5, cplx(0, 0.3)}), vec({0.2, 0.1})});
  const auto a = kobayashi_k_metric(ball, xi);
  const auto b = kobayashi_k_metric(ball, xi);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.report.inner_iterations, b.report.inner_iterations);
}

TEST(Yu, Examples) {
  const Domain disc = make_unit_disc();
  EXPECT_NEAR(yu_metric(disc, CVec::Zero(1), vec({2.0}), 2).value, 1.0, 0.02);
  EXPECT_NEAR(yu_metric(disc, CVec::Zero(1), vec({1.0}), 1).value, 1.0, 0.02);
  const auto r = yu_metric(make_ball(2), CVec::Zero(2), vec({0.0, 1.0}), 2);
  // the witness has no first-order term
  EXPECT_LE(jet_of_disc(r.extremal, 1)[1].norm(), 1e-12);
  EXPECT_EQ(code_of([&] { yu_metric(disc, CVec::Zero(1), vec({0.0}), 2); }), Errc::ZeroJet);
}

TEST(Solver, Errors) {
  const Domain disc = make_unit_disc();
  EXPECT_EQ(code_of([&] { kobayashi_k_metric(disc, scalar_jet(0.0, {0.0, 0.0})); }), Errc::ZeroJet);
  EXPECT_EQ(code_of([&] { kobayashi_k_metric(disc, scalar_jet(1.5, {1.0})); }), Errc::InfeasibleAtZero);
  SolverConfig cfg;
  cfg.max_outer = 2;
  EXPECT_EQ(code_of([&] { kobayashi_k_metric(disc, scalar_jet(0.0, {1.0}), cfg); }), Errc::NotConverged);
  cfg = {};
  cfg.degree = 1;
  EXPECT_EQ(code_of([&] { kobayashi_k_metric(disc, scalar_jet(0.0, {1.0, 1.0}), cfg); }), Errc::InvalidInput);
  EXPECT_EQ(code_of([&] { kobayashi_k_metric(make_ball(2), scalar_jet(0.0, {1.0})); }), Errc::InvalidInput);
}

TEST(Solver, DiscSuiteSmall) {
  const auto r = disc_metric_suite(44, 3);
  EXPECT_TRUE(r.passed()) << r.worst;
}

TEST(Solver, PropertySuiteDiscIntoBall) {
  const Domain disc = make_unit_disc();
  const Domain ball = make_ball(2);
  Eigen::MatrixXcd A(2, 1);
  A << 1.0, 0.0;
  const auto phi = AnalyticMapSeries::affine(A, CVec::Zero(1), CVec::Zero(2), 3);
  const auto rep = metric_property_suite(disc, ball, phi, 3, 45);
  EXPECT_TRUE(rep.passed) << rep.worst_violation;
  EXPECT_EQ(rep.checks.size(), 9u);
}
