// Acceptance run: one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kjet/json_io.hpp"
#include "kjet/kjet.hpp"
#include "kjet/suites.hpp"

using namespace kjet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr unsigned long long seed = 7;

Outcome disc_k2_closed_form() {
  const Domain disc = make_unit_disc();
  std::mt19937_64 rng(seed);
  double worst = 0.0, slowest = 0.0;
  bool ok = true;
  for (int s = 0; s < 20; ++s) {
    const JetVector xi = detail::random_jet(rng, CVec::Zero(1), 2);
    const auto t0 = Clock::now();
    const double got = kobayashi_k_metric(disc, xi).value;
    const double dt = seconds_since(t0);
    const double exact = std::sqrt(std::norm(xi[1](0)) + std::abs(xi[2](0)) / 2.0);
    const double rel = std::abs(got - exact) / exact;
    worst = std::max(worst, rel);
    slowest = std::max(slowest, dt);
    ok = ok && rel <= 0.02 && dt < 10.0;
  }
  return {ok, fmt("20 jets, worst rel err %.3e (<= 2e-2), slowest %.2fs (< 10s)", worst, slowest)};
}

Outcome disc_k1_oracle() {
  const Domain disc = make_unit_disc();
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0, slowest = 0.0;
  bool ok = true;
  for (int s = 0; s < 20; ++s) {
    const cplx p = std::polar(0.8 * std::sqrt(U(rng)), two_pi * U(rng));
    const cplx v = std::polar(0.2 + 1.8 * U(rng), two_pi * U(rng));
    const auto t0 = Clock::now();
    const double got = kobayashi_k_metric(disc, scalar_jet(p, {v})).value;
    const double dt = seconds_since(t0);
    const double exact = std::abs(v) / (1.0 - std::norm(p));
    const double rel = std::abs(got - exact) / exact;
    worst = std::max(worst, rel);
    slowest = std::max(slowest, dt);
    ok = ok && rel <= 0.02 && dt < 10.0;
  }
  return {ok, fmt("20 (p, v) with |p| <= 0.8, worst rel err %.3e, slowest %.2fs", worst, slowest)};
}

// Largest lambda with |f|^2 <= 1 on a 256-node circle for
// f = lambda v zeta + sum_{j=2..6} b_j zeta^j, by bisection.
double brute_force_lambda(const CVec& v, const std::vector<CVec>& tail) {
  const std::size_t N = 256;
  auto feasible = [&](double lambda) {
    for (std::size_t m = 0; m < N; ++m) {
      const cplx z = unit(grid_angle(m, N));
      CVec f = lambda * v * z;
      cplx zp = z;
      for (const auto& b : tail) {
        zp *= z;
        f += b * zp;
      }
      if (f.squaredNorm() > 1.0) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 2.0 / v.norm();
  if (!feasible(lo)) return 0.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

double brute_force_ball_k1(const CVec& v, std::mt19937_64& rng) {
  double best = 0.0;
  std::vector<CVec> tail(5, CVec::Zero(2));
  // real parts of the second coordinate's b_2..b_6 on {-0.1, 0, 0.1}
  for (int code = 0; code < 243; ++code) {
    int c = code;
    for (int j = 0; j < 5; ++j, c /= 3) tail[static_cast<std::size_t>(j)](1) = 0.1 * (c % 3 - 1);
    best = std::max(best, brute_force_lambda(v, tail));
  }
  std::normal_distribution<double> G(0.0, 0.05);
  for (int s = 0; s < 300; ++s) {
    for (auto& b : tail)
      for (auto& z : b) z = cplx(G(rng), G(rng));
    best = std::max(best, brute_force_lambda(v, tail));
  }
  return 1.0 / best;
}

Outcome ball_k1() {
  const Domain ball = make_ball(2);
  std::mt19937_64 rng(seed + 2);
  std::vector<CVec> vs{(CVec(2) << 1.0, 0.0).finished()};
  std::normal_distribution<double> G;
  for (int s = 0; s < 2; ++s) vs.push_back((CVec(2) << cplx(G(rng), G(rng)), cplx(G(rng), G(rng))).finished());
  const auto t0 = Clock::now();
  double worst_exact = 0.0, worst_oracle = 0.0;
  for (const auto& v : vs) {
    const double got = kobayashi_k_metric(ball, JetVector(CVec::Zero(2), {v})).value;
    const double oracle = brute_force_ball_k1(v, rng);
    worst_exact = std::max(worst_exact, std::abs(got - v.norm()) / v.norm());
    worst_oracle = std::max(worst_oracle, std::abs(got - oracle) / oracle);
  }
  const double dt = seconds_since(t0);
  const bool ok = worst_exact <= 0.02 && worst_oracle <= 0.02 && dt < 30.0;
  return {ok, fmt("3 vectors, rel err vs ||v|| %.3e, vs brute-force oracle %.3e, %.2fs (< 30s)", worst_exact,
                  worst_oracle, dt)};
}

Outcome schwarz_equality_attainment() {
  std::mt19937_64 rng(seed + 3);
  double worst_jet = 0.0, worst_rho = -1.0;
  for (int s = 0; s < 10; ++s) {
    const JetVector xi = detail::random_jet(rng, CVec::Zero(1), 2);
    const double K = std::sqrt(std::norm(xi[1](0)) + std::abs(xi[2](0)) / 2.0);
    const double lambda = 1.0 / K;
    const AnalyticDisc f = schwarz_equality_disc(lambda * xi[1](0), std::arg(xi[2](0)));
    const JetVector got = jet_of_disc(f, 2);
    const JetVector want = jet_scale(lambda, xi);
    worst_jet = std::max({worst_jet, std::abs(got[1](0) - want[1](0)), std::abs(got[2](0) - want[2](0)),
                          std::abs(got.point(0))});
    const auto tr = boundary_trace(f, 4096);
    for (std::size_t m = 0; m < tr.size(); ++m) worst_rho = std::max(worst_rho, std::norm(tr(m)) - 1.0);
  }
  const bool ok = worst_jet <= 1e-6 && worst_rho <= 1e-6;
  return {ok, fmt("10 jets, jet mismatch %.2e, max rho on 4096 nodes %.2e (both <= 1e-6)", worst_jet, worst_rho)};
}

Outcome blaschke_stationarity() {
  const Domain disc = make_unit_disc();
  std::mt19937_64 rng(seed + 4);
  const auto t0 = Clock::now();
  double worst_res = 0.0, worst_gap = 0.0, worst_oracle = 0.0;
  int bad = 0;
  for (int s = 0; s < 100; ++s) {
    const std::size_t k = 1 + static_cast<std::size_t>(s % 4);
    const auto a = random_blaschke_zeros(rng, k);
    const auto f = blaschke_product(a);
    try {
      const auto exact = scalar_stationarity_exact(f, k);
      const auto found = stationarity_search(disc, f, k);
      worst_res = std::max({worst_res, exact.residual, found.residual});
      const std::size_t N = exact.c.size();
      for (std::size_t m = 0; m < N; ++m) {
        double oracle = 1.0;
        for (const auto& aj : a) oracle *= std::norm(1.0 - std::conj(aj) * unit(grid_angle(m, N)));
        worst_gap = std::max(worst_gap, std::abs(exact.c(m) - found.c(m)));
        worst_oracle = std::max(worst_oracle, std::abs(exact.c(m).real() - oracle));
      }
      if (!exact.winding || *exact.winding != 0) ++bad;
    } catch (const Error&) {
      ++bad;
    }
  }
  const double dt = seconds_since(t0);
  const bool ok = bad == 0 && worst_res <= 1e-8 && worst_gap <= 1e-6 && worst_oracle <= 1e-6 && dt < 60.0;
  return {ok, fmt("100 products, k <= 4: residual %.2e, search gap %.2e, weight vs closed form %.2e, %d errors, %.1fs",
                  worst_res, worst_gap, worst_oracle, bad, dt)};
}

Outcome negative_control() {
  try {
    scalar_stationarity_exact(AnalyticDisc::scalar({0.0, 0.0, 1.0}), 1);
  } catch (const NonzeroWinding& e) {
    return {e.winding() == -1, fmt("zeta^2 at k = 1 refuted with NonzeroWinding(%d)", e.winding())};
  } catch (const Error& e) {
    return {false, std::string("unexpected error ") + e.what()};
  }
  return {false, "zeta^2 at k = 1 was certified"};
}

Outcome metric_properties() {
  const auto closed = closed_form_property_suite(20, seed + 5);
  const Domain disc = make_unit_disc();
  const Domain ball = make_ball(2);
  Eigen::MatrixXcd A(2, 1);
  A << 1.0, 0.0;
  const auto phi = AnalyticMapSeries::affine(A, CVec::Zero(1), CVec::Zero(2), 3);
  const auto numeric = metric_property_suite(disc, ball, phi, 20, seed + 6);
  double worst[3] = {-INFINITY, -INFINITY, -INFINITY};
  for (const auto& c : numeric.checks) {
    const int i = c.name == "homogeneity" ? 0 : (c.name == "monotonicity" ? 1 : 2);
    worst[i] = std::max(worst[i], c.violation);
  }
  return {closed.passed && numeric.passed,
          fmt("closed forms worst %.1e (<= 1e-12); solver worst homogeneity %.1e, monotonicity %.1e, "
              "decreasing %.1e (<= %.0e)",
              closed.worst_violation, worst[0], worst[1], worst[2], numeric.allowance)};
}

Outcome schwarz_property() {
  const auto r = schwarz_suite(seed + 7, 200);
  return {r.passed() && r.cases == 200, fmt("200 centered self-maps, worst violation %.2e (<= 1e-10)", r.worst)};
}

Outcome extremality_probes() {
  const Domain disc = make_unit_disc();
  std::mt19937_64 rng(seed + 8);
  std::vector<std::pair<AnalyticDisc, std::size_t>> cases;
  for (std::size_t k = 1; k <= 3; ++k) cases.emplace_back(blaschke_product(std::vector<cplx>(k, 0.0)), k);
  cases.emplace_back(blaschke_product(random_blaschke_zeros(rng, 2)), 2);
  bool ok = true;
  double worst_mu = 0.0, min_sign = INFINITY, slowest = 0.0, min_s1 = INFINITY;
  for (const auto& [f, k] : cases) {
    const auto t0 = Clock::now();
    try {
      const auto rep = local_extremality_probe(disc, f, k);
      worst_mu = std::max(worst_mu, rep.best_mu);
      for (const auto& [lambda, v] : rep.family) min_sign = std::min(min_sign, v);
      min_s1 = std::min(min_s1, std::abs(rep.s_at_one));
      ok = ok && rep.passed;
    } catch (const ProbeFailed& e) {
      worst_mu = std::max(worst_mu, e.report().best_mu);
      ok = false;
    } catch (const Error& e) {
      std::cerr << "probe error: " << e.what() << '\n';
      ok = false;
    }
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    ok = ok && dt < 60.0;
  }
  return {ok && worst_mu <= 1.0 + 1e-3,
          fmt("zeta, zeta^2, zeta^3, random degree-2 Blaschke: best mu %.6f (<= 1.001), min (1-l)S(l) %.3e, "
              "min |S(1)| %.3e, slowest %.2fs",
              worst_mu, min_sign, min_s1, slowest)};
}

Outcome euler_lagrange() {
  const Domain ellipsoid = make_ellipsoid({1.0, 2.0});
  SolverConfig cfg;
  cfg.degree = 48;
  cfg.grid = 512;
  cfg.bisection_tol = 1e-6;
  std::mt19937_64 rng(5);
  bool ok = true;
  double min_prop = 1.0, worst_res = 0.0, slowest = 0.0;
  for (int s = 0; s < 5; ++s) {
    const JetVector xi = detail::random_jet(rng, CVec::Zero(2), 2);
    const auto t0 = Clock::now();
    const auto result = kobayashi_k_metric(ellipsoid, xi, cfg);
    const auto rep = euler_lagrange_check(ellipsoid, result, 2);
    const double dt = seconds_since(t0);
    min_prop = std::min(min_prop, rep.properness);
    worst_res = std::max(worst_res, rep.residual);
    slowest = std::max(slowest, dt);
    std::cerr << fmt("  jet %d: K = %.6f, properness %.3f, residual %.2e, %.1fs\n", s + 1, result.value,
                     rep.properness, rep.residual, dt);
    if (!rep.passed || dt >= 120.0) {
      ok = false;
      io::json witness = {{"jet", io::encode(xi)}, {"metric", io::encode(result)}, {"check", io::encode(rep)}};
      std::cerr << "  failing witness: " << witness.dump() << '\n';
    }
  }
  return {ok, fmt("ellipsoid (1,2), k = 2, 5 jets: min properness %.3f (>= 0.95), worst residual %.2e (<= 1e-2), "
                  "slowest %.1fs (< 120s)",
                  min_prop, worst_res, slowest)};
}

Outcome poletsky() {
  const auto r = poletsky_suite(seed + 9, 100);
  return {r.passed() && r.cases == 100, fmt("100 rational discs, %d verdict mismatches", r.failures)};
}

Outcome circle_exactness() {
  const auto r = circle_suite(seed + 10, 20);
  return {r.passed(), fmt("round trip and completion worst %.2e (<= 1e-12), winding of zeta^m, |m| <= 8, exact",
                          r.worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form K2 on the disc", disc_k2_closed_form},
      {"K1 disc oracle", disc_k1_oracle},
      {"ball K1 with brute-force oracle", ball_k1},
      {"Schwarz equality attainment", schwarz_equality_attainment},
      {"Blaschke stationarity", blaschke_stationarity},
      {"winding negative control", negative_control},
      {"metric property suite", metric_properties},
      {"second-order Schwarz inequality", schwarz_property},
      {"local extremality probe", extremality_probes},
      {"Euler-Lagrange consistency", euler_lagrange},
      {"functional/jet equivalence", poletsky},
      {"circle-analysis exactness", circle_exactness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << (i + 1) << ": " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << "  ("
              << o.detail << ")" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
