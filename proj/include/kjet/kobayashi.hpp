#pragma once

// Kobayashi k-metric K^k(p, xi) = inf { 1/lambda : f(Delta) in Omega,
// f(0) = p, J^k_p(f) = lambda . xi }: closed forms on the disc and a
// numerical extremal-disc solver over polynomial discs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kjet/circle.hpp"
#include "kjet/disc.hpp"
#include "kjet/domain.hpp"
#include "kjet/errors.hpp"
#include "kjet/jets.hpp"

namespace kjet {

struct SolverConfig {
  std::size_t degree = 12;     // polynomial degree d of competitor discs
  std::size_t grid = 256;      // boundary nodes carrying the constraint
  double bisection_tol = 1e-3; // relative width of the final lambda bracket
  int inner_max_iter = 200;
  double margin = 1e-6;        // rho(f) <= -margin at every node
  unsigned long long seed = 0;
  double lambda_max = 0.0;     // 0 selects the Cauchy-estimate bound
  int max_outer = 60;
  int multistart = 1;
};

struct SolverReport {
  int outer_iterations = 0;
  int inner_iterations = 0;
  double lambda_lo = 0.0;  // certified feasible
  double lambda_hi = 0.0;  // last infeasible probe (or the a priori bound)
  double boundary_margin = 0.0;  // max rho(f) over the solver grid
  double fine_grid_max_rho = 0.0;  // max rho(f) over a 4x finer grid
  double jet_residual = 0.0;
};

struct MetricResult {
  double value = 0.0;  // 1 / lambda
  double lambda = 0.0;
  AnalyticDisc extremal;
  SolverReport report;
  SolverConfig config;

  /// Metric bracket implied by the lambda bracket: [1/hi, 1/lo].
  double value_lower() const { return report.lambda_hi > 0.0 ? 1.0 / report.lambda_hi : 0.0; }
  double value_upper() const { return value; }
};

/// |v| / (1 - |p|^2): the classical Kobayashi (Poincare) metric of the disc.
inline double k1_disc_closed_form(cplx p, cplx v) {
  if (!(std::abs(p) < 1.0)) detail::fail(Errc::OutsideDomain, "|p| >= 1");
  return std::abs(v) / (1.0 - std::norm(p));
}

/// K^2 of the disc at the origin: sqrt(|xi_1|^2 + |xi_2| / 2).
inline double k2_disc_closed_form(const JetVector& xi) {
  detail::require(xi.dim() == 1 && xi.order() == 2, Errc::InvalidInput, "need a scalar 2-jet");
  if (std::abs(xi.point(0)) != 0.0) detail::fail(Errc::BasePointNotZero, "closed form holds at the origin only");
  return std::sqrt(std::norm(xi[1](0)) + std::abs(xi[2](0)) / 2.0);
}

/// The Schwarz equality disc carrying the jet lambda . xi at lambda = 1/K^2.
inline AnalyticDisc disc_k2_extremal(const JetVector& xi) {
  const double K = k2_disc_closed_form(xi);
  detail::require(K > 0.0, Errc::ZeroJet, "zero jet");
  const double lambda = 1.0 / K;
  const cplx a = lambda * xi[1](0);
  const double theta = std::abs(xi[2](0)) > 0.0 ? std::arg(xi[2](0)) : 0.0;
  if (std::abs(a) >= 1.0 - 1e-15) return AnalyticDisc::scalar({cplx{0.0}, a});
  return schwarz_equality_disc(a, theta);
}

/// Feasibility of polynomial discs f(zeta) = p + sum_{j<=k} lambda^j xi_j/j! zeta^j
/// + sum_{k<j<=d} b_j zeta^j inside Omega, over the free tail b. The tail can
/// be confined to a Euclidean ball around a given centre.
class DiscFeasibility {
 public:
  struct Outcome {
    bool feasible = false;
    Eigen::VectorXd tail;
    double max_rho = 0.0;
    int iterations = 0;
  };

  DiscFeasibility(const Domain& omega, const JetVector& xi, const SolverConfig& cfg)
      : omega_(omega), xi_(xi), cfg_(cfg), n_(xi.dim()), k_(xi.order()) {
    detail::require(xi.dim() == omega.dim(), Errc::InvalidInput, "jet and domain dimensions differ");
    detail::require(cfg.degree >= k_, Errc::InvalidInput, "solver degree must be >= jet order");
    detail::require(is_power_of_two(cfg.grid) && cfg.grid >= 8, Errc::InvalidInput, "grid must be a power of two >= 8");
    const std::size_t fine = 4 * cfg.grid;
    powers_.resize(fine);
    for (std::size_t m = 0; m < fine; ++m) powers_[m] = unit(grid_angle(m, fine));
  }

  std::size_t tail_size() const noexcept { return 2 * n_ * (cfg_.degree - k_); }

  void confine(Eigen::VectorXd centre, double radius) {
    detail::require(static_cast<std::size_t>(centre.size()) == tail_size(), Errc::InvalidInput, "tail centre size");
    centre_ = std::move(centre);
    radius_ = radius;
  }

  /// Tail parameters of a disc's Taylor coefficients k+1..d.
  Eigen::VectorXd tail_of(const AnalyticDisc& f) const {
    const auto a = f.taylor(cfg_.degree);
    Eigen::VectorXd x(static_cast<Eigen::Index>(tail_size()));
    for (std::size_t j = k_ + 1; j <= cfg_.degree; ++j)
      for (std::size_t i = 0; i < n_; ++i) {
        const auto at = idx(j, i);
        x(at) = a[j](static_cast<Eigen::Index>(i)).real();
        x(at + 1) = a[j](static_cast<Eigen::Index>(i)).imag();
      }
    return x;
  }

  Eigen::VectorXd start() const {
    return centre_ ? *centre_ : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tail_size()));
  }

  AnalyticDisc disc(double lambda, const Eigen::VectorXd& tail) const {
    return AnalyticDisc::polynomial(coefficients(lambda, tail));
  }

  std::vector<CVec> coefficients(double lambda, const Eigen::VectorXd& tail) const {
    std::vector<CVec> a(cfg_.degree + 1, CVec::Zero(static_cast<Eigen::Index>(n_)));
    a[0] = xi_.point;
    double power = 1.0;
    for (std::size_t j = 1; j <= k_; ++j) {
      power *= lambda;
      a[j] = xi_[j] * (power / factorial(j));
    }
    for (std::size_t j = k_ + 1; j <= cfg_.degree; ++j)
      for (std::size_t i = 0; i < n_; ++i) {
        const auto at = idx(j, i);
        a[j](static_cast<Eigen::Index>(i)) = cplx(tail(at), tail(at + 1));
      }
    return a;
  }

  double max_rho(double lambda, const Eigen::VectorXd& tail, std::size_t N) const {
    const auto a = coefficients(lambda, tail);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < N; ++m) {
      worst = std::max(worst, omega_.rho(horner_vec(a, unit(grid_angle(m, N)))));
    }
    return worst;
  }

  /// Feasibility at `lambda`, starting from tail `x`. The constraint is
  /// imposed on the solver grid; nodes of the 4x finer grid that still
  /// violate it are added to the constraint set and the solve is repeated.
  Outcome solve(double lambda, Eigen::VectorXd x) const {
    const std::size_t N = cfg_.grid;
    const std::size_t fine = 4 * N;
    project(x);
    std::vector<std::size_t> nodes;  // indices on the fine grid
    for (std::size_t m = 0; m < N; ++m) nodes.push_back(4 * m);
    Outcome out;
    for (int round = 0; round < 16; ++round) {
      const auto [worst, iters] = minimize_violation(lambda, x, nodes);
      out.iterations += iters;
      out.max_rho = worst;
      if (worst > -cfg_.margin) break;
      const auto a = coefficients(lambda, x);
      std::vector<std::size_t> added;
      for (std::size_t m = 0; m < fine; ++m) {
        if (m % 4 == 0 && round == 0) continue;
        if (omega_.rho(horner_vec(a, unit(grid_angle(m, fine)))) > -cfg_.margin) added.push_back(m);
      }
      if (added.empty()) {
        out.feasible = true;
        break;
      }
      for (auto m : added)
        if (std::find(nodes.begin(), nodes.end(), m) == nodes.end()) nodes.push_back(m);
    }
    out.tail = std::move(x);
    return out;
  }

  /// A feasible tail at `lambda` whose boundary values sit closer to bOmega:
  /// least-squares attachment of rho(f) to the boundary on the solver grid,
  /// followed by the feasibility solve. Returns nullopt if that fails.
  std::optional<Eigen::VectorXd> attach(double lambda, Eigen::VectorXd x) const {
    std::vector<std::size_t> nodes;
    for (std::size_t m = 0; m < cfg_.grid; ++m) nodes.push_back(4 * m);
    project(x);
    minimize_violation(lambda, x, nodes, true);
    auto res = solve(lambda, std::move(x));
    if (!res.feasible) return std::nullopt;
    return std::move(res.tail);
  }

 private:
  Eigen::Index idx(std::size_t j, std::size_t i) const {
    return static_cast<Eigen::Index>(2 * ((j - k_ - 1) * n_ + i));
  }

  CVec horner_vec(const std::vector<CVec>& a, cplx z) const {
    CVec f = CVec::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t j = a.size(); j-- > 0;) f = f * z + a[j];
    return f;
  }

  // zeta_m^j for fine-grid node m.
  cplx zeta_pow(std::size_t m, std::size_t j) const { return powers_[(m * j) % powers_.size()]; }

  // Levenberg-Marquardt on sum_m max(0, rho(f_m) + 2 margin)^2 over `nodes`.
  // Returns the max of rho over the nodes and the iteration count.
  // With `attach` every node is pulled to rho = -2 margin, not only violating ones.
  std::pair<double, int> minimize_violation(double lambda, Eigen::VectorXd& x,
                                            const std::vector<std::size_t>& nodes, bool attach = false) const {
    const double target = 2.0 * cfg_.margin;
    const auto P = static_cast<Eigen::Index>(tail_size());
    const std::size_t M = nodes.size();

    std::vector<CVec> fixed(M, CVec::Zero(static_cast<Eigen::Index>(n_)));
    {
      std::vector<CVec> low(k_ + 1);
      low[0] = xi_.point;
      double power = 1.0;
      for (std::size_t j = 1; j <= k_; ++j) {
        power *= lambda;
        low[j] = xi_[j] * (power / factorial(j));
      }
      for (std::size_t m = 0; m < M; ++m)
        for (std::size_t j = 0; j <= k_; ++j) fixed[m] += low[j] * zeta_pow(nodes[m], j);
    }

    std::vector<CVec> f(M);
    std::vector<double> rho(M);
    auto evaluate = [&](const Eigen::VectorXd& t) {
      double cost = 0.0, worst = -std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < M; ++m) {
        f[m] = fixed[m];
        for (std::size_t j = k_ + 1; j <= cfg_.degree; ++j)
          for (std::size_t i = 0; i < n_; ++i) {
            const auto at = idx(j, i);
            f[m](static_cast<Eigen::Index>(i)) += cplx(t(at), t(at + 1)) * zeta_pow(nodes[m], j);
          }
        rho[m] = omega_.rho(f[m]);
        worst = std::max(worst, rho[m]);
        const double r = attach ? rho[m] + target : std::max(0.0, rho[m] + target);
        cost += r * r;
      }
      return std::pair{cost, worst};
    };

    auto [cost, worst] = evaluate(x);
    double damping = 1e-3;
    int it = 0;
    for (; it < cfg_.inner_max_iter && (attach || worst > -cfg_.margin) && P > 0; ++it) {
      Eigen::MatrixXd JtJ = Eigen::MatrixXd::Zero(P, P);
      Eigen::VectorXd Jtr = Eigen::VectorXd::Zero(P);
      Eigen::VectorXd row(P);
      for (std::size_t m = 0; m < M; ++m) {
        const double r = rho[m] + target;
        if (r <= 0.0 && !attach) continue;
        const CVec g = omega_.drho(f[m]);
        for (std::size_t j = k_ + 1; j <= cfg_.degree; ++j)
          for (std::size_t i = 0; i < n_; ++i) {
            const cplx w = g(static_cast<Eigen::Index>(i)) * zeta_pow(nodes[m], j);
            const auto at = idx(j, i);
            row(at) = 2.0 * w.real();
            row(at + 1) = -2.0 * w.imag();
          }
        JtJ.selfadjointView<Eigen::Lower>().rankUpdate(row);
        Jtr += r * row;
      }
      JtJ = JtJ.selfadjointView<Eigen::Lower>();
      if (Jtr.norm() == 0.0) break;
      bool improved = false;
      for (int tries = 0; tries < 12; ++tries) {
        Eigen::MatrixXd A = JtJ;
        A.diagonal().array() += damping * (JtJ.diagonal().array() + 1e-12);
        Eigen::VectorXd trial = x + A.ldlt().solve(-Jtr);
        project(trial);
        const auto [tc, tw] = evaluate(trial);
        if (tc < cost) {
          x = std::move(trial);
          cost = tc;
          worst = tw;
          damping = std::max(damping / 3.0, 1e-9);
          improved = true;
          break;
        }
        damping *= 4.0;
      }
      if (!improved) break;
    }
    return {evaluate(x).second, it};
  }

  void project(Eigen::VectorXd& x) const {
    if (!centre_) return;
    const Eigen::VectorXd d = x - *centre_;
    const double r = d.norm();
    if (r > radius_) x = *centre_ + d * (radius_ / r);
  }

  const Domain& omega_;
  JetVector xi_;
  SolverConfig cfg_;
  std::size_t n_, k_;
  std::vector<cplx> powers_;
  std::optional<Eigen::VectorXd> centre_;
  double radius_ = 0.0;
};

namespace detail {

// Cauchy estimates: lambda^j ||xi_j|| / j! <= sup ||f - p|| < R + ||p||.
inline double cauchy_lambda_bound(const Domain& omega, const JetVector& xi) {
  const double C = omega.bounding_radius() + xi.point.norm();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= xi.order(); ++j) {
    const double s = xi[j].norm();
    if (s > 0.0) bound = std::min(bound, std::pow(C * factorial(j) / s, 1.0 / static_cast<double>(j)));
  }
  return bound * (1.0 + 1e-9);
}

inline Eigen::VectorXd perturbed(const Eigen::VectorXd& x, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd y = x;
  for (auto& v : y) v += normal(rng);
  return y;
}

}  // namespace detail

/// Bisection on lambda with warm-started feasibility solves. Each midpoint
/// tries the last feasible tail, the default start and (multistart - 1)
/// seeded perturbations, in that order.
inline MetricResult kobayashi_k_metric(const Domain& omega, const JetVector& xi, const SolverConfig& cfg = {}) {
  if (xi.is_zero()) detail::fail(Errc::ZeroJet, "metric query needs a nonzero jet");
  detail::require(xi.dim() == omega.dim(), Errc::InvalidInput, "jet and domain dimensions differ");
  if (!(omega.rho(xi.point) <= -cfg.margin))
    detail::fail(Errc::InfeasibleAtZero, "base point is not inside the domain with the configured margin");

  DiscFeasibility problem(omega, xi, cfg);
  std::mt19937_64 rng(cfg.seed);

  double lo = 0.0;
  double hi = cfg.lambda_max > 0.0 ? cfg.lambda_max : detail::cauchy_lambda_bound(omega, xi);
  Eigen::VectorXd best = problem.start();
  SolverReport rep;

  int outer = 0;
  for (; outer < cfg.max_outer && hi - lo > cfg.bisection_tol * hi; ++outer) {
    const double mid = 0.5 * (lo + hi);
    std::vector<Eigen::VectorXd> starts{best};
    if (lo > 0.0) starts.push_back(problem.start());
    for (int s = 1; s < cfg.multistart; ++s) starts.push_back(detail::perturbed(best, rng, 0.05));
    bool feasible = false;
    for (auto& x0 : starts) {
      auto res = problem.solve(mid, x0);
      rep.inner_iterations += res.iterations;
      if (res.feasible) {
        best = std::move(res.tail);
        feasible = true;
        break;
      }
    }
    (feasible ? lo : hi) = mid;
  }
  rep.outer_iterations = outer;
  if (hi - lo > cfg.bisection_tol * hi)
    detail::fail(Errc::NotConverged, "lambda bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                         "] wider than tolerance after " + std::to_string(outer) + " iterations");
  if (lo == 0.0) detail::fail(Errc::NotConverged, "no feasible lambda > 0 found");

  if (auto polished = problem.attach(lo, best)) best = std::move(*polished);

  MetricResult result;
  result.lambda = lo;
  result.value = 1.0 / lo;
  result.extremal = problem.disc(lo, best);
  result.config = cfg;
  rep.lambda_lo = lo;
  rep.lambda_hi = hi;
  rep.boundary_margin = problem.max_rho(lo, best, cfg.grid);
  rep.fine_grid_max_rho = problem.max_rho(lo, best, 4 * cfg.grid);
  const JetVector got = jet_of_disc(result.extremal, xi.order());
  const JetVector want = jet_scale(lo, xi);
  double jr = (got.point - want.point).norm();
  for (std::size_t j = 1; j <= xi.order(); ++j) jr = std::max(jr, (got[j] - want[j]).norm());
  rep.jet_residual = jr;
  result.report = rep;
  return result;
}

/// Yu's metric chi^k(p, v) as K^k on the jet (0, ..., 0, v).
inline MetricResult yu_metric(const Domain& omega, const CVec& p, const CVec& v, std::size_t k,
                              const SolverConfig& cfg = {}) {
  detail::require(k >= 1, Errc::InvalidInput, "order must be >= 1");
  if (v.norm() == 0.0) detail::fail(Errc::ZeroJet, "v must be nonzero");
  std::vector<CVec> comps(k, CVec::Zero(v.size()));
  comps.back() = v;
  return kobayashi_k_metric(omega, JetVector(p, std::move(comps)), cfg);
}

struct PropertyCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double violation = 0.0;  // relative; <= 0 means satisfied
};

struct PropertySuiteReport {
  std::vector<PropertyCheck> checks;
  double worst_violation = -std::numeric_limits<double>::infinity();
  double allowance = 0.0;
  bool passed = true;

  void add(PropertyCheck c) {
    worst_violation = std::max(worst_violation, c.violation);
    passed = passed && c.violation <= allowance;
    checks.push_back(std::move(c));
  }
};

namespace detail {

inline JetVector random_jet(std::mt19937_64& rng, const CVec& p, std::size_t k) {
  std::uniform_real_distribution<double> mod(0.2, 1.5), phase(0.0, two_pi);
  std::vector<CVec> comps;
  for (std::size_t j = 0; j < k; ++j) {
    CVec c(p.size());
    for (auto& z : c) z = std::polar(mod(rng) / std::sqrt(static_cast<double>(p.size())), phase(rng));
    comps.push_back(c);
  }
  return JetVector(p, std::move(comps));
}

}  // namespace detail

/// Homogeneity, monotonicity in k and the decreasing property under phi
/// (mapping `omega` into `target`), each on `samples` random jets at the
/// reference point of `omega`. A relative violation beyond 3x the bisection
/// tolerance fails the suite.
inline PropertySuiteReport metric_property_suite(const Domain& omega, const Domain& target,
                                                 const AnalyticMapSeries& phi, int samples,
                                                 unsigned long long seed, const SolverConfig& cfg = {},
                                                 std::size_t k = 2) {
  PropertySuiteReport rep;
  rep.allowance = 3.0 * cfg.bisection_tol;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mod(0.3, 2.0), phase(0.0, two_pi);
  const CVec& p = omega.reference_point();
  for (int s = 0; s < samples; ++s) {
    const JetVector xi = detail::random_jet(rng, p, k);
    const double K = kobayashi_k_metric(omega, xi, cfg).value;

    const cplx c = std::polar(mod(rng), phase(rng));
    const double Kc = kobayashi_k_metric(omega, jet_scale(c, xi), cfg).value;
    rep.add({"homogeneity", Kc, std::abs(c) * K, std::abs(Kc - std::abs(c) * K) / (std::abs(c) * K)});

    const JetVector lifted = detail::random_jet(rng, p, k + 1);
    JetVector higher = lifted;
    for (std::size_t j = 0; j < k; ++j) higher.components[j] = xi.components[j];
    const double Kup = kobayashi_k_metric(omega, higher, cfg).value;
    rep.add({"monotonicity", K, Kup, (K - Kup) / Kup});

    const JetVector pushed = jet_pushforward(phi, xi);
    if (!pushed.is_zero()) {
      const double Kt = kobayashi_k_metric(target, pushed, cfg).value;
      rep.add({"decreasing", Kt, K, (Kt - K) / K});
    }
  }
  return rep;
}

/// The same three properties evaluated on the disc closed forms at 0.
inline PropertySuiteReport closed_form_property_suite(int samples, unsigned long long seed) {
  PropertySuiteReport rep;
  rep.allowance = 1e-12;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mod(0.1, 3.0), phase(0.0, two_pi);
  for (int s = 0; s < samples; ++s) {
    const JetVector xi = scalar_jet(0.0, {std::polar(mod(rng), phase(rng)), std::polar(mod(rng), phase(rng))});
    const cplx c = std::polar(mod(rng), phase(rng));
    const double K = k2_disc_closed_form(xi);
    const double Kc = k2_disc_closed_form(jet_scale(c, xi));
    rep.add({"homogeneity", Kc, std::abs(c) * K, std::abs(Kc - std::abs(c) * K) / (std::abs(c) * K)});
    const double K1 = k1_disc_closed_form(0.0, xi[1](0));
    rep.add({"monotonicity", K1, K, (K1 - K) / K});
  }
  return rep;
}

}  // namespace kjet
