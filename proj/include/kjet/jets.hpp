#pragma once

// k-jets at a point of C^n, identified with derivative tuples
// (f'(0), ..., f^(k)(0)), and their calculus: scaling, projection and
// pushforward by holomorphic maps given as truncated power series.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "kjet/disc.hpp"
#include "kjet/errors.hpp"

namespace kjet {

inline double factorial(std::size_t j) {
  double f = 1.0;
  for (std::size_t i = 2; i <= j; ++i) f *= static_cast<double>(i);
  return f;
}

struct JetVector {
  CVec point;
  std::vector<CVec> components;  // components[j-1] = j-th derivative

  JetVector() = default;
  JetVector(CVec p, std::vector<CVec> xi) : point(std::move(p)), components(std::move(xi)) { validate(); }

  std::size_t order() const noexcept { return components.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(point.size()); }
  const CVec& operator[](std::size_t j) const { return components.at(j - 1); }  // 1-based

  bool is_zero() const {
    for (const auto& c : components)
      if (c.squaredNorm() > 0.0) return false;
    return true;
  }

  void validate() const {
    detail::require(point.size() >= 1, Errc::InvalidInput, "jet base point must have dimension >= 1");
    detail::require(!components.empty(), Errc::InvalidInput, "jet order must be >= 1");
    for (const auto& c : components)
      detail::require(c.size() == point.size(), Errc::InvalidInput, "jet component dimension mismatch");
  }
};

/// Scalar jet at `p` from plain complex components.
inline JetVector scalar_jet(cplx p, const std::vector<cplx>& xi) {
  std::vector<CVec> comps;
  for (const auto& z : xi) comps.push_back(CVec::Constant(1, z));
  return JetVector(CVec::Constant(1, p), std::move(comps));
}

/// c . xi = (c xi_1, c^2 xi_2, ..., c^k xi_k).
inline JetVector jet_scale(cplx c, const JetVector& xi) {
  JetVector out = xi;
  cplx power = 1.0;
  for (auto& comp : out.components) {
    power *= c;
    comp *= power;
  }
  return out;
}

inline JetVector jet_of_disc(const AnalyticDisc& f, std::size_t k) {
  detail::require(k >= 1, Errc::InvalidInput, "jet order must be >= 1");
  const auto a = f.taylor(k);
  std::vector<CVec> comps;
  for (std::size_t j = 1; j <= k; ++j) comps.push_back(a[j] * factorial(j));
  return JetVector(a[0], std::move(comps));
}

inline JetVector jet_project(const JetVector& xi) {
  detail::require(xi.order() >= 2, Errc::InvalidInput, "projection needs order >= 2");
  std::vector<CVec> comps(xi.components.begin(), xi.components.end() - 1);
  return JetVector(xi.point, std::move(comps));
}

/// Smallest j with xi_j != 0 (exact comparison).
inline std::size_t first_nonzero_index(const JetVector& xi) {
  for (std::size_t j = 1; j <= xi.order(); ++j)
    if (xi[j].squaredNorm() > 0.0) return j;
  detail::fail(Errc::AllZero, "every jet component vanishes");
}

/// Polynomial in `vars` complex variables: multi-index -> coefficient.
struct MultiPoly {
  std::size_t vars = 0;
  std::map<std::vector<int>, cplx> terms;

  int total_degree() const {
    int d = 0;
    for (const auto& [alpha, c] : terms) {
      int s = 0;
      for (int a : alpha) s += a;
      d = std::max(d, s);
    }
    return d;
  }

  cplx operator()(const CVec& w) const {
    cplx acc = 0.0;
    for (const auto& [alpha, c] : terms) {
      cplx t = c;
      for (std::size_t i = 0; i < vars; ++i) t *= std::pow(w(static_cast<Eigen::Index>(i)), alpha[i]);
      acc += t;
    }
    return acc;
  }
};

namespace detail {

inline MultiPoly multiply_truncated(const MultiPoly& a, const MultiPoly& b, int order) {
  MultiPoly out{a.vars, {}};
  for (const auto& [ai, ac] : a.terms)
    for (const auto& [bi, bc] : b.terms) {
      std::vector<int> idx(a.vars);
      int deg = 0;
      for (std::size_t i = 0; i < a.vars; ++i) deg += (idx[i] = ai[i] + bi[i]);
      if (deg <= order) out.terms[idx] += ac * bc;
    }
  return out;
}

// Univariate truncated series product.
inline Poly series_multiply(const Poly& a, const Poly& b, std::size_t count) {
  Poly out(count, cplx{0.0});
  for (std::size_t i = 0; i < a.size() && i < count; ++i)
    for (std::size_t j = 0; j < b.size() && i + j < count; ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace detail

/// Holomorphic map given by its Taylor polynomial of total degree `order`
/// around `center`: component i is a polynomial in (z - center).
struct AnalyticMapSeries {
  CVec center;
  std::vector<MultiPoly> components;
  int order = 0;

  std::size_t source_dim() const noexcept { return static_cast<std::size_t>(center.size()); }
  std::size_t target_dim() const noexcept { return components.size(); }

  CVec operator()(const CVec& z) const {
    const CVec w = z - center;
    CVec out(static_cast<Eigen::Index>(target_dim()));
    for (std::size_t i = 0; i < target_dim(); ++i) out(static_cast<Eigen::Index>(i)) = components[i](w);
    return out;
  }

  CVec image_of_center() const {
    CVec out(static_cast<Eigen::Index>(target_dim()));
    const std::vector<int> zero(source_dim(), 0);
    for (std::size_t i = 0; i < target_dim(); ++i) {
      auto it = components[i].terms.find(zero);
      out(static_cast<Eigen::Index>(i)) = it == components[i].terms.end() ? cplx{0.0} : it->second;
    }
    return out;
  }

  static AnalyticMapSeries identity(const CVec& center, int order) {
    return affine(Eigen::MatrixXcd::Identity(center.size(), center.size()), center, center, order);
  }

  /// z -> value_at_center + A (z - center).
  static AnalyticMapSeries affine(const Eigen::MatrixXcd& A, const CVec& center, const CVec& value_at_center,
                                  int order) {
    detail::require(A.cols() == center.size() && A.rows() == value_at_center.size(), Errc::InvalidInput,
                    "affine map dimension mismatch");
    AnalyticMapSeries phi{center, {}, order};
    const auto n = static_cast<std::size_t>(center.size());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      MultiPoly p{n, {}};
      if (value_at_center(i) != cplx{0.0}) p.terms[std::vector<int>(n, 0)] = value_at_center(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (A(i, static_cast<Eigen::Index>(j)) == cplx{0.0}) continue;
        std::vector<int> alpha(n, 0);
        alpha[j] = 1;
        p.terms[alpha] = A(i, static_cast<Eigen::Index>(j));
      }
      phi.components.push_back(std::move(p));
    }
    return phi;
  }
};

/// Truncated Taylor series of outer o inner at inner.center; requires
/// outer.center == inner(inner.center).
inline AnalyticMapSeries compose(const AnalyticMapSeries& outer, const AnalyticMapSeries& inner) {
  detail::require(outer.source_dim() == inner.target_dim(), Errc::InvalidInput, "composition dimension mismatch");
  detail::require((outer.center - inner.image_of_center()).norm() <= 1e-12 * (1.0 + outer.center.norm()),
                  Errc::InvalidInput, "outer series must be centered at the image of the inner center");
  const int order = std::min(outer.order, inner.order);
  const std::size_t n = inner.source_dim();
  // inner components minus their constant terms
  std::vector<MultiPoly> shifted;
  for (const auto& p : inner.components) {
    MultiPoly q = p;
    q.terms.erase(std::vector<int>(n, 0));
    shifted.push_back(std::move(q));
  }
  AnalyticMapSeries out{inner.center, {}, order};
  for (const auto& p : outer.components) {
    MultiPoly acc{n, {}};
    for (const auto& [alpha, coeff] : p.terms) {
      MultiPoly term{n, {{std::vector<int>(n, 0), coeff}}};
      for (std::size_t i = 0; i < alpha.size(); ++i)
        for (int e = 0; e < alpha[i]; ++e) term = detail::multiply_truncated(term, shifted[i], order);
      for (const auto& [idx, c] : term.terms) acc.terms[idx] += c;
    }
    out.components.push_back(std::move(acc));
  }
  return out;
}

/// Order-k jet of phi o g at phi(p), where g is any disc with J^k(g) = xi.
inline JetVector jet_pushforward(const AnalyticMapSeries& phi, const JetVector& xi) {
  const std::size_t k = xi.order();
  detail::require(phi.order >= static_cast<int>(k), Errc::InvalidInput,
                  "map series order " + std::to_string(phi.order) + " below jet order " + std::to_string(k));
  detail::require(phi.source_dim() == xi.dim(), Errc::InvalidInput, "map source dimension mismatch");
  detail::require((phi.center - xi.point).norm() <= 1e-12 * (1.0 + xi.point.norm()), Errc::InvalidInput,
                  "map series must be centered at the jet base point");
  const std::size_t n = xi.dim();
  const std::size_t count = k + 1;
  // Representative g(zeta) - p = sum_j xi_j / j! zeta^j, per source coordinate.
  std::vector<Poly> g(n, Poly(count, cplx{0.0}));
  for (std::size_t j = 1; j <= k; ++j)
    for (std::size_t i = 0; i < n; ++i) g[i][j] = xi[j](static_cast<Eigen::Index>(i)) / factorial(j);

  std::vector<CVec> comps(k, CVec::Zero(static_cast<Eigen::Index>(phi.target_dim())));
  CVec base(static_cast<Eigen::Index>(phi.target_dim()));
  for (std::size_t t = 0; t < phi.target_dim(); ++t) {
    Poly acc(count, cplx{0.0});
    for (const auto& [alpha, coeff] : phi.components[t].terms) {
      Poly term(count, cplx{0.0});
      term[0] = coeff;
      for (std::size_t i = 0; i < n; ++i)
        for (int e = 0; e < alpha[i]; ++e) term = detail::series_multiply(term, g[i], count);
      for (std::size_t j = 0; j < count; ++j) acc[j] += term[j];
    }
    base(static_cast<Eigen::Index>(t)) = acc[0];
    for (std::size_t j = 1; j <= k; ++j) comps[j - 1](static_cast<Eigen::Index>(t)) = acc[j] * factorial(j);
  }
  return JetVector(base, std::move(comps));
}

}  // namespace kjet
