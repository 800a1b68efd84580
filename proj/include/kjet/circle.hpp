#pragma once

// Sampled functions on the unit circle and their discrete Fourier analysis:
// transforms, Hardy-space tail measurements, real completions and winding
// numbers. Samples live on the equispaced grid theta_m = 2*pi*m/N.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kjet/errors.hpp"

namespace kjet {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr std::size_t default_grid = 512;

inline bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

inline double grid_angle(std::size_t m, std::size_t N) noexcept {
  return two_pi * static_cast<double>(m) / static_cast<double>(N);
}

inline cplx unit(double theta) noexcept { return std::polar(1.0, theta); }

namespace detail {

// In-place iterative radix-2 transform; sign = -1 forward, +1 backward.
// No normalization.
inline void fft_inplace(std::span<cplx> a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // twiddles computed directly rather than by recurrence to keep 1e-15 accuracy
    for (std::size_t k = 0; k < half; ++k) {
      const cplx w = std::polar(1.0, sign * two_pi * static_cast<double>(k) / static_cast<double>(len));
      for (std::size_t i = k; i < n; i += len) {
        const cplx u = a[i];
        const cplx v = a[i + half] * w;
        a[i] = u + v;
        a[i + half] = u - v;
      }
    }
  }
}

}  // namespace detail

/// N samples of a map b(Delta) -> C^dim, stored component-major.
class CircleFunction {
 public:
  CircleFunction() = default;

  CircleFunction(std::size_t N, std::size_t dim) : N_(N), dim_(dim), data_(N * dim) {
    detail::require(is_power_of_two(N) && N >= 8, Errc::InvalidInput,
                    "grid size must be a power of two >= 8, got " + std::to_string(N));
    detail::require(dim >= 1, Errc::InvalidInput, "dimension must be >= 1");
  }

  /// Samples fn(theta) at every grid node. fn returns cplx (dim 1) or CVec.
  template <class Fn>
  static CircleFunction sample(std::size_t N, std::size_t dim, Fn&& fn) {
    CircleFunction u(N, dim);
    for (std::size_t m = 0; m < N; ++m) {
      const double t = grid_angle(m, N);
      if constexpr (std::is_convertible_v<decltype(fn(t)), cplx>) {
        u(m) = fn(t);
      } else {
        const CVec v = fn(t);
        detail::require(static_cast<std::size_t>(v.size()) == dim, Errc::InvalidInput,
                        "sampled vector has wrong dimension");
        for (std::size_t c = 0; c < dim; ++c) u(m, c) = v(static_cast<Eigen::Index>(c));
      }
    }
    u.validate();
    return u;
  }

  static CircleFunction scalar(std::vector<cplx> samples) {
    CircleFunction u(samples.size(), 1);
    u.data_ = std::move(samples);
    u.validate();
    return u;
  }

  std::size_t size() const noexcept { return N_; }
  std::size_t dim() const noexcept { return dim_; }
  bool is_scalar() const noexcept { return dim_ == 1; }

  cplx& operator()(std::size_t m, std::size_t comp = 0) { return data_[comp * N_ + m]; }
  const cplx& operator()(std::size_t m, std::size_t comp = 0) const { return data_[comp * N_ + m]; }

  std::span<cplx> component(std::size_t comp) { return {data_.data() + comp * N_, N_}; }
  std::span<const cplx> component(std::size_t comp) const { return {data_.data() + comp * N_, N_}; }

  CVec point(std::size_t m) const {
    CVec v(static_cast<Eigen::Index>(dim_));
    for (std::size_t c = 0; c < dim_; ++c) v(static_cast<Eigen::Index>(c)) = (*this)(m, c);
    return v;
  }

  double theta(std::size_t m) const noexcept { return grid_angle(m, N_); }

  /// Mean over the grid of ||u||^2.
  double mean_square() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return s / static_cast<double>(N_);
  }

  double max_abs_imag() const {
    double s = 0.0;
    for (const auto& z : data_) s = std::max(s, std::abs(z.imag()));
    return s;
  }

  std::vector<double> real_values(std::size_t comp = 0) const {
    std::vector<double> out(N_);
    for (std::size_t m = 0; m < N_; ++m) out[m] = (*this)(m, comp).real();
    return out;
  }

  void validate() const {
    for (const auto& z : data_)
      detail::require(std::isfinite(z.real()) && std::isfinite(z.imag()), Errc::InvalidInput,
                      "circle samples must be finite");
  }

 private:
  std::size_t N_ = 0;
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

/// Discrete Fourier coefficients c_j, j in [-N/2, N/2), per component, with
/// u(theta_m) = sum_j c_j e^{i j theta_m}.
class FourierSpectrum {
 public:
  FourierSpectrum() = default;
  FourierSpectrum(std::size_t N, std::size_t dim) : N_(N), dim_(dim), data_(N * dim) {}

  std::size_t size() const noexcept { return N_; }
  std::size_t dim() const noexcept { return dim_; }
  int min_index() const noexcept { return -static_cast<int>(N_ / 2); }
  int max_index() const noexcept { return static_cast<int>(N_ / 2) - 1; }

  cplx& operator()(int j, std::size_t comp = 0) { return data_[comp * N_ + slot(j)]; }
  const cplx& operator()(int j, std::size_t comp = 0) const { return data_[comp * N_ + slot(j)]; }

  CVec coefficient(int j) const {
    CVec v(static_cast<Eigen::Index>(dim_));
    for (std::size_t c = 0; c < dim_; ++c) v(static_cast<Eigen::Index>(c)) = (*this)(j, c);
    return v;
  }

  /// ||c_j||^2 summed over components.
  double mode_energy(int j) const {
    double s = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) s += std::norm((*this)(j, c));
    return s;
  }

  double total_energy() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return s;
  }

  std::span<cplx> raw_component(std::size_t comp) { return {data_.data() + comp * N_, N_}; }
  std::span<const cplx> raw_component(std::size_t comp) const { return {data_.data() + comp * N_, N_}; }

  /// CSV rows: j, then Re/Im of c_j for every component.
  void write_csv(std::ostream& os) const {
    os << "j";
    for (std::size_t c = 0; c < dim_; ++c) os << ",re" << c << ",im" << c;
    os << '\n';
    os.precision(17);
    for (int j = min_index(); j <= max_index(); ++j) {
      os << j;
      for (std::size_t c = 0; c < dim_; ++c) os << ',' << (*this)(j, c).real() << ',' << (*this)(j, c).imag();
      os << '\n';
    }
  }

 private:
  std::size_t slot(int j) const {
    detail::require(j >= min_index() && j <= max_index(), Errc::InvalidInput,
                    "Fourier index " + std::to_string(j) + " out of range");
    return j >= 0 ? static_cast<std::size_t>(j) : static_cast<std::size_t>(j + static_cast<int>(N_));
  }

  std::size_t N_ = 0;
  std::size_t dim_ = 0;
  std::vector<cplx> data_;  // FFT order per component
};

inline FourierSpectrum fourier_transform(const CircleFunction& u) {
  FourierSpectrum s(u.size(), u.dim());
  const double inv = 1.0 / static_cast<double>(u.size());
  for (std::size_t c = 0; c < u.dim(); ++c) {
    auto out = s.raw_component(c);
    std::copy(u.component(c).begin(), u.component(c).end(), out.begin());
    detail::fft_inplace(out, -1);
    for (auto& z : out) z *= inv;
  }
  return s;
}

inline CircleFunction inverse_transform(const FourierSpectrum& s) {
  CircleFunction u(s.size(), s.dim());
  for (std::size_t c = 0; c < s.dim(); ++c) {
    auto out = u.component(c);
    std::copy(s.raw_component(c).begin(), s.raw_component(c).end(), out.begin());
    detail::fft_inplace(out, +1);
  }
  return u;
}

/// Degree of a nonvanishing scalar circle map around the origin, from summed
/// principal-branch argument increments.
inline int winding_number(const CircleFunction& u, double min_modulus) {
  detail::require(u.is_scalar(), Errc::InvalidInput, "winding_number needs a scalar function");
  detail::require(min_modulus > 0.0, Errc::InvalidInput, "min_modulus must be positive");
  const std::size_t N = u.size();
  for (std::size_t m = 0; m < N; ++m)
    if (std::abs(u(m)) < min_modulus)
      detail::fail(Errc::NearZero, "|u| < " + std::to_string(min_modulus) + " at node " + std::to_string(m));
  double total = 0.0;
  for (std::size_t m = 0; m < N; ++m) {
    const double step = std::arg(u((m + 1) % N) / u(m));
    if (std::abs(step) > std::numbers::pi / 2)
      detail::fail(Errc::AliasRisk, "argument increment " + std::to_string(step) + " at node " +
                                        std::to_string(m) + "; refine the grid");
    total += step;
  }
  return static_cast<int>(std::lround(total / two_pi));
}

/// Real h with mean zero such that g + h has no negative Fourier modes. The
/// Nyquist mode j = -N/2 is its own conjugate partner, so only its real part
/// can be cancelled by a real function.
inline CircleFunction real_completion(const CircleFunction& g) {
  detail::require(g.is_scalar(), Errc::InvalidInput, "real_completion needs a scalar function");
  const FourierSpectrum G = fourier_transform(g);
  FourierSpectrum H(G.size(), 1);
  const int half = static_cast<int>(G.size() / 2);
  for (int j = 1; j < half; ++j) {
    H(-j) = -G(-j);
    H(j) = std::conj(H(-j));
  }
  H(-half) = -G(-half).real();
  CircleFunction h = inverse_transform(H);
  for (std::size_t m = 0; m < h.size(); ++m) h(m) = h(m).real();
  return h;
}

/// Relative spectral mass carried by negative modes, in [0, 1].
inline double negative_tail_residual(const FourierSpectrum& s) {
  const double total = s.total_energy();
  if (total == 0.0) detail::fail(Errc::ZeroFunction, "function has no spectral mass");
  double neg = 0.0;
  for (int j = s.min_index(); j < 0; ++j) neg += s.mode_energy(j);
  return std::sqrt(neg / total);
}

inline double negative_tail_residual(const CircleFunction& u) {
  return negative_tail_residual(fourier_transform(u));
}

/// Positive-mode counterpart, used to state the conjugation symmetry.
inline double positive_tail_residual(const FourierSpectrum& s) {
  const double total = s.total_energy();
  if (total == 0.0) detail::fail(Errc::ZeroFunction, "function has no spectral mass");
  double pos = 0.0;
  for (int j = 1; j <= s.max_index(); ++j) pos += s.mode_energy(j);
  // the Nyquist slot -N/2 reflects onto itself under j -> -j
  pos += s.mode_energy(s.min_index());
  return std::sqrt(pos / total);
}

inline CircleFunction conj(const CircleFunction& u) {
  CircleFunction v = u;
  for (std::size_t c = 0; c < u.dim(); ++c)
    for (auto& z : v.component(c)) z = std::conj(z);
  return v;
}

/// Pointwise product of two scalar circle functions on the same grid.
inline CircleFunction pointwise_product(const CircleFunction& a, const CircleFunction& b) {
  detail::require(a.is_scalar() && b.is_scalar() && a.size() == b.size(), Errc::InvalidInput,
                  "pointwise_product needs scalar functions on the same grid");
  CircleFunction out(a.size(), 1);
  for (std::size_t m = 0; m < a.size(); ++m) out(m) = a(m) * b(m);
  return out;
}

}  // namespace kjet
