#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "kjet/circle.hpp"
#include "kjet/disc.hpp"

namespace kjet {

/// Polynomial disc whose boundary trace is the non-negative part of the
/// spectrum of u. Rejects u when its relative negative tail exceeds tol.
inline AnalyticDisc holomorphic_extension(const FourierSpectrum& s, double tol) {
  const double residual = negative_tail_residual(s);
  if (residual > tol)
    detail::fail(Errc::NotHolomorphic,
                 "negative tail " + std::to_string(residual) + " > " + std::to_string(tol));
  const double floor = 1e-15 * std::sqrt(s.total_energy());
  int top = 0;
  for (int j = s.max_index(); j > 0; --j)
    if (s.mode_energy(j) > floor * floor) { top = j; break; }
  std::vector<CVec> coeffs;
  coeffs.reserve(static_cast<std::size_t>(top) + 1);
  for (int j = 0; j <= top; ++j) coeffs.push_back(s.coefficient(j));
  return AnalyticDisc::polynomial(coeffs);
}

inline AnalyticDisc holomorphic_extension(const CircleFunction& u, double tol) {
  return holomorphic_extension(fourier_transform(u), tol);
}

}  // namespace kjet
