#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kjet {

enum class Errc {
  InvalidInput,
  // circle analysis
  NearZero,
  AliasRisk,
  ZeroFunction,
  NotHolomorphic,
  // jets
  AllZero,
  // domains
  NonPositiveCoefficient,
  DegenerateRay,
  // discs
  OutsideClosedDisc,
  ModulusNotLessThanOne,
  BadLambda,
  NotSelfMap,
  NotCentered,
  // metric
  OutsideDomain,
  BasePointNotZero,
  InfeasibleAtZero,
  NotConverged,
  // stationarity
  NonzeroWinding,
  NotOnBoundary,
  VanishingGradient,
  ResidualAboveTolerance,
  NotCertifiedStationary,
  ProbeFailed,
  ZeroJet,
};

constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::NearZero: return "NearZero";
    case Errc::AliasRisk: return "AliasRisk";
    case Errc::ZeroFunction: return "ZeroFunction";
    case Errc::NotHolomorphic: return "NotHolomorphic";
    case Errc::AllZero: return "AllZero";
    case Errc::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case Errc::DegenerateRay: return "DegenerateRay";
    case Errc::OutsideClosedDisc: return "OutsideClosedDisc";
    case Errc::ModulusNotLessThanOne: return "ModulusNotLessThanOne";
    case Errc::BadLambda: return "BadLambda";
    case Errc::NotSelfMap: return "NotSelfMap";
    case Errc::NotCentered: return "NotCentered";
    case Errc::OutsideDomain: return "OutsideDomain";
    case Errc::BasePointNotZero: return "BasePointNotZero";
    case Errc::InfeasibleAtZero: return "InfeasibleAtZero";
    case Errc::NotConverged: return "NotConverged";
    case Errc::NonzeroWinding: return "NonzeroWinding";
    case Errc::NotOnBoundary: return "NotOnBoundary";
    case Errc::VanishingGradient: return "VanishingGradient";
    case Errc::ResidualAboveTolerance: return "ResidualAboveTolerance";
    case Errc::NotCertifiedStationary: return "NotCertifiedStationary";
    case Errc::ProbeFailed: return "ProbeFailed";
    case Errc::ZeroJet: return "ZeroJet";
  }
  return "Unknown";
}

/// Base of every error raised by the library. `code()` identifies the
/// failure; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// The winding obstruction to scalar stationarity.
class NonzeroWinding : public Error {
 public:
  explicit NonzeroWinding(int winding)
      : Error(Errc::NonzeroWinding, "winding number " + std::to_string(winding)),
        winding_(winding) {}

  int winding() const noexcept { return winding_; }

 private:
  int winding_;
};

/// Certificate search ran but could not push the residual under tolerance.
class ResidualAboveTolerance : public Error {
 public:
  ResidualAboveTolerance(double best, double tol)
      : Error(Errc::ResidualAboveTolerance,
              "best residual " + std::to_string(best) + " > tolerance " + std::to_string(tol)),
        best_(best) {}

  double best() const noexcept { return best_; }

 private:
  double best_;
};

namespace detail {

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace detail
}  // namespace kjet
