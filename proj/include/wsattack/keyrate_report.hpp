#pragma once

#include <stdexcept>
#include <string>

namespace wsa {

/// Raised when the decoy-state bounds cannot certify any secure
/// single-photon contribution at the given parameters.
class InfeasibleBound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum KeyRateFlag : unsigned {
  kFlagNone = 0,
  kFlagEstimatedInfeasible = 1u << 0,  // legitimate parties' analysis aborted
  kFlagTrueInfeasible = 1u << 1,       // analysis with the attacked intensities aborted
  kFlagBoundClamped = 1u << 2,         // some intermediate bound was clamped into range
  kFlagNegativeRate = 1u << 3,         // a bound evaluated below zero and was reported as 0
};

/// One sweep point of an estimated-vs-true key-rate evaluation. Both rates
/// are per emitted pulse pair and never negative.
template <class Quantities>
struct KeyRateEntry {
  double sweep_value = 0.0;
  double r_estimated = 0.0;
  double r_true = 0.0;
  Quantities estimated{};
  Quantities truth{};
  unsigned flags = kFlagNone;

  bool infeasible() const { return (flags & (kFlagEstimatedInfeasible | kFlagTrueInfeasible)) != 0; }
};

std::string describe_flags(unsigned flags);

}  // namespace wsa
