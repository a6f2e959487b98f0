#pragma once

#include <stdexcept>
#include <string>

namespace ftn {

// Base for everything this library throws on contract violations.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// delta*(1+beta) < 1: the folded spectrum vanishes on a set of positive
// measure and the capacity formulas here do not apply.
struct MazoRegion : Error {
  using Error::Error;
};

// Gram matrix condition number above the cap; inverting it would return
// garbage capacities, so we refuse instead of clamping eigenvalues.
struct IllConditioned : Error {
  using Error::Error;
};

struct NotPSD : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Dense-algebra size cap exceeded (block-form / FS time-domain evaluators).
struct DimensionCap : Error {
  using Error::Error;
};

struct NoPositiveGain : Error {
  using Error::Error;
};

struct NonPositiveWeight : Error {
  using Error::Error;
};

// Folded spectrum vanished at an interior grid point; the input spectrum
// quotient phi_i(f)/G_d(f) is undefined there.
struct SpectrumZero : Error {
  using Error::Error;
};

struct GridTooCoarse : Error {
  using Error::Error;
};

struct NotConverged : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace ftn
