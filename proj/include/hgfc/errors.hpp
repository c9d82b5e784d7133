#ifndef HGFC_ERRORS_HPP
#define HGFC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hgfc {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A release or length is not an integer multiple of the slot width.
struct NonCommensurate : Error {
  using Error::Error;
};

struct InfeasibleSchedule : Error {
  using Error::Error;
};

struct IncompleteSchedule : Error {
  using Error::Error;
};

struct NotDifferentiable : Error {
  using Error::Error;
};

struct UnboundedCurvature : Error {
  using Error::Error;
};

struct UnboundedTheta : Error {
  using Error::Error;
};

// Speed cannot be written as a small-denominator rational, so slot
// capacities would not be integral.
struct NonIntegralCapacity : Error {
  using Error::Error;
};

struct InfeasibleNetwork : Error {
  using Error::Error;
};

struct NonOptimalInput : Error {
  using Error::Error;
};

struct TooLarge : Error {
  using Error::Error;
};

struct OffGrid : Error {
  using Error::Error;
};

struct NonConvexCost : Error {
  using Error::Error;
};

struct NegativeHeight : Error {
  using Error::Error;
};

struct BadConfig : Error {
  using Error::Error;
};

}  // namespace hgfc

#endif
