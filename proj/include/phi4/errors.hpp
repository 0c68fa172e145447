#pragma once

#include <stdexcept>
#include <string>

namespace phi4 {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonHermitianInput : Error { using Error::Error; };
struct ThetaOutOfRange : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct BlockIndexOutOfRange : Error { using Error::Error; };
struct UnknownInequality : Error { using Error::Error; };
struct FitFailed : Error { using Error::Error; };
struct NegativeTime : Error { using Error::Error; };
struct TimeOutOfRange : Error { using Error::Error; };
struct QuadratureNotConverged : Error { using Error::Error; };
struct NonIncreasingTimes : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct DivergentKernel : Error { using Error::Error; };
struct TooFewRealizations : Error { using Error::Error; };
struct PicardDiverged : Error { using Error::Error; };
struct SolverAbort : Error { using Error::Error; };
struct IncommensurateGrids : Error { using Error::Error; };
struct NestingViolation : Error { using Error::Error; };

}  // namespace phi4
