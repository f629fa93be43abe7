#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riseg {

enum class ErrorCode {
  CollinearTriplet,
  TripletTooWide,
  DegenerateDt,
  RotationNearPi,
  PlacementFailure,
  NoContact,
  MismatchedScenes,
  EmptyInput,
  InsufficientFrames,
  ClassStarvation,
  ShapeMismatch,
  NoGtObjects,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the episode runner in particular) can record a reason and move on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace riseg
