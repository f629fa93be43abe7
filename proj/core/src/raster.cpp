#include "riseg/raster.hpp"

#include <algorithm>
#include <cmath>

#include "riseg/errors.hpp"

namespace riseg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CollinearTriplet: return "CollinearTriplet";
    case ErrorCode::TripletTooWide: return "TripletTooWide";
    case ErrorCode::DegenerateDt: return "DegenerateDt";
    case ErrorCode::RotationNearPi: return "RotationNearPi";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::NoContact: return "NoContact";
    case ErrorCode::MismatchedScenes: return "MismatchedScenes";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientFrames: return "InsufficientFrames";
    case ErrorCode::ClassStarvation: return "ClassStarvation";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoGtObjects: return "NoGtObjects";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::vector<Label> positive_labels(const LabelMask& mask) {
  std::vector<bool> seen(65536, false);
  for (Label l : mask.data()) seen[l] = true;
  std::vector<Label> out;
  for (std::size_t l = 1; l < seen.size(); ++l)
    if (seen[l]) out.push_back(static_cast<Label>(l));
  return out;
}

std::pair<double, double> sample_flow(const FlowField& flow, PixelCoord at) {
  const int rows = flow.rows(), cols = flow.cols();
  const double r = std::clamp(at.row, 0.0, static_cast<double>(rows - 1));
  const double c = std::clamp(at.col, 0.0, static_cast<double>(cols - 1));
  const int r0 = static_cast<int>(std::floor(r));
  const int c0 = static_cast<int>(std::floor(c));
  const int r1 = std::min(r0 + 1, rows - 1);
  const int c1 = std::min(c0 + 1, cols - 1);
  const double fr = r - r0, fc = c - c0;
  auto lerp2 = [&](const Grid<double>& g) {
    const double top = (1.0 - fc) * g(r0, c0) + fc * g(r0, c1);
    const double bot = (1.0 - fc) * g(r1, c0) + fc * g(r1, c1);
    return (1.0 - fr) * top + fr * bot;
  };
  return {lerp2(flow.du), lerp2(flow.dv)};
}

}  // namespace riseg
