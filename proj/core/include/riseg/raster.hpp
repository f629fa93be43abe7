#pragma once

#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

namespace riseg {

/// Integer pixel index, row-major image convention.
struct PixelIndex {
  int row = 0;
  int col = 0;

  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
  friend auto operator<=>(const PixelIndex&, const PixelIndex&) = default;
};

/// Sub-pixel image coordinate. Integer values are pixel centers.
struct PixelCoord {
  double row = 0.0;
  double col = 0.0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int r, int c) const noexcept { return r >= 0 && c >= 0 && r < rows_ && c < cols_; }
  bool contains(PixelIndex p) const noexcept { return contains(p.row, p.col); }

  T& operator()(int r, int c) {
    assert(contains(r, c));
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  const T& operator()(int r, int c) const {
    assert(contains(r, c));
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  T& operator[](PixelIndex p) { return (*this)(p.row, p.col); }
  const T& operator[](PixelIndex p) const { return (*this)(p.row, p.col); }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool same_shape(const auto& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using Label = std::uint16_t;

/// Pixel-wise object id; 0 is background.
using LabelMask = Grid<Label>;

/// Objectness confidence in [0, 255].
using UncertaintyMap = Grid<std::uint8_t>;

/// Dense forward optical flow in pixels. `du` is the column (x) component,
/// `dv` the row (y) component.
struct FlowField {
  Grid<double> du;
  Grid<double> dv;

  FlowField() = default;
  FlowField(int rows, int cols) : du(rows, cols, 0.0), dv(rows, cols, 0.0) {}

  int rows() const noexcept { return du.rows(); }
  int cols() const noexcept { return du.cols(); }

  friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// Distinct positive labels in ascending order.
std::vector<Label> positive_labels(const LabelMask& mask);

/// Bilinear sample of a flow field at a sub-pixel location, clamped to the
/// image. Returns (du, dv).
std::pair<double, double> sample_flow(const FlowField& flow, PixelCoord at);

}  // namespace riseg
