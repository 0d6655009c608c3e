#pragma once

#include <cassert>
#include <complex>
#include <span>
#include <vector>

namespace autotrack {

using Complex = std::complex<double>;

/// Row-major 2-D array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int size() const noexcept { return rows_ * cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int r, int c) noexcept {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  const T& operator()(int r, int c) const noexcept {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  bool operator==(const Grid&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// Stack of `channels` row-major planes, each rows x cols. Channel-major
/// storage so a channel is one contiguous span (what the FFT consumes).
template <typename T>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int rows, int cols, int channels, T fill = T{})
      : rows_(rows),
        cols_(cols),
        channels_(channels),
        data_(static_cast<size_t>(rows) * cols * channels, fill) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int channels() const noexcept { return channels_; }
  int plane_size() const noexcept { return rows_ * cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int r, int c, int k) noexcept {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_ && k >= 0 && k < channels_);
    return data_[(static_cast<size_t>(k) * rows_ + r) * cols_ + c];
  }
  const T& operator()(int r, int c, int k) const noexcept {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_ && k >= 0 && k < channels_);
    return data_[(static_cast<size_t>(k) * rows_ + r) * cols_ + c];
  }

  std::span<T> channel(int k) noexcept {
    return std::span<T>(data_).subspan(static_cast<size_t>(k) * plane_size(), plane_size());
  }
  std::span<const T> channel(int k) const noexcept {
    return std::span<const T>(data_).subspan(static_cast<size_t>(k) * plane_size(),
                                             plane_size());
  }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Tensor3<U>& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols() && channels_ == other.channels();
  }

  bool operator==(const Tensor3&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int channels_ = 0;
  std::vector<T> data_;
};

/// H_f x W_f x K real feature stack (also used for spatial filters).
using FeatureTensor = Tensor3<double>;
/// Per-channel 2-D spectra of a FeatureTensor.
using SpectralBank = Tensor3<Complex>;

}  // namespace autotrack
