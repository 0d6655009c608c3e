#pragma once

#include <memory>
#include <span>

#include "autotrack/tensor.hpp"

namespace autotrack {

/// 2-D complex transform plan for one fixed shape. Forward is unscaled,
/// inverse is scaled by 1/(rows*cols). A plan owns scratch buffers, so a
/// single instance must not be used from two threads at once.
class Fft2Plan {
 public:
  Fft2Plan(int rows, int cols);
  ~Fft2Plan();
  Fft2Plan(Fft2Plan&&) noexcept;
  Fft2Plan& operator=(Fft2Plan&&) noexcept;
  Fft2Plan(const Fft2Plan&) = delete;
  Fft2Plan& operator=(const Fft2Plan&) = delete;

  int rows() const noexcept;
  int cols() const noexcept;

  void forward(std::span<const double> in, std::span<Complex> out);
  void forward(std::span<const Complex> in, std::span<Complex> out);
  void inverse(std::span<const Complex> in, std::span<Complex> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Per-thread cached plan for a shape.
Fft2Plan& plan_for(int rows, int cols);

/// Per-channel forward transform.
SpectralBank dft2(const FeatureTensor& t);
Grid<Complex> dft2(const Grid<double>& g);

/// Per-channel inverse transform, keeping the real part. Throws
/// Errc::NonRealInverse when the imaginary residual exceeds 1e-6 of the
/// result's norm.
FeatureTensor idft2_real(const SpectralBank& b);
Grid<double> idft2_real(const Grid<Complex>& g);

/// Sum of squared magnitudes; equals T * sum(x^2) for b = dft2(x).
double parseval_norm(const SpectralBank& b);

}  // namespace autotrack
