#include "autotrack/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "autotrack/error.hpp"

namespace autotrack {

namespace {
// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft2Plan::Impl {
  int rows;
  int cols;
  fftw_complex* in;
  fftw_complex* out;
  fftw_plan fwd;
  fftw_plan inv;

  Impl(int r, int c) : rows(r), cols(c) {
    std::lock_guard lock(planner_mutex());
    const size_t n = static_cast<size_t>(r) * c;
    in = fftw_alloc_complex(n);
    out = fftw_alloc_complex(n);
    fwd = fftw_plan_dft_2d(r, c, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    inv = fftw_plan_dft_2d(r, c, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(in);
    fftw_free(out);
  }
  size_t size() const { return static_cast<size_t>(rows) * cols; }
};

Fft2Plan::Fft2Plan(int rows, int cols) {
  if (rows < 1 || cols < 1) throw Error(Errc::InvalidArgument, "transform shape must be positive");
  impl_ = std::make_unique<Impl>(rows, cols);
}
Fft2Plan::~Fft2Plan() = default;
Fft2Plan::Fft2Plan(Fft2Plan&&) noexcept = default;
Fft2Plan& Fft2Plan::operator=(Fft2Plan&&) noexcept = default;

int Fft2Plan::rows() const noexcept { return impl_->rows; }
int Fft2Plan::cols() const noexcept { return impl_->cols; }

void Fft2Plan::forward(std::span<const double> in, std::span<Complex> out) {
  const size_t n = impl_->size();
  for (size_t i = 0; i < n; ++i) {
    impl_->in[i][0] = in[i];
    impl_->in[i][1] = 0.0;
  }
  fftw_execute(impl_->fwd);
  for (size_t i = 0; i < n; ++i) out[i] = {impl_->out[i][0], impl_->out[i][1]};
}

void Fft2Plan::forward(std::span<const Complex> in, std::span<Complex> out) {
  const size_t n = impl_->size();
  for (size_t i = 0; i < n; ++i) {
    impl_->in[i][0] = in[i].real();
    impl_->in[i][1] = in[i].imag();
  }
  fftw_execute(impl_->fwd);
  for (size_t i = 0; i < n; ++i) out[i] = {impl_->out[i][0], impl_->out[i][1]};
}

void Fft2Plan::inverse(std::span<const Complex> in, std::span<Complex> out) {
  const size_t n = impl_->size();
  for (size_t i = 0; i < n; ++i) {
    impl_->in[i][0] = in[i].real();
    impl_->in[i][1] = in[i].imag();
  }
  fftw_execute(impl_->inv);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) out[i] = {impl_->out[i][0] * scale, impl_->out[i][1] * scale};
}

Fft2Plan& plan_for(int rows, int cols) {
  thread_local std::map<std::pair<int, int>, Fft2Plan> cache;
  auto it = cache.find({rows, cols});
  if (it == cache.end()) it = cache.emplace(std::pair{rows, cols}, Fft2Plan(rows, cols)).first;
  return it->second;
}

SpectralBank dft2(const FeatureTensor& t) {
  SpectralBank out(t.rows(), t.cols(), t.channels());
  if (t.empty()) return out;
  Fft2Plan& plan = plan_for(t.rows(), t.cols());
  for (int k = 0; k < t.channels(); ++k) plan.forward(t.channel(k), out.channel(k));
  return out;
}

Grid<Complex> dft2(const Grid<double>& g) {
  Grid<Complex> out(g.rows(), g.cols());
  if (g.empty()) return out;
  plan_for(g.rows(), g.cols()).forward(g.values(), out.values());
  return out;
}

namespace {
void take_real(std::span<const Complex> z, std::span<double> out) {
  double re2 = 0.0;
  double im2 = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    re2 += z[i].real() * z[i].real();
    im2 += z[i].imag() * z[i].imag();
    out[i] = z[i].real();
  }
  if (std::sqrt(im2) > 1e-6 * std::sqrt(re2 + im2)) {
    throw Error(Errc::NonRealInverse, "imaginary residual " + std::to_string(std::sqrt(im2)));
  }
}
}  // namespace

FeatureTensor idft2_real(const SpectralBank& b) {
  FeatureTensor out(b.rows(), b.cols(), b.channels());
  if (b.empty()) return out;
  Fft2Plan& plan = plan_for(b.rows(), b.cols());
  std::vector<Complex> scratch(b.plane_size());
  for (int k = 0; k < b.channels(); ++k) {
    plan.inverse(b.channel(k), scratch);
    take_real(scratch, out.channel(k));
  }
  return out;
}

Grid<double> idft2_real(const Grid<Complex>& g) {
  Grid<double> out(g.rows(), g.cols());
  if (g.empty()) return out;
  std::vector<Complex> scratch(g.size());
  plan_for(g.rows(), g.cols()).inverse(g.values(), scratch);
  take_real(scratch, out.values());
  return out;
}

double parseval_norm(const SpectralBank& b) {
  double s = 0.0;
  for (const Complex& z : b.values()) s += std::norm(z);
  return s;
}

}  // namespace autotrack
