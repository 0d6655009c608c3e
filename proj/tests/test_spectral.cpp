#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "autotrack/error.hpp"
#include "autotrack/spectral.hpp"
#include "support.hpp"

using namespace autotrack;
using namespace autotrack::testing;

namespace {

double rel_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

}  // namespace

TEST(Spectral, ZerosMapToZeros) {
  const SpectralBank b = dft2(FeatureTensor(5, 7, 3));
  for (const Complex& z : b.values()) EXPECT_EQ(z, Complex(0.0, 0.0));
  EXPECT_EQ(parseval_norm(b), 0.0);
}

TEST(Spectral, ImpulseHasFlatSpectrum) {
  Grid<double> g(6, 9);
  g(0, 0) = 1.0;
  const Grid<Complex> s = dft2(g);
  for (const Complex& z : s.values()) {
    EXPECT_NEAR(z.real(), 1.0, 1e-15);
    EXPECT_NEAR(z.imag(), 0.0, 1e-15);
  }
  FeatureTensor t(6, 9, 1);
  t(0, 0, 0) = 1.0;
  EXPECT_NEAR(parseval_norm(dft2(t)), 54.0, 1e-12);
}

TEST(Spectral, InverseOfOnesIsUnitImpulse) {
  const Grid<double> g = idft2_real(Grid<Complex>(4, 4, Complex(1.0, 0.0)));
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(g(r, c), (r == 0 && c == 0) ? 1.0 : 0.0, 1e-15);
  }
}

TEST(Spectral, MatchesNaiveDftOn8x8) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const Grid<double> x = random_grid(8, 8, rng);
    const Grid<Complex> fast = dft2(x);
    const Grid<Complex> slow = naive_dft2(to_complex(x));
    EXPECT_LT(rel_diff(fast.values(), slow.values()), 1e-10);
  }
}

TEST(Spectral, MatchesNaiveDftOnOddShapes) {
  std::mt19937_64 rng(2);
  const Grid<double> x = random_grid(5, 11, rng);
  EXPECT_LT(rel_diff(dft2(x).values(), naive_dft2(to_complex(x)).values()), 1e-10);
}

TEST(Spectral, RoundTripParsevalLinearityUpTo64) {
  std::mt19937_64 rng(3);
  for (auto [h, w] : {std::pair{1, 1}, {3, 5}, {16, 16}, {31, 17}, {64, 64}}) {
    const FeatureTensor x = random_tensor(h, w, 4, rng);
    const FeatureTensor y = random_tensor(h, w, 4, rng);
    const SpectralBank xs = dft2(x);
    const FeatureTensor back = idft2_real(xs);
    double err = 0.0, norm = 0.0, sq = 0.0;
    for (size_t i = 0; i < x.values().size(); ++i) {
      err = std::max(err, std::abs(back.values()[i] - x.values()[i]));
      norm = std::max(norm, std::abs(x.values()[i]));
      sq += x.values()[i] * x.values()[i];
    }
    EXPECT_LT(err / norm, 1e-10) << h << "x" << w;
    EXPECT_NEAR(parseval_norm(xs) / (h * w), sq, 1e-10 * sq);

    FeatureTensor comb(h, w, 4);
    for (size_t i = 0; i < comb.values().size(); ++i) {
      comb.values()[i] = 2.5 * x.values()[i] - 0.75 * y.values()[i];
    }
    const SpectralBank ys = dft2(y);
    SpectralBank expect(h, w, 4);
    for (size_t i = 0; i < expect.values().size(); ++i) {
      expect.values()[i] = 2.5 * xs.values()[i] - 0.75 * ys.values()[i];
    }
    EXPECT_LT(rel_diff(dft2(comb).values(), expect.values()), 1e-10);
  }
}

TEST(Spectral, ProductIsCircularConvolution) {
  std::mt19937_64 rng(4);
  for (auto [h, w] : {std::pair{4, 4}, {7, 5}, {16, 16}}) {
    const Grid<double> a = random_grid(h, w, rng);
    const Grid<double> b = random_grid(h, w, rng);
    const Grid<Complex> as = dft2(a);
    const Grid<Complex> bs = dft2(b);
    Grid<Complex> prod(h, w);
    for (int i = 0; i < prod.size(); ++i) prod.values()[i] = as.values()[i] * bs.values()[i];
    const Grid<double> fast = idft2_real(prod);
    double worst = 0.0, scale = 0.0;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double s = 0.0;
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) s += a(i, j) * b(((r - i) % h + h) % h, ((c - j) % w + w) % w);
        }
        worst = std::max(worst, std::abs(s - fast(r, c)));
        scale = std::max(scale, std::abs(s));
      }
    }
    EXPECT_LT(worst / scale, 1e-10);
  }
}

TEST(Spectral, ConjugateProductIsCorrelation) {
  std::mt19937_64 rng(5);
  const FeatureTensor z = random_tensor(6, 8, 3, rng);
  const FeatureTensor g = random_tensor(6, 8, 3, rng);
  const SpectralBank zs = dft2(z);
  const SpectralBank gs = dft2(g);
  Grid<Complex> acc(6, 8);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 48; ++j) acc.values()[j] += zs.channel(k)[j] * std::conj(gs.channel(k)[j]);
  }
  const Grid<double> fast = idft2_real(acc);
  const Grid<double> slow = spatial_correlation(z, g);
  for (int i = 0; i < 48; ++i) EXPECT_NEAR(fast.values()[i], slow.values()[i], 1e-10);
}

TEST(Spectral, NonRealInverseIsRejected) {
  Grid<Complex> g(4, 4);
  g(0, 1) = Complex(0.0, 1.0);  // no conjugate partner
  try {
    idft2_real(g);
    FAIL() << "expected non-real-inverse";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonRealInverse);
  }
}

TEST(Spectral, PlansAreUsableFromSeveralThreads) {
  std::mt19937_64 rng(6);
  const FeatureTensor x = random_tensor(20, 24, 2, rng);
  const SpectralBank ref = dft2(x);
  std::vector<std::thread> pool;
  std::vector<int> ok(4, 0);
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      bool same = true;
      for (int rep = 0; rep < 20; ++rep) same = same && dft2(x) == ref;
      ok[t] = same;
    });
  }
  for (auto& th : pool) th.join();
  for (int v : ok) EXPECT_TRUE(v);
}
