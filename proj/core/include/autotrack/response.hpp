#pragma once

#include "autotrack/tensor.hpp"

namespace autotrack {

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

struct SubcellOffset {
  double dr = 0.0;
  double dc = 0.0;
};

/// Detection surface. Index (r, c) holds the response at circular lag (r, c);
/// a peak at (0, 0) means no displacement.
struct ResponseMap {
  Grid<double> values;
  Cell peak_pos;
  SubcellOffset peak_subcell;
  double peak_value = 0.0;
};

struct VariationVector {
  /// |relative change| per location, laid out with the previous peak at the
  /// map centre (rows/2, cols/2) so it lines up with the filter's spatial grid.
  Grid<double> pi;
  double global_norm = 0.0;
};

/// Wraps values into a ResponseMap: finds the maximum (ties go to the smallest
/// row, then column) and its sub-cell refinement.
ResponseMap make_response(Grid<double> values);

/// R = IDFT(sum_k z^k * conj(g^k)). Throws Errc::BankShapeMismatch.
ResponseMap detect(const SpectralBank& z_hat, const SpectralBank& g_hat);

/// 1-D quadratic vertex through the peak and its circular neighbours, per
/// axis, clamped inside (-0.5, 0.5). Non-concave neighbourhoods give 0.
SubcellOffset subcell_peak(const ResponseMap& r);

/// Peak lag wrapped to (-rows/2, rows/2] x (-cols/2, cols/2], plus sub-cell offset.
SubcellOffset peak_displacement(const ResponseMap& r);

/// out(r + dr, c + dc) = in(r, c), indices modulo the map shape.
Grid<double> circular_shift(const Grid<double>& in, int dr, int dc);

/// Local response variation between peak-aligned maps and its Euclidean norm.
VariationVector local_variation(const ResponseMap& curr, const ResponseMap& prev);

}  // namespace autotrack
