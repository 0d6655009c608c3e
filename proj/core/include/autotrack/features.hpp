#pragma once

#include <vector>

#include "autotrack/imaging.hpp"
#include "autotrack/tensor.hpp"

namespace autotrack {

inline constexpr int kFhogChannels = 31;

struct FeatureOptions {
  bool fhog = true;
  bool grayscale = true;

  int channel_count() const noexcept { return (fhog ? kFhogChannels : 0) + (grayscale ? 1 : 0); }
  bool operator==(const FeatureOptions&) const = default;
};

/// Cell-grid features of a patch: 31 Felzenszwalb HOG channels (18 signed
/// orientations, 9 unsigned, 4 texture energies) followed by the cell mean of
/// (gray/255 - 0.5). Patches whose sides are not multiples of `cell_size` are
/// padded by edge replication on the right/bottom.
///
/// Throws Errc::PatchTooSmall when either side is shorter than one cell.
FeatureTensor extract_features(const Frame& patch, int cell_size, const FeatureOptions& options = {});

/// Symmetric Hann window; length 1 yields {1}.
std::vector<double> hann_window(int length);

/// Multiplies every channel by the outer product of row and column Hann windows.
FeatureTensor apply_window(const FeatureTensor& features);

}  // namespace autotrack
