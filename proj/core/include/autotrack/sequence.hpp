#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autotrack/imaging.hpp"

namespace autotrack {

/// A tracking sequence. Frames come either from files (decoded on demand) or
/// from memory (synthetic sequences); `frames` takes precedence when set.
struct Sequence {
  std::string name;
  std::vector<std::filesystem::path> frame_paths;
  std::vector<Frame> frames;
  std::vector<BBox> groundtruth;  // NaN-filled where absent
  std::vector<std::string> attributes;

  size_t size() const noexcept { return frames.empty() ? frame_paths.size() : frames.size(); }
  Frame frame(size_t i) const;
};

/// Reads `dir/img/*` (sorted numerically by file stem) and
/// `dir/groundtruth_rect.txt`. An optional `attributes.txt` holds
/// comma-separated tags. Throws Errc::SequenceMalformed / Errc::GtLengthMismatch.
Sequence load_sequence(const std::filesystem::path& dir);

/// Every immediate subdirectory of `dir` that holds an img/ folder, in name order.
std::vector<Sequence> load_dataset(const std::filesystem::path& dir);

/// Writes the layout load_sequence reads. File-backed frames are copied
/// verbatim; in-memory frames are encoded as PNG.
void write_sequence(const Sequence& seq, const std::filesystem::path& dir);

/// "x,y,w,h" per line, 1-based, comma or tab separated.
std::vector<BBox> parse_groundtruth(std::string_view text);
std::string format_groundtruth(const std::vector<BBox>& boxes);

Frame read_image(const std::filesystem::path& path);
void write_png(const Frame& frame, const std::filesystem::path& path);

}  // namespace autotrack
