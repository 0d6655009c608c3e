#include "autotrack/sequence.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "autotrack/error.hpp"

namespace fs = std::filesystem;

namespace autotrack {

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::SequenceMalformed, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_field(std::string_view s, int line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "NaN" || s == "nan" || s == "NAN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::SequenceMalformed,
                "ground truth line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

// Numeric stems sort by value; anything else falls back to name order.
bool frame_order(const fs::path& a, const fs::path& b) {
  const std::string sa = a.stem().string();
  const std::string sb = b.stem().string();
  long long na = 0;
  long long nb = 0;
  const auto ra = std::from_chars(sa.data(), sa.data() + sa.size(), na);
  const auto rb = std::from_chars(sb.data(), sb.data() + sb.size(), nb);
  const bool a_num = ra.ec == std::errc() && ra.ptr == sa.data() + sa.size();
  const bool b_num = rb.ec == std::errc() && rb.ptr == sb.data() + sb.size();
  if (a_num && b_num && na != nb) return na < nb;
  if (a_num != b_num) return a_num;
  return a.filename() < b.filename();
}

}  // namespace

Frame Sequence::frame(size_t i) const {
  if (!frames.empty()) return frames.at(i);
  return read_image(frame_paths.at(i));
}

std::vector<BBox> parse_groundtruth(std::string_view text) {
  std::vector<BBox> boxes;
  int line_no = 0;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    double v[4];
    int n = 0;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t next = line.find_first_of(",\t", pos);
      if (next == std::string_view::npos) next = line.size();
      if (n == 4) {
        throw Error(Errc::SequenceMalformed,
                    "ground truth line " + std::to_string(line_no) + ": more than 4 fields");
      }
      v[n++] = parse_field(line.substr(pos, next - pos), line_no);
      pos = next + 1;
    }
    if (n != 4) {
      throw Error(Errc::SequenceMalformed,
                  "ground truth line " + std::to_string(line_no) + ": expected 4 fields");
    }
    boxes.push_back({v[0] - 1.0, v[1] - 1.0, v[2], v[3]});
  }
  return boxes;
}

std::string format_groundtruth(const std::vector<BBox>& boxes) {
  std::string out;
  for (const BBox& b : boxes) {
    out += format_number(b.x + 1.0) + "," + format_number(b.y + 1.0) + "," + format_number(b.w) +
           "," + format_number(b.h) + "\n";
  }
  return out;
}

Sequence load_sequence(const fs::path& dir) {
  const fs::path img = dir / "img";
  const fs::path gt = dir / "groundtruth_rect.txt";
  if (!fs::is_directory(img)) throw Error(Errc::SequenceMalformed, "missing " + img.string());
  if (!fs::is_regular_file(gt)) throw Error(Errc::SequenceMalformed, "missing " + gt.string());

  Sequence seq;
  seq.name = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  for (const auto& entry : fs::directory_iterator(img)) {
    if (entry.is_regular_file() && is_image(entry.path())) seq.frame_paths.push_back(entry.path());
  }
  std::sort(seq.frame_paths.begin(), seq.frame_paths.end(), frame_order);
  if (seq.frame_paths.empty()) throw Error(Errc::SequenceMalformed, "no frames in " + img.string());

  seq.groundtruth = parse_groundtruth(read_text(gt));
  if (seq.groundtruth.size() != seq.frame_paths.size()) {
    throw Error(Errc::GtLengthMismatch, std::to_string(seq.frame_paths.size()) + " frames, " +
                                            std::to_string(seq.groundtruth.size()) + " boxes");
  }
  if (!seq.groundtruth.front().valid()) {
    throw Error(Errc::SequenceMalformed, "first ground-truth box is not valid");
  }

  const fs::path attr = dir / "attributes.txt";
  if (fs::is_regular_file(attr)) {
    std::stringstream ss(read_text(attr));
    std::string tag;
    while (std::getline(ss, tag, ',')) {
      tag.erase(0, tag.find_first_not_of(" \t\r\n"));
      tag.erase(tag.find_last_not_of(" \t\r\n") + 1);
      if (!tag.empty()) seq.attributes.push_back(tag);
    }
  }
  return seq;
}

std::vector<Sequence> load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(Errc::SequenceMalformed, "not a directory: " + dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::is_directory(entry.path() / "img")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<Sequence> out;
  for (const auto& d : dirs) out.push_back(load_sequence(d));
  return out;
}

void write_sequence(const Sequence& seq, const fs::path& dir) {
  const fs::path img = dir / "img";
  fs::create_directories(img);
  if (!seq.frames.empty()) {
    for (size_t i = 0; i < seq.frames.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "%04zu.png", i + 1);
      write_png(seq.frames[i], img / name);
    }
  } else {
    for (const auto& p : seq.frame_paths) {
      fs::copy_file(p, img / p.filename(), fs::copy_options::overwrite_existing);
    }
  }
  std::ofstream gt(dir / "groundtruth_rect.txt", std::ios::binary);
  gt << format_groundtruth(seq.groundtruth);
  if (!gt) throw Error(Errc::Io, "cannot write ground truth in " + dir.string());
  if (!seq.attributes.empty()) {
    std::ofstream attr(dir / "attributes.txt", std::ios::binary);
    for (size_t i = 0; i < seq.attributes.size(); ++i) {
      attr << (i ? "," : "") << seq.attributes[i];
    }
    attr << "\n";
  }
}

Frame read_image(const fs::path& path) {
  const cv::Mat m = cv::imread(path.string(), cv::IMREAD_ANYCOLOR);
  if (m.empty()) throw Error(Errc::SequenceMalformed, "cannot decode " + path.string());
  cv::Mat m8 = m;
  if (m.depth() != CV_8U) m.convertTo(m8, CV_8U, 1.0 / 256.0);
  const int ch = m8.channels() == 1 ? 1 : 3;
  Frame f(m8.cols, m8.rows, ch);
  for (int r = 0; r < m8.rows; ++r) {
    const uint8_t* row = m8.ptr<uint8_t>(r);
    for (int c = 0; c < m8.cols; ++c) {
      if (ch == 1) {
        f.at(r, c) = row[c];
      } else {
        const uint8_t* px = row + c * m8.channels();
        f.at(r, c, 0) = px[2];
        f.at(r, c, 1) = px[1];
        f.at(r, c, 2) = px[0];
      }
    }
  }
  return f;
}

void write_png(const Frame& frame, const fs::path& path) {
  cv::Mat m(frame.height(), frame.width(), frame.channels() == 1 ? CV_8UC1 : CV_8UC3);
  for (int r = 0; r < frame.height(); ++r) {
    uint8_t* row = m.ptr<uint8_t>(r);
    for (int c = 0; c < frame.width(); ++c) {
      if (frame.channels() == 1) {
        row[c] = frame.at(r, c);
      } else {
        row[3 * c + 0] = frame.at(r, c, 2);
        row[3 * c + 1] = frame.at(r, c, 1);
        row[3 * c + 2] = frame.at(r, c, 0);
      }
    }
  }
  if (!cv::imwrite(path.string(), m)) throw Error(Errc::Io, "cannot write " + path.string());
}

}  // namespace autotrack
