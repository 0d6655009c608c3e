#include "autotrack/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "autotrack/error.hpp"

namespace autotrack {

TrackerConfig configure_variant(TrackerConfig cfg, Variant variant) {
  cfg.variant = variant;
  if (variant == Variant::Strcf || variant == Variant::Atr) cfg.delta = 0.0;
  return cfg;
}

Variant parse_variant(std::string_view name) {
  if (name == "strcf") return Variant::Strcf;
  if (name == "asr") return Variant::Asr;
  if (name == "atr") return Variant::Atr;
  if (name == "autotrack") return Variant::AutoTrack;
  throw Error(Errc::InvalidArgument, "unknown variant '" + std::string(name) + "'");
}

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::Strcf: return "strcf";
    case Variant::Asr: return "asr";
    case Variant::Atr: return "atr";
    case Variant::AutoTrack: return "autotrack";
  }
  return "autotrack";
}

namespace {

struct Field {
  std::string key;
  std::function<bool(Config&, std::string_view)> parse;
  std::function<std::string(const Config&)> print;
};

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1") return out = true, true;
  if (s == "false" || s == "0") return out = false, true;
  return false;
}

template <typename Get>
Field real_field(std::string key, Get get) {
  return {std::move(key),
          [get](Config& c, std::string_view s) { return parse_number(s, get(c)); },
          [get](const Config& c) { return format_double(get(const_cast<Config&>(c))); }};
}

template <typename Get>
Field int_field(std::string key, Get get) {
  return {std::move(key),
          [get](Config& c, std::string_view s) { return parse_number(s, get(c)); },
          [get](const Config& c) { return std::to_string(get(const_cast<Config&>(c))); }};
}

template <typename Get>
Field bool_field(std::string key, Get get) {
  return {std::move(key), [get](Config& c, std::string_view s) { return parse_bool(s, get(c)); },
          [get](const Config& c) {
            return std::string(get(const_cast<Config&>(c)) ? "true" : "false");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(real_field("delta", [](Config& c) -> double& { return c.tracker.delta; }));
    f.push_back(real_field("nu", [](Config& c) -> double& { return c.tracker.nu; }));
    f.push_back(real_field("zeta", [](Config& c) -> double& { return c.tracker.zeta; }));
    f.push_back(real_field("phi", [](Config& c) -> double& { return c.tracker.phi; }));
    f.push_back(int_field("admm_iters", [](Config& c) -> int& { return c.tracker.admm_iters; }));
    f.push_back(real_field("gamma0", [](Config& c) -> double& { return c.tracker.gamma0; }));
    f.push_back(real_field("beta", [](Config& c) -> double& { return c.tracker.beta; }));
    f.push_back(real_field("gamma_max", [](Config& c) -> double& { return c.tracker.gamma_max; }));
    f.push_back(int_field("cell_size", [](Config& c) -> int& { return c.tracker.cell_size; }));
    f.push_back(real_field("padding", [](Config& c) -> double& { return c.tracker.padding; }));
    f.push_back(int_field("scales", [](Config& c) -> int& { return c.tracker.scales; }));
    f.push_back(real_field("scale_step", [](Config& c) -> double& { return c.tracker.scale_step; }));
    f.push_back(
        real_field("scale_damping", [](Config& c) -> double& { return c.tracker.scale_damping; }));
    f.push_back(
        int_field("model_max_side", [](Config& c) -> int& { return c.tracker.model_max_side; }));
    f.push_back(real_field("u_min", [](Config& c) -> double& { return c.tracker.u_min; }));
    f.push_back(real_field("u_slope", [](Config& c) -> double& { return c.tracker.u_slope; }));
    f.push_back(real_field("label_sigma", [](Config& c) -> double& { return c.tracker.label_sigma; }));
    f.push_back(real_field("theta_fixed", [](Config& c) -> double& { return c.tracker.theta_fixed; }));
    f.push_back({"log_base",
                 [](Config& c, std::string_view s) {
                   if (s == "e") return c.tracker.log_base = LogBase::Natural, true;
                   if (s == "10") return c.tracker.log_base = LogBase::Ten, true;
                   return false;
                 },
                 [](const Config& c) {
                   return std::string(c.tracker.log_base == LogBase::Natural ? "e" : "10");
                 }});
    f.push_back({"cease_mode",
                 [](Config& c, std::string_view s) {
                   if (s == "skip") return c.tracker.cease_mode = CeaseMode::Skip, true;
                   if (s == "freeze") return c.tracker.cease_mode = CeaseMode::Freeze, true;
                   return false;
                 },
                 [](const Config& c) {
                   return std::string(c.tracker.cease_mode == CeaseMode::Skip ? "skip" : "freeze");
                 }});
    f.push_back({"variant",
                 [](Config& c, std::string_view s) {
                   try {
                     c.tracker.variant = parse_variant(s);
                     return true;
                   } catch (const Error&) {
                     return false;
                   }
                 },
                 [](const Config& c) { return std::string(variant_name(c.tracker.variant)); }});
    f.push_back(bool_field("fhog", [](Config& c) -> bool& { return c.tracker.features.fhog; }));
    f.push_back(
        bool_field("grayscale", [](Config& c) -> bool& { return c.tracker.features.grayscale; }));
    f.push_back(bool_field("pool_frames", [](Config& c) -> bool& { return c.bench.pool_frames; }));
    f.push_back(int_field("threads", [](Config& c) -> int& { return c.bench.threads; }));
    f.push_back(real_field("correspondence_hysteresis", [](Config& c) -> double& {
      return c.pose.correspondence_hysteresis;
    }));
    return f;
  }();
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void invalid(const char* key) { throw Error(Errc::ConfigInvalid, key); }

}  // namespace

void validate(const Config& cfg) {
  const TrackerConfig& t = cfg.tracker;
  if (!(t.delta >= 0.0)) invalid("delta");
  if (!(t.nu >= 0.0)) invalid("nu");
  if (!(t.zeta >= 0.0)) invalid("zeta");
  if (!(t.phi > 0.0)) invalid("phi");
  if (t.admm_iters < 1) invalid("admm_iters");
  if (!(t.gamma0 > 0.0)) invalid("gamma0");
  if (!(t.beta >= 1.0)) invalid("beta");
  if (!(t.gamma_max >= t.gamma0)) invalid("gamma_max");
  if (t.cell_size < 1) invalid("cell_size");
  if (!(t.padding >= 1.0)) invalid("padding");
  if (t.scales < 1) invalid("scales");
  if (!(t.scale_step >= 1.0)) invalid("scale_step");
  if (!(t.scale_damping > 0.0 && t.scale_damping <= 1.0)) invalid("scale_damping");
  if (t.model_max_side < 2 * t.cell_size) invalid("model_max_side");
  if (!(t.u_min >= 0.0)) invalid("u_min");
  if (!(t.u_slope >= 0.0)) invalid("u_slope");
  if (!(t.label_sigma > 0.0)) invalid("label_sigma");
  if (!(t.theta_fixed >= 0.0)) invalid("theta_fixed");
  if (t.features.channel_count() == 0) invalid("fhog");
  if (cfg.bench.threads < 0) invalid("threads");
  if (!(cfg.pose.correspondence_hysteresis >= 1.0)) invalid("correspondence_hysteresis");
}

Config parse_config(std::string_view text) {
  Config cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::ConfigInvalid, "malformed line '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& table = fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw Error(Errc::ConfigUnknownKey, key);
    if (!it->parse(cfg, value)) throw Error(Errc::ConfigInvalid, key);
  }
  validate(cfg);
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const Config& cfg) {
  std::string out;
  for (const Field& f : fields()) out += f.key + "=" + f.print(cfg) + "\n";
  return out;
}

}  // namespace autotrack
