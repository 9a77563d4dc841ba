#include "hybridsort/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <span>

#include <fmt/format.h>

#include "hybridsort/errors.hpp"

namespace hybridsort {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <std::size_t N>
void parse_array(std::string_view text, std::array<double, N>& out) {
  const auto items = split_list(text);
  if (items.size() != N) {
    throw InputError(fmt::format("expected {} comma-separated values, got {}", N, items.size()));
  }
  for (std::size_t i = 0; i < N; ++i) out[i] = parse_double(items[i]);
}

template <std::size_t N>
std::string format_array(const std::array<double, N>& a) {
  std::string out;
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0) out += ", ";
    out += format_double(a[i]);
  }
  return out;
}

int to_int(std::string_view text) {
  const long long v = parse_integer(text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw InputError(fmt::format("'{}' is out of range", text));
  }
  return static_cast<int>(v);
}

std::string_view on_off(bool b) { return b ? "on" : "off"; }

struct Field {
  std::string_view key;
  std::function<void(ConfigDocument&, std::string_view)> set;
  std::function<std::string(const ConfigDocument&)> get;
};

#define HS_DOUBLE(KEY, MEMBER)                                                          \
  Field {                                                                               \
    KEY, [](ConfigDocument& d, std::string_view v) { d.MEMBER = parse_double(v); },     \
        [](const ConfigDocument& d) { return format_double(d.MEMBER); }                 \
  }
#define HS_INT(KEY, MEMBER)                                                             \
  Field {                                                                               \
    KEY, [](ConfigDocument& d, std::string_view v) { d.MEMBER = to_int(v); },           \
        [](const ConfigDocument& d) { return std::to_string(d.MEMBER); }                \
  }
#define HS_BOOL(KEY, MEMBER)                                                            \
  Field {                                                                               \
    KEY, [](ConfigDocument& d, std::string_view v) { d.MEMBER = parse_bool(v); },       \
        [](const ConfigDocument& d) { return std::string(on_off(d.MEMBER)); }           \
  }
#define HS_ENUM(KEY, MEMBER, PARSE)                                                     \
  Field {                                                                               \
    KEY, [](ConfigDocument& d, std::string_view v) { d.MEMBER = PARSE(v); },            \
        [](const ConfigDocument& d) { return std::string(to_string(d.MEMBER)); }        \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      HS_ENUM("tracker.variant", tracker.variant, parse_variant),
      HS_DOUBLE("tracker.lambda1", tracker.lambda_velocity),
      HS_DOUBLE("tracker.lambda2_first", tracker.lambda_confidence_first),
      HS_DOUBLE("tracker.lambda2_byte", tracker.lambda_confidence_byte),
      HS_DOUBLE("tracker.lambda3", tracker.lambda_appearance),
      HS_DOUBLE("tracker.high_threshold", tracker.high_threshold),
      HS_DOUBLE("tracker.low_threshold", tracker.low_threshold),
      HS_DOUBLE("tracker.gate", tracker.gate),
      HS_INT("tracker.min_hits", tracker.min_hits),
      HS_INT("tracker.max_age", tracker.max_age),
      HS_DOUBLE("tracker.ema_momentum", tracker.ema_momentum),
      HS_BOOL("tracker.tcm", tracker.tcm),
      HS_BOOL("tracker.rocm", tracker.rocm),
      HS_BOOL("tracker.appearance", tracker.appearance),
      HS_BOOL("tracker.byte_stage", tracker.byte_stage),
      HS_BOOL("tracker.ocr_stage", tracker.ocr_stage),
      HS_ENUM("tracker.spatial", tracker.spatial, parse_spatial_metric),
      HS_ENUM("tracker.stage1_confidence", tracker.first_stage_confidence,
              parse_confidence_model),
      HS_ENUM("tracker.stage2_confidence", tracker.byte_stage_confidence,
              parse_confidence_model),
      Field{"noise.measurement_std",
            [](ConfigDocument& d, std::string_view v) {
              parse_array(v, d.tracker.noise.measurement_std);
            },
            [](const ConfigDocument& d) {
              return format_array(d.tracker.noise.measurement_std);
            }},
      Field{"noise.process_std",
            [](ConfigDocument& d, std::string_view v) {
              parse_array(v, d.tracker.noise.process_std);
            },
            [](const ConfigDocument& d) { return format_array(d.tracker.noise.process_std); }},
      HS_DOUBLE("noise.velocity_variance_inflation", tracker.noise.velocity_variance_inflation),
      HS_INT("scenario.object_count", scenario.object_count),
      HS_ENUM("scenario.motion", scenario.motion, parse_motion_model),
      Field{"scenario.motion_overrides",
            [](ConfigDocument& d, std::string_view v) {
              d.scenario.motion_overrides.clear();
              for (std::string_view item : split_list(v)) {
                d.scenario.motion_overrides.push_back(parse_motion_model(item));
              }
            },
            [](const ConfigDocument& d) {
              std::string out;
              for (MotionModel m : d.scenario.motion_overrides) {
                if (!out.empty()) out += ", ";
                out += to_string(m);
              }
              return out;
            }},
      HS_INT("scenario.frame_count", scenario.frame_count),
      HS_DOUBLE("scenario.image_width", scenario.image_width),
      HS_DOUBLE("scenario.image_height", scenario.image_height),
      HS_DOUBLE("scenario.speed", scenario.speed),
      HS_DOUBLE("scenario.weave_amplitude", scenario.weave_amplitude),
      HS_DOUBLE("scenario.weave_period", scenario.weave_period),
      HS_DOUBLE("scenario.min_height", scenario.min_height),
      HS_DOUBLE("scenario.max_height", scenario.max_height),
      HS_DOUBLE("scenario.aspect", scenario.aspect),
      HS_DOUBLE("scenario.width_variation", scenario.width_variation),
      HS_DOUBLE("scenario.width_period", scenario.width_period),
      HS_DOUBLE("scenario.aspect_spread", scenario.aspect_spread),
      HS_DOUBLE("scenario.occlusion_iou", scenario.occlusion_iou),
      HS_DOUBLE("scenario.confidence_slope", scenario.confidence_slope),
      HS_DOUBLE("scenario.base_confidence", scenario.base_confidence),
      HS_DOUBLE("scenario.confidence_noise", scenario.confidence_noise),
      HS_DOUBLE("scenario.dropout_probability", scenario.dropout_probability),
      HS_DOUBLE("scenario.jitter_std", scenario.jitter_std),
      HS_DOUBLE("scenario.limb_extent", scenario.limb_extent),
      Field{"scenario.seed",
            [](ConfigDocument& d, std::string_view v) {
              const long long s = parse_integer(v);
              if (s < 0) throw InputError("seed must be >= 0");
              d.scenario.seed = static_cast<std::uint64_t>(s);
            },
            [](const ConfigDocument& d) { return std::to_string(d.scenario.seed); }},
  };
  return table;
}

#undef HS_DOUBLE
#undef HS_INT
#undef HS_BOOL
#undef HS_ENUM

}  // namespace

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw InputError(fmt::format("'{}' is not on/off", text));
}

double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw InputError(fmt::format("'{}' is not a finite number", text));
  }
  return value;
}

long long parse_integer(std::string_view text) {
  text = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InputError(fmt::format("'{}' is not an integer", text));
  }
  return value;
}

std::string format_double(double x) { return fmt::format("{}", x); }

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.emplace_back(f.key);
  return out;
}

void apply_setting(ConfigDocument& doc, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key.substr(0, 4) == "run.") {
    if (key.size() == 4) throw InputError("empty run key");
    doc.run[std::string(key.substr(4))] = std::string(value);
    return;
  }
  for (const Field& f : fields()) {
    if (f.key != key) continue;
    try {
      f.set(doc, value);
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}: {}", key, e.what()));
    }
    return;
  }
  throw InputError(fmt::format("unknown config key '{}'", key));
}

ConfigDocument parse_config(std::istream& in, std::string_view source) {
  ConfigDocument doc;
  std::string line;
  std::size_t line_no = 0;
  bool have_version = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InputError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
    }
    const std::string_view key = trim(view.substr(0, eq));
    const std::string_view value = trim(view.substr(eq + 1));
    try {
      if (key == "schema_version") {
        if (parse_integer(value) != kConfigSchemaVersion) {
          throw InputError(fmt::format("unsupported schema_version {} (expected {})", value,
                                       kConfigSchemaVersion));
        }
        have_version = true;
        continue;
      }
      apply_setting(doc, key, value);
    } catch (const InputError& e) {
      throw InputError(fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
  }
  if (!have_version) throw InputError(fmt::format("{}: missing schema_version", source));
  doc.tracker.validate();
  doc.scenario.validate();
  return doc;
}

ConfigDocument read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return parse_config(in, path.string());
}

std::string format_config(const ConfigDocument& doc) {
  std::string out = fmt::format("schema_version = {}\n", kConfigSchemaVersion);
  std::string_view group;
  for (const Field& f : fields()) {
    const std::string_view prefix = f.key.substr(0, f.key.find('.'));
    if (prefix != group) {
      out += '\n';
      group = prefix;
    }
    out += fmt::format("{} = {}\n", f.key, f.get(doc));
  }
  if (!doc.run.empty()) out += '\n';
  for (const auto& [key, value] : doc.run) out += fmt::format("run.{} = {}\n", key, value);
  return out;
}

}  // namespace hybridsort
