#include "aerochunk/config.hpp"

#include "aerochunk/error.hpp"
#include "aerochunk/primitives.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

namespace aerochunk {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

class ValueParser {
 public:
  ValueParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  ConfigValue parse_all() {
    ConfigValue v = parse();
    skip_space();
    if (pos_ != text_.size()) fail(fmt::format("unexpected trailing text '{}'", text_.substr(pos_)));
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(fmt::format("config line {}: {}", line_, what));
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  ConfigValue parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '"') return {parse_string()};
    if (c == '[') return {parse_array()};
    if (text_.substr(pos_).starts_with("true")) {
      pos_ += 4;
      return {true};
    }
    if (text_.substr(pos_).starts_with("false")) {
      pos_ += 5;
      return {false};
    }
    return {parse_number()};
  }

  std::string parse_string() {
    std::string out;
    for (++pos_; pos_ < text_.size(); ++pos_) {
      const char c = text_[pos_];
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (c == '\\') {
        if (++pos_ >= text_.size()) break;
        const char e = text_[pos_];
        if (e == 'n') {
          out += '\n';
        } else if (e == 't') {
          out += '\t';
        } else if (e == '"' || e == '\\') {
          out += e;
        } else {
          fail(fmt::format("unknown escape '\\{}'", e));
        }
      } else {
        out += c;
      }
    }
    fail("unterminated string");
  }

  std::vector<ConfigValue> parse_array() {
    std::vector<ConfigValue> out;
    ++pos_;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(parse());
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (text_[pos_] == ']') {
        ++pos_;
        return out;
      }
      if (text_[pos_] != ',') fail("expected ',' or ']' in array");
      ++pos_;
    }
  }

  double parse_number() {
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '+') start = ++pos_;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == text_.data() + start) fail(fmt::format("bad value '{}'", text_.substr(pos_)));
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

// Strip a # comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

class SectionReader {
 public:
  SectionReader(const ConfigDocument& doc, std::string name) : name_(std::move(name)) {
    auto it = doc.find(name_);
    if (it != doc.end()) section_ = &it->second;
  }

  bool has(const std::string& key) const { return section_ && section_->contains(key); }

  double number(const std::string& key, double fallback) {
    const ConfigValue* v = get(key);
    if (!v) return fallback;
    return as_number(*v, key);
  }

  int integer(const std::string& key, int fallback) {
    const ConfigValue* v = get(key);
    if (!v) return fallback;
    const double d = as_number(*v, key);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ParseError(fmt::format("[{}] {} must be an integer", name_, key));
    return static_cast<int>(d);
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const ConfigValue* v = get(key);
    if (!v) return fallback;
    if (const auto* s = std::get_if<std::string>(&v->value)) return *s;
    throw ParseError(fmt::format("[{}] {} must be a string", name_, key));
  }

  std::vector<double> numbers(const std::string& key) {
    const ConfigValue* v = get(key);
    if (!v) return {};
    const auto* arr = std::get_if<std::vector<ConfigValue>>(&v->value);
    if (!arr) throw ParseError(fmt::format("[{}] {} must be an array", name_, key));
    std::vector<double> out;
    for (const auto& item : *arr) out.push_back(as_number(item, key));
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    const ConfigValue* v = get(key);
    if (!v) return {};
    const auto* arr = std::get_if<std::vector<ConfigValue>>(&v->value);
    if (!arr) throw ParseError(fmt::format("[{}] {} must be an array", name_, key));
    std::vector<std::string> out;
    for (const auto& item : *arr) {
      const auto* s = std::get_if<std::string>(&item.value);
      if (!s) throw ParseError(fmt::format("[{}] {} must hold strings", name_, key));
      out.push_back(*s);
    }
    return out;
  }

  void finish() const {
    if (!section_) return;
    for (const auto& [key, value] : *section_) {
      if (!used_.contains(key)) throw ParseError(fmt::format("unknown key '{}' in [{}]", key, name_));
    }
  }

 private:
  const ConfigValue* get(const std::string& key) {
    used_.insert(key);
    if (!section_) return nullptr;
    auto it = section_->find(key);
    return it == section_->end() ? nullptr : &it->second;
  }

  double as_number(const ConfigValue& v, const std::string& key) const {
    if (const auto* d = std::get_if<double>(&v.value)) return *d;
    throw ParseError(fmt::format("[{}] {} must be a number", name_, key));
  }

  std::string name_;
  const ConfigSection* section_ = nullptr;
  std::set<std::string> used_;
};

}  // namespace

ConfigDocument parse_config_document(std::string_view text) {
  ConfigDocument doc;
  std::string section;
  doc[section];
  std::set<std::string> headers;
  std::size_t number = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view raw = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++number;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(fmt::format("config line {}: malformed section header", number));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!valid_key(section)) throw ParseError(fmt::format("config line {}: bad section name", number));
      if (!headers.insert(section).second) {
        throw ParseError(fmt::format("config line {}: duplicate section [{}]", number, section));
      }
      doc[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(fmt::format("config line {}: expected key = value", number));
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ParseError(fmt::format("config line {}: bad key '{}'", number, key));
    ConfigValue value = ValueParser(trim(line.substr(eq + 1)), number).parse_all();
    if (!doc[section].emplace(key, std::move(value)).second) {
      throw ParseError(fmt::format("config line {}: duplicate key '{}'", number, key));
    }
  }
  return doc;
}

AngleMode parse_angle_mode(std::string_view name) {
  if (name == "paper-max") return AngleMode::PaperMax;
  if (name == "safe-min") return AngleMode::SafeMin;
  throw ParseError(fmt::format("unknown angle mode '{}' (expected paper-max or safe-min)", name));
}

FeasibilityMode parse_feasibility_mode(std::string_view name) {
  if (name == "per-uav") return FeasibilityMode::PerUav;
  if (name == "capacity-reuse") return FeasibilityMode::CapacityReuse;
  throw ParseError(fmt::format("unknown feasibility mode '{}' (expected per-uav or capacity-reuse)", name));
}

TrackerModel parse_tracker_model(std::string_view name) {
  if (name == "first-order") return TrackerModel::FirstOrder;
  if (name == "second-order") return TrackerModel::SecondOrder;
  throw ParseError(fmt::format("unknown tracker '{}' (expected first-order or second-order)", name));
}

void PipelineConfig::set_angle_mode(AngleMode mode) {
  SamplerParams& s = search.sampler;
  s.mode = mode;
  if (phi_max_override) {
    s.phi_max = *phi_max_override;
  } else {
    s.phi_max = combine_phi_max(s.phi_conn_max, extruder_phi_max(s.extruder.nozzle_height, s.extruder.head_length), mode);
  }
}

void PipelineConfig::validate() const {
  if (mesh.generate.empty() && mesh.path.empty()) throw ParseError("[mesh] needs either path or generate");
  if (mesh.generate == "dome" && !(mesh.volume > 0.0)) throw ParseError("[mesh] generate = \"dome\" needs volume_l > 0");
  if (fleet.capacities.empty()) throw ParseError("[fleet] has no UAVs");
  search.validate();
  print.validate();
  sim.validate();
}

PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir) {
  const ConfigDocument doc = parse_config_document(text);
  static const std::set<std::string> known{"", "mesh", "fleet", "extruder", "sampler", "search", "print", "sim", "output"};
  for (const auto& [name, section] : doc) {
    if (!known.contains(name)) throw ParseError(fmt::format("unknown config section [{}]", name));
  }
  SectionReader top(doc, "");
  top.finish();

  PipelineConfig cfg;

  SectionReader mesh(doc, "mesh");
  const std::string path = mesh.string("path", "");
  if (!path.empty()) cfg.mesh.path = base_dir / path;
  if (mesh.has("format")) cfg.mesh.format = parse_mesh_format(mesh.string("format", ""));
  cfg.mesh.generate = mesh.string("generate", "");
  if (!cfg.mesh.generate.empty() && cfg.mesh.generate != "dome" && cfg.mesh.generate != "box") {
    throw ParseError(fmt::format("[mesh] unknown generator '{}' (expected dome or box)", cfg.mesh.generate));
  }
  if (!path.empty() && !cfg.mesh.generate.empty()) throw ParseError("[mesh] path and generate are exclusive");
  cfg.mesh.volume = mesh.number("volume_l", 0.0) / 1000.0;
  const auto size = mesh.numbers("size");
  if (!size.empty()) {
    if (size.size() != 3) throw ParseError("[mesh] size must have three entries");
    cfg.mesh.size = Vec3(size[0], size[1], size[2]);
  }
  mesh.finish();

  SectionReader fleet(doc, "fleet");
  std::vector<double> caps = fleet.numbers("capacities_l");
  const int count = fleet.integer("count", 0);
  const double each = fleet.number("capacity_l", 0.0);
  if (fleet.has("capacities_l") && fleet.has("count")) throw ParseError("[fleet] capacities_l and count are exclusive");
  if (caps.empty() && count > 0) caps.assign(static_cast<std::size_t>(count), each);
  for (double& c : caps) c /= 1000.0;
  const std::string feasibility = fleet.string("feasibility", "capacity-reuse");
  cfg.fleet = FleetConfig::make(std::move(caps), fleet.strings("ids"));
  cfg.fleet.mode = parse_feasibility_mode(feasibility);
  fleet.finish();

  SectionReader extruder(doc, "extruder");
  cfg.fleet.clearance.nozzle_height = extruder.number("nozzle_height", cfg.fleet.clearance.nozzle_height);
  cfg.fleet.clearance.head_length = extruder.number("head_length", cfg.fleet.clearance.head_length);
  cfg.fleet.arm.arm_length = extruder.number("arm_length", cfg.fleet.arm.arm_length);
  cfg.fleet.arm.nozzle_length = extruder.number("nozzle_length", cfg.fleet.arm.nozzle_length);
  cfg.fleet.arm.joint_angle = extruder.number("joint_angle_deg", 0.0) * kDeg;
  extruder.finish();

  SectionReader sampler(doc, "sampler");
  SamplerParams& sp = cfg.search.sampler;
  sp.normal_count = sampler.integer("normal_count", sp.normal_count);
  sp.offsets_per_normal = sampler.integer("offsets_per_normal", sp.offsets_per_normal);
  sp.phi_conn_max = sampler.number("phi_conn_max_deg", sp.phi_conn_max / kDeg) * kDeg;
  if (sampler.has("phi_max_deg")) cfg.phi_max_override = sampler.number("phi_max_deg", 0.0) * kDeg;
  sp.extruder = cfg.fleet.clearance;
  const AngleMode mode = parse_angle_mode(sampler.string("mode", "safe-min"));
  sampler.finish();
  cfg.set_angle_mode(mode);

  SectionReader search(doc, "search");
  cfg.search.w_inner = search.integer("w_inner", cfg.search.w_inner);
  cfg.search.w_outer = search.integer("w_outer", cfg.search.w_outer);
  cfg.search.max_iterations = search.integer("max_iterations", cfg.search.max_iterations);
  cfg.search.threads = search.integer("threads", cfg.search.threads);
  search.finish();

  SectionReader print(doc, "print");
  cfg.print.layer_height = print.number("layer_height", cfg.print.layer_height);
  cfg.print.line_width = print.number("line_width", cfg.print.line_width);
  cfg.print.infill_fraction = print.number("infill_fraction", cfg.print.infill_fraction);
  cfg.print.avg_speed = print.number("avg_speed", cfg.print.avg_speed);
  cfg.print.deposition_rate = print.number("deposition_rate", cfg.print.deposition_rate);
  print.finish();

  SectionReader sim(doc, "sim");
  cfg.sim.dt = sim.number("dt", cfg.sim.dt);
  cfg.sim.tracking_time_constant = sim.number("tracking_time_constant", cfg.sim.tracking_time_constant);
  cfg.sim.tracker = parse_tracker_model(sim.string("tracker", "second-order"));
  cfg.sim.damping_ratio = sim.number("damping_ratio", cfg.sim.damping_ratio);
  cfg.sphere_radius_from_bead = !sim.has("deposition_sphere_radius");
  cfg.sim.deposition_sphere_radius = cfg.sphere_radius_from_bead
                                         ? bead_sphere_radius(cfg.print.line_width, cfg.print.layer_height)
                                         : sim.number("deposition_sphere_radius", 0.0);
  const double seed = sim.number("rng_seed", 1.0);
  if (seed < 0.0 || seed != std::floor(seed)) throw ParseError("[sim] rng_seed must be a non-negative integer");
  cfg.sim.rng_seed = static_cast<std::uint64_t>(seed);
  cfg.sim.disturbance_std = sim.number("disturbance_std", cfg.sim.disturbance_std);
  cfg.sim.extruder = cfg.fleet.arm;
  sim.finish();

  SectionReader output(doc, "output");
  const std::string dir = output.string("dir", "out");
  cfg.output_dir = base_dir / dir;
  output.finish();

  cfg.validate();
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(read_file(path), path.parent_path());
}

TriangleMesh load_pipeline_mesh(const PipelineConfig& config) {
  if (config.mesh.generate == "dome") {
    TriangleMesh m = make_dome(config.mesh.volume);
    m.id = "dome";
    return m;
  }
  if (config.mesh.generate == "box") {
    TriangleMesh m = make_box(Vec3::Zero(), config.mesh.size);
    m.id = "box";
    return m;
  }
  return config.mesh.format ? load_mesh_file(config.mesh.path, *config.mesh.format) : load_mesh_file(config.mesh.path);
}

}  // namespace aerochunk
