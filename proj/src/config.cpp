#include "telepassive/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "telepassive/numfmt.hpp"

namespace telepassive {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("line " + std::to_string(line) + ": " + message);
}

class KeyReader {
 public:
  explicit KeyReader(std::map<std::string, RawEntry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  void read(const std::string& key, double& target) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    const auto parsed = parse_double(it->second.value);
    if (!parsed) fail(it->second.line, key + ": expected a number, got '" + it->second.value + "'");
    target = *parsed;
    consumed_.insert(key);
  }

  void read(const std::string& key, int& target) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    const auto parsed = parse_integer(it->second.value);
    if (!parsed) {
      fail(it->second.line, key + ": expected an integer, got '" + it->second.value + "'");
    }
    target = static_cast<int>(*parsed);
    consumed_.insert(key);
  }

  void read(const std::string& key, std::string& target) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    target = it->second.value;
    consumed_.insert(key);
  }

  /// Every entry must have been consumed by now.
  void finish() const {
    for (const auto& [key, entry] : entries_) {
      if (!consumed_.count(key)) fail(entry.line, "unknown key '" + key + "'");
    }
  }

  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

 private:
  std::map<std::string, RawEntry> entries_;
  std::set<std::string> consumed_;
};

std::map<std::string, RawEntry> tokenize(const std::string& text) {
  std::map<std::string, RawEntry> entries;
  std::istringstream stream(text);
  std::string raw_line;
  int line_number = 0;
  while (std::getline(stream, raw_line)) {
    ++line_number;
    const auto hash = raw_line.find('#');
    std::string line = trim(hash == std::string::npos ? raw_line : raw_line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_number, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_number, "missing key before '='");
    if (value.empty()) fail(line_number, "missing value for key '" + key + "'");
    if (entries.count(key)) fail(line_number, "duplicate key '" + key + "'");
    entries[key] = RawEntry{value, line_number};
  }
  return entries;
}

const std::vector<std::string>& gain_keys() {
  static const std::vector<std::string> keys = {
      "controller.K.master", "controller.K.slave",     "controller.L.master",
      "controller.L.slave",  "controller.Kd",          "controller.Kp",
      "controller.Kv",       "controller.Peps",        "controller.gamma.master",
      "controller.gamma.slave"};
  return keys;
}

void reject_foreign_gain_keys(const KeyReader& reader, const std::set<std::string>& allowed,
                              const std::string& type_name) {
  for (const auto& key : gain_keys()) {
    if (reader.has(key) && !allowed.count(key)) {
      fail(reader.line_of(key), key + " is not a gain of controller.type " + type_name);
    }
  }
}

}  // namespace

Scenario default_scenario() {
  Scenario sc;
  sc.master = {3.5 / 2.2, 4.0 / 2.2};
  sc.slave = {3.5 / 2.2, 4.0 / 2.2};
  sc.operator_termination = {10.0, 1.0, {{10.0, 20.0, 1.0}}};
  sc.wall = {4.0, 1000.0, WallMode::spring};
  sc.law = PLikeGains{1.0, 0.1, 1.0, 0.1};
  sc.sampling = {0.002, 1.0, 100};
  sc.delay = {0.0, 0.0, 0.0};
  sc.duration = 40.0;
  return sc;
}

Scenario parse_config_text(const std::string& text) {
  KeyReader reader(tokenize(text));
  Scenario sc = default_scenario();

  reader.read("master.mass", sc.master.mass);
  reader.read("master.damping", sc.master.damping);
  reader.read("slave.mass", sc.slave.mass);
  reader.read("slave.damping", sc.slave.damping);

  reader.read("operator.stiffness", sc.operator_termination.stiffness);
  reader.read("operator.damping", sc.operator_termination.damping);
  ForceSegment& segment = sc.operator_termination.force_segments.front();
  reader.read("operator.force.start", segment.start);
  reader.read("operator.force.end", segment.end);
  reader.read("operator.force.magnitude", segment.magnitude);

  reader.read("wall.position", sc.wall.contact_position);
  reader.read("wall.stiffness", sc.wall.stiffness);
  std::string wall_mode = sc.wall.mode == WallMode::spring ? "spring" : "rigid_reflect";
  reader.read("wall.mode", wall_mode);
  if (wall_mode == "spring") {
    sc.wall.mode = WallMode::spring;
  } else if (wall_mode == "rigid_reflect") {
    sc.wall.mode = WallMode::rigid_reflect;
  } else {
    fail(reader.line_of("wall.mode"), "wall.mode must be 'spring' or 'rigid_reflect'");
  }

  std::string type = "p_like";
  reader.read("controller.type", type);
  if (type == "p_like") {
    PLikeGains gains = std::holds_alternative<PLikeGains>(sc.law)
                           ? std::get<PLikeGains>(sc.law)
                           : PLikeGains{};
    reader.read("controller.K.master", gains.K_master);
    reader.read("controller.K.slave", gains.K_slave);
    reader.read("controller.L.master", gains.L_master);
    reader.read("controller.L.slave", gains.L_slave);
    reject_foreign_gain_keys(reader,
                             {"controller.K.master", "controller.K.slave",
                              "controller.L.master", "controller.L.slave"},
                             type);
    sc.law = gains;
  } else if (type == "pd_like") {
    PDLikeGains gains;
    reader.read("controller.Kd", gains.Kd);
    reader.read("controller.K.master", gains.K_master);
    reader.read("controller.K.slave", gains.K_slave);
    reader.read("controller.gamma.master", gains.gamma_master);
    reader.read("controller.gamma.slave", gains.gamma_slave);
    reject_foreign_gain_keys(reader,
                             {"controller.Kd", "controller.K.master", "controller.K.slave",
                              "controller.gamma.master", "controller.gamma.slave"},
                             type);
    sc.law = gains;
  } else if (type == "pd_dissipation") {
    PDDissipationGains gains;
    reader.read("controller.Kv", gains.Kv);
    reader.read("controller.Kp", gains.Kp);
    reader.read("controller.Kd", gains.Kd);
    reader.read("controller.Peps", gains.Peps);
    reject_foreign_gain_keys(
        reader, {"controller.Kv", "controller.Kp", "controller.Kd", "controller.Peps"}, type);
    sc.law = gains;
  } else {
    fail(reader.line_of("controller.type"),
         "controller.type must be 'p_like', 'pd_like' or 'pd_dissipation'");
  }

  reader.read("sampling.period", sc.sampling.period);
  reader.read("sampling.alpha", sc.sampling.alpha);
  reader.read("sampling.substeps", sc.sampling.substeps);

  reader.read("delay.t1", sc.delay.forward);
  reader.read("delay.t2", sc.delay.backward);
  reader.read("delay.nu", sc.delay.nu);

  reader.read("duration", sc.duration);

  reader.finish();

  const auto issues = validate_scenario(sc);
  if (!issues.empty()) {
    std::ostringstream oss;
    oss << "invalid scenario:";
    for (const auto& issue : issues) oss << "\n  " << issue.field << ": " << issue.message;
    throw ConfigError(oss.str());
  }
  return sc;
}

Scenario parse_config_file(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream oss;
  oss << file.rdbuf();
  return parse_config_text(oss.str());
}

std::string dump_config(const Scenario& sc) {
  if (sc.operator_termination.force_segments.size() != 1) {
    throw ConfigError("dump_config: the config format carries exactly one operator force segment");
  }
  const ForceSegment& segment = sc.operator_termination.force_segments.front();

  std::ostringstream oss;
  auto emit = [&oss](const std::string& key, double value) {
    oss << key << " = " << format_double(value) << "\n";
  };

  emit("master.mass", sc.master.mass);
  emit("master.damping", sc.master.damping);
  emit("slave.mass", sc.slave.mass);
  emit("slave.damping", sc.slave.damping);
  emit("operator.stiffness", sc.operator_termination.stiffness);
  emit("operator.damping", sc.operator_termination.damping);
  emit("operator.force.start", segment.start);
  emit("operator.force.end", segment.end);
  emit("operator.force.magnitude", segment.magnitude);
  emit("wall.position", sc.wall.contact_position);
  emit("wall.stiffness", sc.wall.stiffness);
  oss << "wall.mode = " << (sc.wall.mode == WallMode::spring ? "spring" : "rigid_reflect")
      << "\n";

  std::visit(
      [&](const auto& gains) {
        using G = std::decay_t<decltype(gains)>;
        if constexpr (std::is_same_v<G, PLikeGains>) {
          oss << "controller.type = p_like\n";
          emit("controller.K.master", gains.K_master);
          emit("controller.K.slave", gains.K_slave);
          emit("controller.L.master", gains.L_master);
          emit("controller.L.slave", gains.L_slave);
        } else if constexpr (std::is_same_v<G, PDLikeGains>) {
          oss << "controller.type = pd_like\n";
          emit("controller.Kd", gains.Kd);
          emit("controller.K.master", gains.K_master);
          emit("controller.K.slave", gains.K_slave);
          emit("controller.gamma.master", gains.gamma_master);
          emit("controller.gamma.slave", gains.gamma_slave);
        } else {
          oss << "controller.type = pd_dissipation\n";
          emit("controller.Kv", gains.Kv);
          emit("controller.Kp", gains.Kp);
          emit("controller.Kd", gains.Kd);
          emit("controller.Peps", gains.Peps);
        }
      },
      sc.law);

  emit("sampling.period", sc.sampling.period);
  emit("sampling.alpha", sc.sampling.alpha);
  oss << "sampling.substeps = " << sc.sampling.substeps << "\n";
  emit("delay.t1", sc.delay.forward);
  emit("delay.t2", sc.delay.backward);
  emit("delay.nu", sc.delay.nu);
  emit("duration", sc.duration);
  return oss.str();
}

}  // namespace telepassive
