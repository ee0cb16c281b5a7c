#include "qdgate/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qdgate/error.hpp"

namespace qdgate::cli {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorCode::config_error, message);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(const std::string& raw) {
  std::string s = trim(raw);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  double x = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(x)) return std::nullopt;
  return x;
}

std::optional<long long> parse_integer(const std::string& raw) {
  const std::string s = trim(raw);
  long long x = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return x;
}

const ParamSpec* find_spec(const std::vector<ParamSpec>& schema, const std::string& key) {
  for (const auto& s : schema) {
    if (s.key == key) return &s;
  }
  return nullptr;
}

std::string canonical_value(const ParamSpec& spec, const std::string& raw) {
  switch (spec.kind) {
    case ParamKind::number: {
      const auto x = parse_double(raw);
      if (!x) fail("'" + spec.key + "' expects a finite number, got '" + raw + "'");
      return format_number(*x);
    }
    case ParamKind::integer: {
      const auto x = parse_integer(raw);
      if (!x) fail("'" + spec.key + "' expects an integer, got '" + raw + "'");
      return std::to_string(*x);
    }
    case ParamKind::choice: {
      const std::string s = trim(raw);
      if (std::find(spec.choices.begin(), spec.choices.end(), s) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
        fail("'" + spec.key + "' must be one of {" + allowed + "}, got '" + s + "'");
      }
      return s;
    }
  }
  fail("unreachable parameter kind");
}

void flatten(const YAML::Node& node, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (node.IsMap()) {
    for (const auto& item : node) {
      const std::string key = item.first.as<std::string>();
      flatten(item.second, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (node.IsScalar()) {
    out.emplace_back(prefix, node.Scalar());
  } else {
    fail("'" + prefix + "' must be a scalar or a mapping");
  }
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) fail("number formatting failed");
  return std::string(buf, end);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

double ResolvedConfig::number(const std::string& key) const {
  const auto x = parse_double(text(key));
  if (!x) fail("'" + key + "' is not numeric");
  return *x;
}

long long ResolvedConfig::integer(const std::string& key) const {
  const std::string& s = text(key);
  if (const auto x = parse_integer(s)) return *x;
  const auto d = parse_double(s);
  if (!d || *d != std::floor(*d)) fail("'" + key + "' is not an integer");
  return static_cast<long long>(*d);
}

const std::string& ResolvedConfig::text(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) fail("missing parameter '" + key + "'");
  return it->second;
}

std::string ResolvedConfig::canonical() const {
  std::string s = "command=" + command + "\n";
  for (const auto& [k, v] : values) s += k + "=" + v + "\n";
  for (const auto& axis : sweep) {
    s += "sweep." + axis.key + "=[";
    for (std::size_t i = 0; i < axis.values.size(); ++i) {
      s += (i ? "," : "") + format_number(axis.values[i]);
    }
    s += "]\n";
  }
  s += "seed=" + std::to_string(seed) + "\n";
  return s;
}

std::uint64_t ResolvedConfig::hash() const { return fnv1a64(canonical()); }

std::vector<ResolvedConfig> ResolvedConfig::expand() const {
  ResolvedConfig base = *this;
  base.sweep.clear();
  std::vector<ResolvedConfig> points{base};
  for (const auto& axis : sweep) {
    std::vector<ResolvedConfig> next;
    next.reserve(points.size() * axis.values.size());
    for (const auto& p : points) {
      for (const double v : axis.values) {
        ResolvedConfig q = p;
        q.values[axis.key] = format_number(v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

namespace {

ResolvedConfig resolve_document(const YAML::Node& root, const std::string& command,
                                const std::vector<ParamSpec>& schema, bool sweep_allowed,
                                std::optional<std::uint64_t> seed_override) {
  ResolvedConfig cfg;
  cfg.command = command;
  for (const auto& spec : schema) cfg.values[spec.key] = spec.fallback;
  if (root && !root.IsNull() && !root.IsMap()) fail("config root must be a mapping");

  std::vector<std::pair<std::string, std::string>> leaves;
  if (root && root.IsMap()) {
    for (const auto& item : root) {
      const std::string key = item.first.as<std::string>();
      if (key == "seed") {
        if (!item.second.IsScalar()) fail("'seed' must be a non-negative integer");
        const auto s = parse_integer(item.second.Scalar());
        if (!s || *s < 0) fail("'seed' must be a non-negative integer");
        cfg.seed = static_cast<std::uint64_t>(*s);
      } else if (key == "sweep") {
        if (!sweep_allowed) fail("'" + command + "' does not accept sweep axes");
        if (!item.second.IsMap()) fail("'sweep' must map parameter names to value lists");
        for (const auto& axis_node : item.second) {
          SweepAxis axis;
          axis.key = axis_node.first.as<std::string>();
          const ParamSpec* spec = find_spec(schema, axis.key);
          if (!spec) fail("sweep axis '" + axis.key + "' is not a parameter of " + command);
          if (spec->kind == ParamKind::choice) fail("sweep axis '" + axis.key + "' is not numeric");
          const YAML::Node& list = axis_node.second;
          if (!list.IsSequence() || list.size() == 0) {
            fail("sweep axis '" + axis.key + "' needs a non-empty list");
          }
          for (const auto& v : list) {
            if (!v.IsScalar()) fail("sweep axis '" + axis.key + "' holds a non-scalar");
            const auto x = parse_double(v.Scalar());
            if (!x) fail("sweep axis '" + axis.key + "' holds '" + v.Scalar() + "'");
            if (spec->kind == ParamKind::integer && *x != std::floor(*x)) {
              fail("sweep axis '" + axis.key + "' needs integers");
            }
            axis.values.push_back(*x);
          }
          for (const auto& other : cfg.sweep) {
            if (other.key == axis.key) fail("duplicate sweep axis '" + axis.key + "'");
          }
          cfg.sweep.push_back(std::move(axis));
        }
      } else {
        flatten(item.second, key, leaves);
      }
    }
  }
  for (const auto& [key, raw] : leaves) {
    const ParamSpec* spec = find_spec(schema, key);
    if (!spec) fail("unknown parameter '" + key + "' for " + command);
    cfg.values[key] = canonical_value(*spec, raw);
  }
  if (seed_override) cfg.seed = *seed_override;
  return cfg;
}

}  // namespace

ResolvedConfig resolve(const YAML::Node& root, const std::string& command,
                       const std::vector<ParamSpec>& schema, bool sweep_allowed,
                       std::optional<std::uint64_t> seed_override) {
  try {
    return resolve_document(root, command, schema, sweep_allowed, seed_override);
  } catch (const YAML::Exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
}

ResolvedConfig load_config(const std::filesystem::path& path, const std::string& command,
                           const std::vector<ParamSpec>& schema, bool sweep_allowed,
                           std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) fail("cannot read config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  YAML::Node root;
  try {
    root = YAML::Load(buffer.str());
  } catch (const YAML::Exception& e) {
    fail("malformed config '" + path.string() + "': " + e.what());
  }
  return resolve(root, command, schema, sweep_allowed, seed_override);
}

}  // namespace qdgate::cli
