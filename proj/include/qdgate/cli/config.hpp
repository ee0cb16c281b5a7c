#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace YAML {
class Node;
}

namespace qdgate::cli {

enum class ParamKind { number, integer, choice };

// One configurable leaf. Keys are dotted paths whose leaf names carry the unit.
struct ParamSpec {
  std::string key;
  ParamKind kind = ParamKind::number;
  std::string fallback;              // default, canonical text
  std::vector<std::string> choices;  // choice kind only
};

struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

class ResolvedConfig {
 public:
  std::string command;
  std::map<std::string, std::string> values;  // canonical text per key
  std::vector<SweepAxis> sweep;               // in file order; first axis outermost
  std::uint64_t seed = 1;

  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;

  // Sorted key=value lines plus sweep axes and seed; input to the hash.
  std::string canonical() const;
  std::uint64_t hash() const;

  // One sweep-free config per point of the cross product, first axis outermost.
  std::vector<ResolvedConfig> expand() const;
};

// Parses a YAML document against a schema. Unknown keys, malformed values, sweeps over
// non-numeric keys and sweeps where they are not allowed raise ErrorCode::config_error.
ResolvedConfig resolve(const YAML::Node& root, const std::string& command,
                       const std::vector<ParamSpec>& schema, bool sweep_allowed,
                       std::optional<std::uint64_t> seed_override);

ResolvedConfig load_config(const std::filesystem::path& path, const std::string& command,
                           const std::vector<ParamSpec>& schema, bool sweep_allowed,
                           std::optional<std::uint64_t> seed_override);

// Shortest decimal text that round-trips to the same double.
std::string format_number(double x);

std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);

}  // namespace qdgate::cli
