#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wsattack/aom.hpp"
#include "wsattack/attack.hpp"
#include "wsattack/opll.hpp"
#include "wsattack/params.hpp"

namespace wsa {

using Json = nlohmann::ordered_json;

/// Unreadable or malformed config file. The message carries the offending
/// line and column when the failure is a syntax error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which parameter set the omitted fields default to.
enum class Preset { tf, sns };

/// Complete default configuration for a preset, in the on-disk layout.
Json default_config(Preset preset);

/// Parses a JSON config file. Throws ConfigError.
Json load_config_file(const std::filesystem::path& path);

/// Parses JSON text; `origin` names the source in error messages.
Json parse_config_text(const std::string& text, const std::string& origin);

/// Everything a command needs, built from defaults patched with user values.
struct ResolvedConfig {
  SystemParams system;
  AomModel aom;
  AttackConfig attack;
  OpllConfig opll;
  GainTable gains = GainTable::measured();
  Json snapshot;  // merged document the structs were built from
};

/// Merges `patch` onto the preset defaults (RFC 7396 semantics) and converts
/// it. Relative table paths are resolved against `base_dir`. Throws
/// ConfigError on type errors or unknown keys and InvalidParameter when an
/// invariant is violated.
ResolvedConfig resolve_config(const Json& patch, Preset preset, const std::filesystem::path& base_dir = {});

/// Checks a config file against every invariant of every module, including
/// the attack lock limit. Returns one message per problem; empty means valid.
Diagnostics validate_config(const std::filesystem::path& path);

/// Same for an in-memory document.
Diagnostics validate_config(const Json& patch, const std::filesystem::path& base_dir = {});

/// Reads a two-column calibration CSV (header row required). The named
/// columns are located by header; other columns are ignored.
std::vector<std::pair<double, double>> load_table_csv(const std::filesystem::path& path, const std::string& x_column,
                                                      const std::string& y_column);

}  // namespace wsa
