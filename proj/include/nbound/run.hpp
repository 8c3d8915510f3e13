#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "nbound/core.hpp"

namespace nb {

enum class Command { bound, classical, verify_constants, eig, capacity, sweep };
enum class Format { json, csv };

const char* to_string(Command c) noexcept;
const char* to_string(Format f) noexcept;
std::optional<Command> parse_command(const std::string& s);
std::optional<Format> parse_format(const std::string& s);

struct RunConfig {
  Command command = Command::bound;
  std::string input;   // flat key-value file
  std::string output;  // empty or "-" for stdout
  Format format = Format::json;
  std::uint64_t seed = 1;
  KeyValues overrides;  // command-line values that replace config keys
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Computes the report text for already-parsed key-values. Throws ConfigError,
/// InvalidInput or NumericalError.
std::string render(Command command, Format format, const KeyValues& kv, std::uint64_t seed);

/// Reads the config, renders, writes the output, and maps failures to exit codes
/// with a one-line diagnostic on `err`.
int run(const RunConfig& config, std::ostream& err);

}  // namespace nb
