#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "triqkd/protocol.hpp"

namespace triqkd {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, std::size_t line)
        : std::runtime_error("config error at line " + std::to_string(line) + ": " + msg),
          line(line) {}
    std::size_t line;
};

// Flat key = value text with [section] headers; keys are exposed flattened as
// section.key. Environment variables with the TRIQKD_ prefix override any key
// (dots map to underscores, upper-cased: TRIQKD_SESSION_NUM_PULSES).
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);

    void apply_env_overrides(const char* prefix = "TRIQKD_");

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_real(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Builds a full session configuration; seeds derive from session.seed.
SessionConfig session_config_from(const Config& cfg);

}  // namespace triqkd
