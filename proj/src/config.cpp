#include "triqkd/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

extern "C" char** environ;

namespace triqkd {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

Config Config::parse_text(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("unterminated section header", line_no);
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", line_no);
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

namespace {

const char* const kKnownKeys[] = {
    "session.num_pulses", "session.seed",          "session.abort_threshold",
    "session.q_slack",    "channel.bob.model",     "channel.charlie.model",
    "code.target_failure", "code.registry",
};

}  // namespace

void Config::apply_env_overrides(const char* prefix) {
    const std::string pre(prefix);
    for (char** e = environ; e && *e; ++e) {
        std::string entry(*e);
        if (entry.rfind(pre, 0) != 0) continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string raw = entry.substr(pre.size(), eq - pre.size());
        std::string value = entry.substr(eq + 1);

        std::string lowered;
        std::vector<std::size_t> seps;
        for (char c : raw) {
            if (c == '_') seps.push_back(lowered.size());
            lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }

        // each _ in the variable name is either a section dot or a literal _;
        // pick the first assignment matching an existing or well-known key
        std::string chosen;
        if (seps.size() > 12) seps.clear();
        for (std::size_t bits = 0; bits < (std::size_t(1) << seps.size()) && chosen.empty();
             ++bits) {
            std::string candidate = lowered;
            for (std::size_t i = 0; i < seps.size(); ++i)
                if (!((bits >> i) & 1)) candidate[seps[i]] = '.';
            if (values_.count(candidate)) {
                chosen = candidate;
                break;
            }
            for (const char* known : kKnownKeys)
                if (candidate == known) {
                    chosen = candidate;
                    break;
                }
        }
        if (chosen.empty()) {
            chosen = lowered;
            for (std::size_t s : seps) chosen[s] = '.';
        }
        values_[chosen] = value;
    }
}

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

double Config::get_real(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        double d = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "' is not a real number: " + *v);
    }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        std::uint64_t u = std::stoull(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        return u;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "' is not an integer: " + *v);
    }
}

SessionConfig session_config_from(const Config& cfg) {
    SessionConfig sc;
    sc.num_pulses = static_cast<std::size_t>(cfg.get_u64("session.num_pulses", 4096));
    sc.abort_threshold = cfg.get_real("session.abort_threshold", 0.0);
    sc.q_slack = cfg.get_real("session.q_slack", 0.0);
    sc.channel_bob = parse_channel(cfg.get_or("channel.bob.model", "ideal"));
    sc.channel_charlie = parse_channel(cfg.get_or("channel.charlie.model", "ideal"));
    sc.target_failure = cfg.get_real("code.target_failure", 0.05);
    if (auto reg = cfg.get("code.registry")) {
        std::istringstream is(*reg);
        std::string fam;
        while (std::getline(is, fam, ',')) {
            fam.erase(0, fam.find_first_not_of(" \t"));
            fam.erase(fam.find_last_not_of(" \t") + 1);
            if (!fam.empty()) sc.registry.push_back(fam);
        }
    }
    sc.seeds = Seeds::derive(cfg.get_u64("session.seed", 1));
    return sc;
}

}  // namespace triqkd
