#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "tsa/errors.hpp"
#include "tsa/train.hpp"

// Flat key-value config files: one `key = value` per line, '#' starts a
// comment, blank lines ignored. Keys must be TrainConfig field names;
// anything else is an error. The `betas` value is a comma pair.

namespace tsa {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline std::uint64_t parse_u64_value(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad value '" + value + "' for " + key);
    }
}

inline double parse_f64_value(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad value '" + value + "' for " + key);
    }
}

inline std::pair<std::string, std::string> split_pair(const std::string& key,
                                                      const std::string& value) {
    const std::size_t comma = value.find(',');
    if (comma == std::string::npos)
        throw ConfigError("value for " + key + " needs two comma-separated parts");
    return {trim(value.substr(0, comma)), trim(value.substr(comma + 1))};
}

// Walks `key = value` lines, feeding each pair to `apply`, which returns
// false for unknown keys.
inline void parse_kv_stream(std::istream& in,
                            const std::function<bool(const std::string&, const std::string&)>& apply) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        if (!apply(key, value))
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
}

// Handles the TrainConfig portion of a key-value pair; false if the key is
// not a TrainConfig field.
inline bool apply_train_key(TrainConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "batch_size") cfg.batch_size = parse_u64_value(key, value);
    else if (key == "base_lr") cfg.base_lr = parse_f64_value(key, value);
    else if (key == "weight_decay") cfg.weight_decay = parse_f64_value(key, value);
    else if (key == "warmup_steps") cfg.warmup_steps = parse_u64_value(key, value);
    else if (key == "max_epochs") cfg.max_epochs = parse_u64_value(key, value);
    else if (key == "patience") cfg.patience = parse_u64_value(key, value);
    else if (key == "seed") cfg.seed = parse_u64_value(key, value);
    else if (key == "eps") cfg.eps = parse_f64_value(key, value);
    else if (key == "betas") {
        const auto [a, b] = split_pair(key, value);
        cfg.beta1 = parse_f64_value(key, a);
        cfg.beta2 = parse_f64_value(key, b);
    } else {
        return false;
    }
    return true;
}

}  // namespace detail

inline TrainConfig parse_train_config(std::istream& in) {
    TrainConfig cfg;
    detail::parse_kv_stream(in, [&cfg](const std::string& key, const std::string& value) {
        return detail::apply_train_key(cfg, key, value);
    });
    cfg.validate();
    return cfg;
}

inline TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse_train_config(in);
}

}  // namespace tsa
