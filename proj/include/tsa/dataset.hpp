#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsa/errors.hpp"
#include "tsa/labels.hpp"

namespace tsa {

// JSONL dataset format: one object per line with keys "id", "text",
// "target", "target_start", "target_end", "sentence_sentiment",
// "targeted_sentiment". Offsets count unicode scalar values.

namespace detail {

inline LabeledRecord record_from_json(const nlohmann::json& j, std::size_t line) {
    LabeledRecord r;
    const auto need = [&](const char* key) -> const nlohmann::json& {
        const auto it = j.find(key);
        if (it == j.end()) throw ParseError(line, std::string("missing key '") + key + "'");
        return *it;
    };
    const auto need_string = [&](const char* key) {
        const auto& v = need(key);
        if (!v.is_string()) throw ParseError(line, std::string("key '") + key + "' is not a string");
        return v.get<std::string>();
    };
    const auto need_offset = [&](const char* key) {
        const auto& v = need(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw InvariantViolation(line, key, "must be a non-negative integer");
        return static_cast<std::size_t>(v.get<long long>());
    };
    const auto need_label = [&](const char* key) {
        const auto s = need_string(key);
        const auto l = parse_label(s);
        if (!l) throw InvariantViolation(line, key, "unknown label '" + s + "'");
        return *l;
    };

    r.id = need_string("id");
    r.text = need_string("text");
    r.target = need_string("target");
    r.target_start = need_offset("target_start");
    r.target_end = need_offset("target_end");
    r.sentence_sentiment = need_label("sentence_sentiment");
    r.targeted_sentiment = need_label("targeted_sentiment");

    const std::string bad = check_record(r);
    if (!bad.empty()) throw InvariantViolation(line, bad, "record invariant failed");
    return r;
}

inline nlohmann::json record_to_json(const LabeledRecord& r) {
    return nlohmann::json{{"id", r.id},
                          {"text", r.text},
                          {"target", r.target},
                          {"target_start", r.target_start},
                          {"target_end", r.target_end},
                          {"sentence_sentiment", label_name(r.sentence_sentiment)},
                          {"targeted_sentiment", label_name(r.targeted_sentiment)}};
}

}  // namespace detail

inline std::vector<LabeledRecord> parse_dataset(std::istream& in) {
    std::vector<LabeledRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(lineno, e.what());
        }
        if (!j.is_object()) throw ParseError(lineno, "line is not a JSON object");
        out.push_back(detail::record_from_json(j, lineno));
    }
    return out;
}

inline std::vector<LabeledRecord> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_dataset(in);
}

inline void write_dataset(std::ostream& out, const std::vector<LabeledRecord>& records) {
    for (const auto& r : records) out << detail::record_to_json(r).dump() << '\n';
}

inline void save_dataset(const std::string& path, const std::vector<LabeledRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_dataset(out, records);
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace tsa
