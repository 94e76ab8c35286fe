#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "botmine/csv.hpp"
#include "botmine/extract.hpp"
#include "botmine/hash.hpp"
#include "botmine/http.hpp"
#include "botmine/random.hpp"
#include "botmine/util.hpp"

namespace botmine {

struct LanguageAnnotation {
    std::string unit_id;
    std::set<std::string> training_langs;
    std::set<std::string> response_langs;
    std::set<std::string> overall;
    bool needs_review = false;
    bool reviewed = false;
};

inline const std::set<std::string>& default_intent_denylist() {
    static const std::set<std::string> names{"nlu_fallback", "out_of_scope", "restart", "back",
                                             "session_start"};
    return names;
}

namespace detail {

// "- phrase" lines of an NLU examples block; entity annotations left as-is.
inline std::vector<std::string> parse_examples_block(const std::string& block) {
    std::vector<std::string> out;
    for (const auto& raw : split_lines(block)) {
        std::string line = trim(raw);
        if (starts_with(line, "- ")) out.push_back(trim(line.substr(2)));
    }
    return out;
}

inline void collect_nlu_yaml(const std::string& text,
                             std::map<std::string, std::vector<std::string>>& examples) {
    std::vector<YAML::Node> docs;
    try {
        docs = YAML::LoadAll(text);
    } catch (const YAML::Exception&) {
        return;
    }
    for (const auto& doc : docs) {
        if (!doc.IsMap() || !doc["nlu"] || !doc["nlu"].IsSequence()) continue;
        for (const auto& entry : doc["nlu"]) {
            if (!entry.IsMap() || !entry["intent"] || !entry["intent"].IsScalar()) continue;
            std::string intent = entry["intent"].as<std::string>();
            auto& bucket = examples[intent];
            auto ex = entry["examples"];
            if (!ex) continue;
            if (ex.IsScalar()) {
                for (auto& p : parse_examples_block(ex.as<std::string>())) {
                    bucket.push_back(std::move(p));
                }
            } else if (ex.IsSequence()) {
                for (const auto& e : ex) {
                    if (e.IsScalar()) bucket.push_back(e.as<std::string>());
                }
            }
        }
    }
}

// Legacy Markdown NLU: "## intent:name" headers followed by "- phrase" lines.
inline void collect_nlu_markdown(const std::string& text,
                                 std::map<std::string, std::vector<std::string>>& examples) {
    std::string current;
    for (const auto& raw : split_lines(text)) {
        std::string line = trim(raw);
        if (starts_with(line, "##")) {
            std::string header = trim(line.substr(2));
            if (starts_with(header, "intent:")) {
                current = trim(header.substr(7));
            } else {
                current.clear();
            }
        } else if (!current.empty() && starts_with(line, "- ")) {
            examples[current].push_back(trim(line.substr(2)));
        }
    }
}

}  // namespace detail

// All NLU example phrases found under the unit folder, grouped by intent.
inline std::map<std::string, std::vector<std::string>> collect_training_examples(
    const ChatbotUnit& unit, const fs::path& tree_root) {
    std::map<std::string, std::vector<std::string>> examples;
    for (const auto& rel : list_files(tree_root)) {
        if (!detail::in_folder(rel, unit.folder)) continue;
        std::string ext = extension_lower(rel);
        std::string text;
        if (ext == ".yml" || ext == ".yaml") {
            try {
                text = read_file(tree_root / rel);
            } catch (const IoError&) {
                continue;
            }
            detail::collect_nlu_yaml(text, examples);
        } else if (ext == ".md" && !detail::is_readme(rel)) {
            try {
                text = read_file(tree_root / rel);
            } catch (const IoError&) {
                continue;
            }
            detail::collect_nlu_markdown(text, examples);
        }
    }
    return examples;
}

// Example phrases from two seed-selected non-default intents. Empty result
// means the unit has no usable training data.
inline std::vector<std::string> sample_training_phrases(
    const ChatbotUnit& unit, const fs::path& tree_root, uint64_t seed,
    const std::set<std::string>& denylist = default_intent_denylist()) {
    auto examples = collect_training_examples(unit, tree_root);
    std::vector<std::string> candidates;
    for (const auto& [intent, phrases] : examples) {
        if (!phrases.empty() && !denylist.count(intent)) candidates.push_back(intent);
    }
    std::mt19937 rng(static_cast<uint32_t>(seed ^ fnv1a64(unit.id)));
    std::vector<std::string> out;
    for (size_t idx : sample_indices(rng, candidates.size(), 2)) {
        const auto& phrases = examples[candidates[idx]];
        out.insert(out.end(), phrases.begin(), phrases.end());
    }
    return out;
}

// Mirror of the training-side sampling applied to response keys.
inline std::vector<std::string> sample_response_texts(
    const std::map<std::string, std::vector<std::string>>& responses,
    const std::string& unit_id, uint64_t seed) {
    std::vector<std::string> keys;
    for (const auto& [name, texts] : responses) {
        if (!texts.empty()) keys.push_back(name);
    }
    std::mt19937 rng(static_cast<uint32_t>(seed ^ fnv1a64(unit_id)));
    std::vector<std::string> out;
    for (size_t idx : sample_indices(rng, keys.size(), 2)) {
        const auto& texts = responses.at(keys[idx]);
        out.insert(out.end(), texts.begin(), texts.end());
    }
    return out;
}

class DetectorClient {
public:
    virtual ~DetectorClient() = default;
    // One entry per input text: the set of detected language codes.
    virtual std::vector<std::set<std::string>> detect(const std::vector<std::string>& texts) = 0;
    virtual int request_count() const = 0;
};

inline std::string detector_request_key(const std::vector<std::string>& texts) {
    return fnv1a64_hex(json(texts).dump());
}

// Replays detector responses from one bundle file:
//   { "<request key>": {"responses": [ [["en"],["en","it"]], ... ]} }
class ReplayDetectorClient : public DetectorClient {
public:
    explicit ReplayDetectorClient(const fs::path& bundle_file) : path_(bundle_file) {
        if (fs::exists(bundle_file)) bundle_ = json::parse(read_file(bundle_file));
        else bundle_ = json::object();
    }

    std::vector<std::set<std::string>> detect(const std::vector<std::string>& texts) override {
        ++count_;
        std::string key = detector_request_key(texts);
        if (!bundle_.contains(key)) {
            throw DetectorUnavailableError("no recorded detection for request " + key + " in " +
                                           path_.string());
        }
        const auto& rs = bundle_[key]["responses"];
        const auto& resp = rs[std::min(occurrence_[key]++, rs.size() - 1)];
        std::vector<std::set<std::string>> out;
        for (const auto& langs : resp) out.push_back(langs.get<std::set<std::string>>());
        if (out.size() != texts.size()) {
            throw DetectorUnavailableError("recorded detection for " + key +
                                           " does not match batch size");
        }
        return out;
    }

    int request_count() const override { return count_; }

    static void record(json& bundle, const std::vector<std::string>& texts,
                       const std::vector<std::vector<std::string>>& detections) {
        bundle[detector_request_key(texts)]["responses"].push_back(detections);
    }

private:
    fs::path path_;
    json bundle_;
    std::map<std::string, size_t> occurrence_;
    int count_ = 0;
};

class LiveDetectorClient : public DetectorClient {
public:
    explicit LiveDetectorClient(std::string base_url,
                                const char* key_env = "BOTMINE_DETECTOR_KEY")
        : base_url_(std::move(base_url)) {
        const char* key = std::getenv(key_env);
        if (!key || !*key) {
            throw AuthMissingError(std::string("live mode requested but ") + key_env +
                                   " is not set");
        }
        api_key_ = key;
    }

    std::vector<std::set<std::string>> detect(const std::vector<std::string>& texts) override {
        ++count_;
        httplib::Client cli(base_url_);
        httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
        json payload{{"q", texts}};
        auto res = cli.Post("/0.2/detect", headers, payload.dump(), "application/json");
        if (!res || res->status != 200) {
            throw DetectorUnavailableError("detector request failed with status " +
                                           std::to_string(res ? res->status : 0));
        }
        json body = json::parse(res->body);
        std::vector<std::set<std::string>> out;
        for (const auto& per_text : body.at("data").at("detections")) {
            std::set<std::string> langs;
            for (const auto& det : per_text) langs.insert(det.at("language").get<std::string>());
            out.push_back(std::move(langs));
        }
        if (out.size() != texts.size()) {
            throw DetectorUnavailableError("detector returned wrong batch size");
        }
        return out;
    }

    int request_count() const override { return count_; }

private:
    std::string base_url_;
    std::string api_key_;
    int count_ = 0;
};

// Union of detected languages across texts, batched. Empty input issues no
// request at all.
inline std::set<std::string> detect_languages(const std::vector<std::string>& texts,
                                              DetectorClient& client, size_t batch_size = 50) {
    std::set<std::string> out;
    for (size_t i = 0; i < texts.size(); i += batch_size) {
        std::vector<std::string> batch(texts.begin() + i,
                                       texts.begin() + std::min(texts.size(), i + batch_size));
        for (const auto& langs : client.detect(batch)) out.insert(langs.begin(), langs.end());
    }
    return out;
}

inline LanguageAnnotation annotate_languages(const std::string& unit_id,
                                             const std::vector<std::string>& training_texts,
                                             const std::vector<std::string>& response_texts,
                                             DetectorClient& client, size_t batch_size = 50) {
    LanguageAnnotation a;
    a.unit_id = unit_id;
    a.training_langs = detect_languages(training_texts, client, batch_size);
    a.response_langs = detect_languages(response_texts, client, batch_size);
    a.overall.insert(a.training_langs.begin(), a.training_langs.end());
    a.overall.insert(a.response_langs.begin(), a.response_langs.end());
    a.needs_review = a.overall.size() > 1;
    return a;
}

inline std::string language_set_to_field(const std::set<std::string>& langs) {
    return join(std::vector<std::string>(langs.begin(), langs.end()), ";");
}

inline std::set<std::string> language_field_to_set(const std::string& field) {
    std::set<std::string> out;
    for (auto& part : split(field, ';')) {
        std::string code = trim(part);
        if (!code.empty()) out.insert(code);
    }
    return out;
}

inline void export_language_review(const std::vector<LanguageAnnotation>& annotations,
                                   const fs::path& review_file) {
    std::string csv = csv_row({"unit_id", "proposed_langs", "corrected_langs"});
    for (const auto& a : annotations) {
        if (a.needs_review && !a.reviewed) {
            csv += csv_row({a.unit_id, language_set_to_field(a.overall), ""});
        }
    }
    write_file(review_file, csv);
}

// Applies a manual language review. When the review file does not exist yet,
// the units needing review are exported to it and nothing changes.
inline std::vector<LanguageAnnotation> apply_review(std::vector<LanguageAnnotation> annotations,
                                                    const fs::path& review_file) {
    if (!fs::exists(review_file)) {
        export_language_review(annotations, review_file);
        return annotations;
    }
    auto rows = csv_parse(read_file(review_file));
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < annotations.size(); ++i) index[annotations[i].unit_id] = i;
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        int row_no = static_cast<int>(r) + 1;
        if (r == 0 && !row.empty() && row[0] == "unit_id") continue;  // header
        if (row.size() < 3) throw ReviewError("malformed review row", row_no);
        auto it = index.find(row[0]);
        if (it == index.end()) throw ReviewError("unknown unit id '" + row[0] + "'", row_no);
        std::set<std::string> corrected = language_field_to_set(row[2]);
        if (corrected.empty()) continue;  // row left unfilled by the reviewer
        auto& a = annotations[it->second];
        std::set<std::string> detected;
        detected.insert(a.training_langs.begin(), a.training_langs.end());
        detected.insert(a.response_langs.begin(), a.response_langs.end());
        for (const auto& code : corrected) {
            if (!detected.count(code)) {
                throw ReviewError("corrected language '" + code + "' was never detected for '" +
                                      row[0] + "'",
                                  row_no);
            }
        }
        a.overall = corrected;
        a.reviewed = true;
    }
    return annotations;
}

}  // namespace botmine
