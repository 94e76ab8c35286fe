#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "botmine/csv.hpp"
#include "botmine/domain.hpp"
#include "botmine/hash.hpp"
#include "botmine/http.hpp"
#include "botmine/util.hpp"

namespace botmine {

struct LlmConfig {
    double temperature = 1.0;
    double top_p = 0.15;
    int samples = 10;
    std::string model_name = "gpt-4o";
};

inline void validate(const LlmConfig& cfg) {
    if (cfg.temperature < 0) throw ConfigError("llm.temperature must be >= 0");
    if (cfg.top_p <= 0 || cfg.top_p > 1) throw ConfigError("llm.top_p must be in (0,1]");
    if (cfg.samples < 1) throw ConfigError("llm.samples must be >= 1");
}

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::string& prompt, const LlmConfig& cfg) = 0;
    virtual int request_count() const = 0;
};

inline std::string llm_request_key(const std::string& prompt, const LlmConfig& cfg) {
    json j{{"model", cfg.model_name},
           {"temperature", cfg.temperature},
           {"top_p", cfg.top_p},
           {"prompt", prompt}};
    return fnv1a64_hex(j.dump());
}

// Replays completions from one bundle file:
//   { "<request key>": {"responses": ["...", "..."]} }  (served by occurrence)
class ReplayLlmClient : public LlmClient {
public:
    explicit ReplayLlmClient(const fs::path& bundle_file) : path_(bundle_file) {
        if (fs::exists(bundle_file)) bundle_ = json::parse(read_file(bundle_file));
        else bundle_ = json::object();
    }

    std::string complete(const std::string& prompt, const LlmConfig& cfg) override {
        ++count_;
        std::string key = llm_request_key(prompt, cfg);
        if (!bundle_.contains(key)) {
            throw LlmUnavailableError("no recorded completion for request " + key + " in " +
                                      path_.string());
        }
        const auto& rs = bundle_[key]["responses"];
        return rs[std::min(occurrence_[key]++, rs.size() - 1)].get<std::string>();
    }

    int request_count() const override { return count_; }

    static void record(json& bundle, const std::string& prompt, const LlmConfig& cfg,
                       const std::string& response) {
        bundle[llm_request_key(prompt, cfg)]["responses"].push_back(response);
    }

private:
    fs::path path_;
    json bundle_;
    std::map<std::string, size_t> occurrence_;
    int count_ = 0;
};

class LiveLlmClient : public LlmClient {
public:
    explicit LiveLlmClient(std::string base_url, const char* key_env = "BOTMINE_LLM_KEY")
        : base_url_(std::move(base_url)) {
        const char* key = std::getenv(key_env);
        if (!key || !*key) {
            throw AuthMissingError(std::string("live mode requested but ") + key_env +
                                   " is not set");
        }
        api_key_ = key;
    }

    std::string complete(const std::string& prompt, const LlmConfig& cfg) override {
        ++count_;
        httplib::Client cli(base_url_);
        cli.set_read_timeout(120, 0);
        httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
        json payload{{"model", cfg.model_name},
                     {"temperature", cfg.temperature},
                     {"top_p", cfg.top_p},
                     {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})}};
        auto res = cli.Post("/v1/chat/completions", headers, payload.dump(), "application/json");
        if (!res || res->status != 200) {
            throw LlmUnavailableError("completion request failed with status " +
                                      std::to_string(res ? res->status : 0));
        }
        json body = json::parse(res->body);
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    }

    int request_count() const override { return count_; }

private:
    std::string base_url_;
    std::string api_key_;
    int count_ = 0;
};

enum class SourceKind { ActionCode, Readme };

inline const char* kind_label(SourceKind k) {
    return k == SourceKind::ActionCode ? "action code file" : "README file";
}

// The extraction and merge wording lives in template files so it can be
// audited and swapped without recompiling.
struct PromptTemplates {
    std::string extraction;
    std::string merge;
    std::string topic;

    static PromptTemplates load(const fs::path& extraction_file, const fs::path& merge_file,
                                const fs::path& topic_file) {
        return {read_file(extraction_file), read_file(merge_file), read_file(topic_file)};
    }
};

namespace detail {

inline std::string substitute(std::string text, const std::string& slot,
                              const std::string& value) {
    std::string marker = "{{" + slot + "}}";
    size_t pos = 0;
    while ((pos = text.find(marker, pos)) != std::string::npos) {
        text.replace(pos, marker.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace detail

inline std::string render_extraction_prompt(const PromptTemplates& t, SourceKind kind,
                                            const std::string& text) {
    std::string p = detail::substitute(t.extraction, "KIND", kind_label(kind));
    return detail::substitute(p, "TEXT", text);
}

inline std::string render_merge_prompt(const PromptTemplates& t, SourceKind kind,
                                       const std::string& text,
                                       const std::vector<std::string>& samples) {
    std::string rendered;
    for (size_t i = 0; i < samples.size(); ++i) {
        rendered += "--- candidate list " + std::to_string(i + 1) + " ---\n";
        rendered += trim(samples[i]);
        rendered += "\n";
    }
    std::string p = detail::substitute(t.merge, "KIND", kind_label(kind));
    p = detail::substitute(p, "TEXT", text);
    return detail::substitute(p, "SAMPLES", rendered);
}

// One service name per line (bullets and numbering tolerated); NONE means an
// empty list.
inline std::set<std::string> parse_service_list(const std::string& response) {
    std::set<std::string> out;
    for (const auto& raw : split_lines(response)) {
        for (auto& piece : split(raw, ',')) {
            std::string s = trim(piece);
            while (!s.empty() && (s[0] == '-' || s[0] == '*' || s[0] == '.')) s = trim(s.substr(1));
            if (!s.empty() && std::isdigit(static_cast<unsigned char>(s[0]))) {
                size_t i = 0;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) i++;
                if (i < s.size() && (s[i] == '.' || s[i] == ')')) s = trim(s.substr(i + 1));
            }
            if (s.empty()) continue;
            std::string lower = to_lower(s);
            if (lower == "none" || lower == "no external services") continue;
            out.insert(s);
        }
    }
    return out;
}

struct ServiceExtraction {
    std::set<std::string> services;
    bool manual_review = false;  // merge response stayed unparseable after a retry
    int requests_made = 0;
};

// The sampling protocol: exactly cfg.samples extraction requests, then one
// merge request over the analyzed element and all sample outputs.
inline ServiceExtraction extract_services(const std::string& text, SourceKind kind,
                                          LlmClient& client, const LlmConfig& cfg,
                                          const PromptTemplates& templates) {
    if (trim(text).empty()) throw PreconditionError("extract_services requires non-empty text");
    ServiceExtraction out;
    std::vector<std::string> samples;
    std::string extraction_prompt = render_extraction_prompt(templates, kind, text);
    for (int i = 0; i < cfg.samples; ++i) {
        samples.push_back(client.complete(extraction_prompt, cfg));
        out.requests_made++;
    }
    std::string merge_prompt = render_merge_prompt(templates, kind, text, samples);
    std::string merged = client.complete(merge_prompt, cfg);
    out.requests_made++;
    if (trim(merged).empty()) {
        merged = client.complete(merge_prompt, cfg);  // one retry
        out.requests_made++;
        if (trim(merged).empty()) {
            out.manual_review = true;
            return out;
        }
    }
    out.services = parse_service_list(merged);
    return out;
}

struct PrfMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

struct EvalCase {
    std::string unit_id;
    std::string text;
    SourceKind kind = SourceKind::ActionCode;
    std::set<std::string> truth;
};

namespace detail {

inline PrfMetrics set_metrics(const std::set<std::string>& predicted,
                              const std::set<std::string>& truth) {
    size_t hit = 0;
    for (const auto& p : predicted) {
        if (truth.count(p)) hit++;
    }
    PrfMetrics m;
    m.precision = predicted.empty() ? (truth.empty() ? 1.0 : 0.0)
                                    : static_cast<double>(hit) / predicted.size();
    m.recall = truth.empty() ? 1.0 : static_cast<double>(hit) / truth.size();
    m.f_score = (m.precision + m.recall) > 0
                    ? 2 * m.precision * m.recall / (m.precision + m.recall)
                    : 0.0;
    return m;
}

}  // namespace detail

// Mean set-precision/recall/F1 of the extraction protocol against a ground
// truth, averaged over units and repetitions.
inline PrfMetrics evaluate_prompt_config(const std::vector<EvalCase>& cases,
                                         const LlmConfig& cfg, int repetitions,
                                         LlmClient& client, const PromptTemplates& templates) {
    if (cases.empty()) throw PreconditionError("evaluation requires a non-empty ground truth");
    if (repetitions < 1) throw PreconditionError("repetitions must be >= 1");
    PrfMetrics sum;
    long n = 0;
    for (int rep = 0; rep < repetitions; ++rep) {
        for (const auto& c : cases) {
            auto predicted = extract_services(c.text, c.kind, client, cfg, templates).services;
            PrfMetrics m = detail::set_metrics(predicted, c.truth);
            sum.precision += m.precision;
            sum.recall += m.recall;
            sum.f_score += m.f_score;
            n++;
        }
    }
    return {sum.precision / n, sum.recall / n, sum.f_score / n};
}

inline std::vector<std::pair<LlmConfig, PrfMetrics>> evaluate_prompt_grid(
    const std::vector<EvalCase>& cases, const std::vector<double>& temperatures,
    const std::vector<double>& top_ps, const LlmConfig& base, int repetitions, LlmClient& client,
    const PromptTemplates& templates) {
    std::vector<std::pair<LlmConfig, PrfMetrics>> out;
    for (double t : temperatures) {
        for (double p : top_ps) {
            LlmConfig cfg = base;
            cfg.temperature = t;
            cfg.top_p = p;
            out.emplace_back(cfg,
                             evaluate_prompt_config(cases, cfg, repetitions, client, templates));
        }
    }
    return out;
}

// Canonical name per alias, persisted across runs so re-applying a review is
// idempotent.
struct AliasTable {
    std::map<std::string, std::string> canonical_of;

    std::string apply(const std::string& name) const {
        auto it = canonical_of.find(name);
        return it == canonical_of.end() ? name : it->second;
    }

    std::set<std::string> normalize(const std::set<std::string>& names) const {
        std::set<std::string> out;
        for (const auto& n : names) out.insert(apply(n));
        return out;
    }

    static AliasTable load(const fs::path& file) {
        AliasTable t;
        if (fs::exists(file)) {
            for (auto& [k, v] : json::parse(read_file(file)).items()) {
                t.canonical_of[k] = v.get<std::string>();
            }
        }
        return t;
    }

    void save(const fs::path& file) const {
        write_file(file, json(canonical_of).dump(2) + "\n");
    }
};

struct ServiceReport {
    std::string unit_id;
    std::set<std::string> from_code;
    std::set<std::string> from_readme;
    std::set<std::string> final;
    std::set<std::string> discontinued;
    bool review_applied = false;
    bool manual_review = false;     // some extraction needed a human look
    bool discontinued_flag = false;  // every service the unit uses is discontinued
};

inline void export_service_review(const std::vector<ServiceReport>& reports,
                                  const fs::path& review_file) {
    std::string csv = csv_row({"unit_id", "raw_name", "canonical_name", "action"});
    for (const auto& r : reports) {
        for (const auto& name : r.final) {
            csv += csv_row({r.unit_id, name, name, "keep"});
        }
    }
    write_file(review_file, csv);
}

// Applies the manual service review: normalizations, removals, and
// discontinued markings. Missing review file exports the candidates instead.
inline std::vector<ServiceReport> apply_service_review(std::vector<ServiceReport> reports,
                                                       const fs::path& review_file,
                                                       AliasTable& aliases) {
    if (!fs::exists(review_file)) {
        export_service_review(reports, review_file);
        return reports;
    }
    auto rows = csv_parse(read_file(review_file));
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < reports.size(); ++i) index[reports[i].unit_id] = i;
    std::map<std::string, std::set<std::string>> removals;
    std::map<std::string, std::set<std::string>> discontinued;
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        int row_no = static_cast<int>(r) + 1;
        if (r == 0 && !row.empty() && row[0] == "unit_id") continue;  // header
        if (row.size() < 4) throw ReviewError("malformed review row", row_no);
        auto it = index.find(row[0]);
        if (it == index.end()) throw ReviewError("unknown unit id '" + row[0] + "'", row_no);
        std::string raw = trim(row[1]);
        std::string canonical = trim(row[2]).empty() ? raw : trim(row[2]);
        std::string action = to_lower(trim(row[3]));
        if (raw.empty()) throw ReviewError("empty service name", row_no);
        if (canonical != raw) aliases.canonical_of[raw] = canonical;
        if (action == "keep") {
            // normalization only
        } else if (action == "remove") {
            removals[row[0]].insert(canonical);
        } else if (action == "discontinued") {
            discontinued[row[0]].insert(canonical);
        } else {
            throw ReviewError("unknown action '" + row[3] + "'", row_no);
        }
    }
    for (auto& report : reports) {
        std::set<std::string> merged;
        merged.insert(report.from_code.begin(), report.from_code.end());
        merged.insert(report.from_readme.begin(), report.from_readme.end());
        report.final = aliases.normalize(merged);
        for (const auto& name : removals[report.unit_id]) report.final.erase(name);
        report.discontinued.clear();
        for (const auto& name : discontinued[report.unit_id]) {
            if (report.final.count(name)) report.discontinued.insert(name);
        }
        report.discontinued_flag =
            !report.final.empty() &&
            std::includes(report.discontinued.begin(), report.discontinued.end(),
                          report.final.begin(), report.final.end());
        for (const auto& name : report.discontinued) report.final.erase(name);
        report.review_applied = true;
    }
    return reports;
}

struct TopicContext {
    std::string unit_id;
    std::string repo_name;
    std::string description;
    std::vector<std::string> readme_texts;
    DomainModel model;
};

struct TopicResult {
    std::string topic;
    bool novel = false;
    bool manual_review = false;
};

inline std::string render_topic_prompt(const PromptTemplates& t, const TopicContext& ctx,
                                       const std::vector<std::string>& categories) {
    auto join_set = [](const std::set<std::string>& s) {
        return join(std::vector<std::string>(s.begin(), s.end()), ", ");
    };
    std::string params = "intents: " + join_set(ctx.model.intents) + "\n" +
                         "entities: " + join_set(ctx.model.entities) + "\n" + "slots: ";
    std::vector<std::string> slot_names;
    for (const auto& [name, type] : ctx.model.slots) slot_names.push_back(name + " (" + type + ")");
    params += join(slot_names, ", ") + "\n" + "actions: " + join_set(ctx.model.actions);

    std::string p = detail::substitute(t.topic, "REPO_NAME", ctx.repo_name);
    p = detail::substitute(p, "DESCRIPTION", ctx.description);
    p = detail::substitute(p, "READMES", join(ctx.readme_texts, "\n---\n"));
    p = detail::substitute(p, "PARAMETERS", params);
    return detail::substitute(p, "CATEGORIES", join(categories, ", "));
}

// Single-request topic classification against a fixed category list. Novel
// topics are kept but flagged.
inline TopicResult extract_topic(const TopicContext& ctx,
                                 const std::vector<std::string>& categories, LlmClient& client,
                                 const LlmConfig& cfg, const PromptTemplates& templates) {
    std::string prompt = render_topic_prompt(templates, ctx, categories);
    std::string response = trim(client.complete(prompt, cfg));
    if (response.empty()) {
        response = trim(client.complete(prompt, cfg));  // one retry
        if (response.empty()) return {"", false, true};
    }
    std::string first_line = response;
    for (const auto& line : split_lines(response)) {
        if (!trim(line).empty()) {
            first_line = trim(line);
            break;
        }
    }
    for (const auto& c : categories) {
        if (to_lower(c) == to_lower(first_line)) return {c, false, false};
    }
    return {first_line, true, false};
}

}  // namespace botmine
