#pragma once

#include <optional>
#include <string>
#include <vector>

#include "botmine/curate.hpp"
#include "botmine/domain.hpp"
#include "botmine/enrich.hpp"
#include "botmine/language.hpp"
#include "botmine/types.hpp"

namespace botmine {

struct EmptyManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One fully annotated chatbot as stored in a dataset manifest.
struct ManifestUnit {
    std::string id;
    RepoRecord repo;
    std::string folder;
    std::vector<std::string> domain_files;
    std::vector<std::string> action_files;
    std::vector<std::string> readme_files;
    DomainModel domain;
    LanguageAnnotation languages;
    std::optional<std::string> duplicate_group;
    std::optional<SelectionVerdict> selection;
    std::optional<ServiceReport> services;
    std::optional<TopicResult> topic;
};

// The pipeline's durable output: annotated units plus per-stage counts.
struct DatasetManifest {
    int manifest_version = 1;
    std::string dataset_name;
    std::string snapshot_date;
    std::vector<std::pair<std::string, long>> stage_counts;
    std::vector<ManifestUnit> units;
};

namespace detail {

// Manifests stay lean; stage checkpoints additionally carry the response
// texts needed by the language stage.
inline json domain_to_json(const DomainModel& m, bool include_responses = false) {
    json j{{"intents", m.intents},
           {"entities", m.entities},
           {"slots", m.slots},
           {"actions", m.actions},
           {"custom_actions", m.custom_actions},
           {"response_actions", m.response_actions},
           {"version", m.version ? json(*m.version) : json(nullptr)},
           {"version_source", m.version_source}};
    if (include_responses) j["responses"] = m.responses;
    return j;
}

inline DomainModel domain_from_json(const json& j) {
    DomainModel m;
    m.intents = j.value("intents", std::set<std::string>{});
    m.entities = j.value("entities", std::set<std::string>{});
    m.slots = j.value("slots", std::map<std::string, std::string>{});
    m.actions = j.value("actions", std::set<std::string>{});
    m.custom_actions = j.value("custom_actions", std::set<std::string>{});
    m.response_actions = j.value("response_actions", std::set<std::string>{});
    m.responses = j.value("responses", std::map<std::string, std::vector<std::string>>{});
    if (j.contains("version") && !j["version"].is_null()) {
        m.version = j["version"].get<std::string>();
    }
    m.version_source = j.value("version_source", "none");
    return m;
}

inline json languages_to_json(const LanguageAnnotation& a) {
    return json{{"training", a.training_langs},
                {"response", a.response_langs},
                {"overall", a.overall},
                {"needs_review", a.needs_review},
                {"reviewed", a.reviewed}};
}

inline LanguageAnnotation languages_from_json(const json& j, const std::string& unit_id) {
    LanguageAnnotation a;
    a.unit_id = unit_id;
    a.training_langs = j.value("training", std::set<std::string>{});
    a.response_langs = j.value("response", std::set<std::string>{});
    a.overall = j.value("overall", std::set<std::string>{});
    a.needs_review = j.value("needs_review", false);
    a.reviewed = j.value("reviewed", false);
    return a;
}

inline json selection_to_json(const SelectionVerdict& v) {
    json flags = json::object();
    for (const auto& [stage, ok] : v.stage_flags) flags[to_string(stage)] = ok;
    return json{{"passed", v.passed},
                {"failed_stage", v.failed_stage ? json(to_string(*v.failed_stage)) : json(nullptr)},
                {"flags", flags}};
}

inline SelectionVerdict selection_from_json(const json& j, const std::string& unit_id) {
    SelectionVerdict v;
    v.unit_id = unit_id;
    v.passed = j.value("passed", false);
    auto stage_by_name = [](const std::string& name) -> SelectionStage {
        for (SelectionStage s :
             {SelectionStage::Dialogue, SelectionStage::Functional, SelectionStage::English,
              SelectionStage::Version, SelectionStage::Stars,
              SelectionStage::DiscontinuedService}) {
            if (name == to_string(s)) return s;
        }
        throw ConfigError("unknown selection stage '" + name + "'");
    };
    if (j.contains("failed_stage") && !j["failed_stage"].is_null()) {
        v.failed_stage = stage_by_name(j["failed_stage"].get<std::string>());
    }
    if (j.contains("flags")) {
        for (auto& [name, ok] : j["flags"].items()) {
            v.stage_flags[stage_by_name(name)] = ok.get<bool>();
        }
    }
    return v;
}

inline json services_to_json(const ServiceReport& s) {
    return json{{"from_code", s.from_code},
                {"from_readme", s.from_readme},
                {"final", s.final},
                {"discontinued", s.discontinued},
                {"review_applied", s.review_applied},
                {"manual_review", s.manual_review},
                {"discontinued_flag", s.discontinued_flag}};
}

inline ServiceReport services_from_json(const json& j, const std::string& unit_id) {
    ServiceReport s;
    s.unit_id = unit_id;
    s.from_code = j.value("from_code", std::set<std::string>{});
    s.from_readme = j.value("from_readme", std::set<std::string>{});
    s.final = j.value("final", std::set<std::string>{});
    s.discontinued = j.value("discontinued", std::set<std::string>{});
    s.review_applied = j.value("review_applied", false);
    s.manual_review = j.value("manual_review", false);
    s.discontinued_flag = j.value("discontinued_flag", false);
    return s;
}

}  // namespace detail

inline void to_json(json& j, const ManifestUnit& u) {
    j = json{{"id", u.id},
             {"repo", u.repo},
             {"folder", u.folder},
             {"domain_files", u.domain_files},
             {"action_files", u.action_files},
             {"readme_files", u.readme_files},
             {"domain", detail::domain_to_json(u.domain)},
             {"languages", detail::languages_to_json(u.languages)},
             {"duplicate_group", u.duplicate_group ? json(*u.duplicate_group) : json(nullptr)},
             {"selection", u.selection ? detail::selection_to_json(*u.selection) : json(nullptr)},
             {"services", u.services ? detail::services_to_json(*u.services) : json(nullptr)},
             {"topic", u.topic ? json{{"name", u.topic->topic}, {"novel", u.topic->novel}}
                               : json(nullptr)}};
}

inline void from_json(const json& j, ManifestUnit& u) {
    j.at("id").get_to(u.id);
    j.at("repo").get_to(u.repo);
    u.folder = j.value("folder", ".");
    u.domain_files = j.value("domain_files", std::vector<std::string>{});
    u.action_files = j.value("action_files", std::vector<std::string>{});
    u.readme_files = j.value("readme_files", std::vector<std::string>{});
    u.domain = detail::domain_from_json(j.at("domain"));
    u.languages = detail::languages_from_json(j.at("languages"), u.id);
    if (j.contains("duplicate_group") && !j["duplicate_group"].is_null()) {
        u.duplicate_group = j["duplicate_group"].get<std::string>();
    }
    if (j.contains("selection") && !j["selection"].is_null()) {
        u.selection = detail::selection_from_json(j["selection"], u.id);
    }
    if (j.contains("services") && !j["services"].is_null()) {
        u.services = detail::services_from_json(j["services"], u.id);
    }
    if (j.contains("topic") && !j["topic"].is_null()) {
        TopicResult t;
        t.topic = j["topic"].value("name", "");
        t.novel = j["topic"].value("novel", false);
        u.topic = t;
    }
}

inline void to_json(json& j, const DatasetManifest& m) {
    json counts = json::array();
    for (const auto& [stage, count] : m.stage_counts) {
        counts.push_back(json::array({stage, count}));
    }
    j = json{{"manifest_version", m.manifest_version},
             {"dataset_name", m.dataset_name},
             {"snapshot_date", m.snapshot_date},
             {"stage_counts", counts},
             {"units", m.units}};
}

inline void from_json(const json& j, DatasetManifest& m) {
    m.manifest_version = j.value("manifest_version", 1);
    m.dataset_name = j.value("dataset_name", "");
    m.snapshot_date = j.value("snapshot_date", "");
    m.stage_counts.clear();
    if (j.contains("stage_counts")) {
        for (const auto& entry : j["stage_counts"]) {
            m.stage_counts.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<long>());
        }
    }
    m.units = j.value("units", std::vector<ManifestUnit>{});
}

inline void save_manifest(const DatasetManifest& m, const fs::path& file) {
    write_file(file, json(m).dump(2) + "\n");
}

inline DatasetManifest load_manifest(const fs::path& file) {
    return json::parse(read_file(file)).get<DatasetManifest>();
}

}  // namespace botmine
