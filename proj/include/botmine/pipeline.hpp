#pragma once

#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "botmine/classify.hpp"
#include "botmine/config.hpp"
#include "botmine/curate.hpp"
#include "botmine/dedup.hpp"
#include "botmine/domain.hpp"
#include "botmine/enrich.hpp"
#include "botmine/extract.hpp"
#include "botmine/harvest.hpp"
#include "botmine/language.hpp"
#include "botmine/manifest.hpp"
#include "botmine/parallel.hpp"
#include "botmine/report.hpp"

namespace botmine {

inline const std::vector<std::string>& pipeline_stage_order() {
    static const std::vector<std::string> order{"harvest", "classify", "extract",
                                                "domain",  "language", "dedup",
                                                "curate",  "enrich",   "report"};
    return order;
}

struct StageFailedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Stage statuses persisted between runs; a config change invalidates them.
struct PipelineState {
    std::string config_hash;
    std::map<std::string, std::string> stage_status;  // pending | done | failed

    static PipelineState load(const fs::path& checkpoint_dir) {
        PipelineState s;
        for (const auto& name : pipeline_stage_order()) s.stage_status[name] = "pending";
        fs::path file = checkpoint_dir / "state.json";
        if (fs::exists(file)) {
            json j = json::parse(read_file(file));
            s.config_hash = j.value("config_hash", "");
            if (j.contains("stages")) {
                for (auto& [k, v] : j["stages"].items()) {
                    if (s.stage_status.count(k)) s.stage_status[k] = v.get<std::string>();
                }
            }
        }
        return s;
    }

    void save(const fs::path& checkpoint_dir) const {
        json j{{"config_hash", config_hash}, {"stages", stage_status}};
        write_file(checkpoint_dir / "state.json", j.dump(2) + "\n");
    }

    bool done(const std::string& stage) const { return stage_status.at(stage) == "done"; }
};

inline void invalidate_downstream(PipelineState& state, const std::string& from_stage) {
    bool hit = false;
    for (const auto& name : pipeline_stage_order()) {
        if (name == from_stage) hit = true;
        if (hit) state.stage_status[name] = "pending";
    }
}

class Pipeline {
public:
    explicit Pipeline(Config cfg) : cfg_(std::move(cfg)) {}

    const Config& config() const { return cfg_; }

    RestClient& rest() {
        if (!rest_) {
            if (cfg_.mode == "replay") {
                rest_ = std::make_unique<ReplayRestClient>(cfg_.fixtures / "rest");
            } else {
                rest_ = std::make_unique<LiveRestClient>(cfg_.host_base_url);
            }
        }
        return *rest_;
    }

    DetectorClient& detector() {
        if (!detector_) {
            if (cfg_.mode == "replay") {
                detector_ = std::make_unique<ReplayDetectorClient>(cfg_.fixtures / "detector.json");
            } else {
                detector_ = std::make_unique<LiveDetectorClient>(cfg_.detector_base_url);
            }
        }
        return *detector_;
    }

    LlmClient& llm() {
        if (!llm_) {
            if (cfg_.mode == "replay") {
                llm_ = std::make_unique<ReplayLlmClient>(cfg_.fixtures / "llm.json");
            } else {
                llm_ = std::make_unique<LiveLlmClient>(cfg_.llm_base_url);
            }
        }
        return *llm_;
    }

    Sleeper sleeper() const { return cfg_.mode == "replay" ? no_sleep() : real_sleeper(); }

    fs::path tree_root(const RepoRecord& r) const {
        return cfg_.cache_dir / r.owner / r.name / r.snapshot_sha.value_or("");
    }

    // ---- stage: harvest -------------------------------------------------

    void stage_harvest() {
        HarvestQuery query{cfg_.keywords, cfg_.snapshot_date, cfg_.page_size};
        SearchOutcome outcome = search_repositories(query, rest(), {}, sleeper());
        StageLog log;
        log.warnings = outcome.warnings;

        std::vector<RepoRecord> pinned;
        for (auto& record : outcome.records) {
            try {
                pinned.push_back(pin_head_commit(record, rest(), {}, sleeper()));
            } catch (const NotFoundError& e) {
                log.drop(record.id(), std::string("vanished before pinning: ") + e.what());
            }
        }
        std::vector<const RepoRecord*> to_fetch;
        for (const auto& r : pinned) {
            if (!r.empty) to_fetch.push_back(&r);
        }
        parallel_for(to_fetch.size(), cfg_.parallelism, [&](size_t i) {
            fetch_tree(*to_fetch[i], cfg_.cache_dir, rest(), {}, sleeper());
        });

        json j{{"records", pinned},
               {"truncated", outcome.truncated},
               {"warnings", log.warnings},
               {"drops", log.drops}};
        write_file(cfg_.checkpoint_dir / "repos.json", j.dump(2) + "\n");
    }

    std::vector<RepoRecord> load_repos() const {
        json j = json::parse(read_file(cfg_.checkpoint_dir / "repos.json"));
        return j.at("records").get<std::vector<RepoRecord>>();
    }

    // ---- stage: classify ------------------------------------------------

    void stage_classify() {
        auto repos = load_repos();
        std::vector<const RepoRecord*> live;
        for (const auto& r : repos) {
            if (!r.empty) live.push_back(&r);
        }
        std::vector<std::vector<DomainCandidate>> results(live.size());
        std::vector<StageLog> logs(live.size());
        parallel_for(live.size(), cfg_.parallelism, [&](size_t i) {
            results[i] = find_domain_candidates(tree_root(*live[i]), &logs[i]);
        });
        json repos_json = json::object();
        std::string csv =
            csv_row({"repo", "n_valid", "n_invalid", "n_misclassified", "verdict"});
        for (size_t i = 0; i < live.size(); ++i) {
            long n_valid = 0, n_invalid = 0, n_mis = 0;
            json cands = json::array();
            for (const auto& c : results[i]) {
                cands.push_back(json{{"rel_path", c.rel_path}, {"status", to_string(c.status)}});
                if (c.status == CandidateStatus::Valid) n_valid++;
                if (c.status == CandidateStatus::SyntacticallyInvalid) n_invalid++;
                if (c.status == CandidateStatus::Misclassified) n_mis++;
            }
            bool chatbot = classify_repo(results[i]) == RepoClass::ChatbotRepo;
            repos_json[live[i]->id()] = json{{"candidates", cands},
                                             {"verdict", chatbot ? "chatbot" : "non_chatbot"}};
            csv += csv_row({live[i]->id(), std::to_string(n_valid), std::to_string(n_invalid),
                            std::to_string(n_mis), chatbot ? "chatbot" : "non_chatbot"});
        }
        write_file(cfg_.checkpoint_dir / "classification.csv", csv);
        write_file(cfg_.checkpoint_dir / "candidates.json", repos_json.dump(2) + "\n");
    }

    // ---- stage: extract -------------------------------------------------

    void stage_extract() {
        auto repos = load_repos();
        std::map<std::string, const RepoRecord*> by_id;
        for (const auto& r : repos) by_id[r.id()] = &r;
        json cands = json::parse(read_file(cfg_.checkpoint_dir / "candidates.json"));
        json units_json = json::array();
        for (auto& [repo_id, entry] : cands.items()) {
            if (entry.value("verdict", "") != "chatbot") continue;
            std::vector<std::string> valid;
            for (const auto& c : entry["candidates"]) {
                if (c.value("status", "") == "valid") valid.push_back(c["rel_path"]);
            }
            fs::path root = tree_root(*by_id.at(repo_id));
            for (auto& unit : partition_into_units(repo_id, valid)) {
                unit = attach_support_files(unit, root);
                units_json.push_back(json{{"id", unit.id},
                                          {"repo_id", unit.repo_id},
                                          {"folder", unit.folder},
                                          {"domain_files", unit.domain_files},
                                          {"action_files", unit.action_files},
                                          {"readme_files", unit.readme_files}});
            }
        }
        write_file(cfg_.checkpoint_dir / "units.json", units_json.dump(2) + "\n");
    }

    std::vector<ChatbotUnit> load_units() const {
        std::vector<ChatbotUnit> units;
        for (const auto& j : json::parse(read_file(cfg_.checkpoint_dir / "units.json"))) {
            ChatbotUnit u;
            u.id = j.at("id");
            u.repo_id = j.at("repo_id");
            u.folder = j.at("folder");
            u.domain_files = j.at("domain_files").get<std::vector<std::string>>();
            u.action_files = j.at("action_files").get<std::vector<std::string>>();
            u.readme_files = j.at("readme_files").get<std::vector<std::string>>();
            units.push_back(std::move(u));
        }
        return units;
    }

    // ---- stage: domain --------------------------------------------------

    void stage_domain() {
        auto repos = load_repos();
        std::map<std::string, const RepoRecord*> by_id;
        for (const auto& r : repos) by_id[r.id()] = &r;
        auto units = load_units();
        StageLog log;
        json models = json::object();
        json verdicts = json::object();
        for (const auto& unit : units) {
            fs::path root = tree_root(*by_id.at(unit.repo_id));
            std::vector<DomainModel> parsed;
            bool dropped = false;
            for (const auto& rel : unit.domain_files) {
                try {
                    parsed.push_back(parse_domain(root / rel));
                } catch (const SemanticError& e) {
                    log.drop(unit.id, std::string("semantically incorrect domain: ") + e.what());
                    dropped = true;
                    break;
                }
            }
            if (dropped) continue;
            ReconcileVerdict verdict = reconcile(parsed);
            verdicts[unit.id] = [&] {
                switch (verdict.kind) {
                    case ReconcileKind::Single: return "single";
                    case ReconcileKind::Identical: return "identical";
                    case ReconcileKind::DisjointMerged: return "disjoint_merged";
                    case ReconcileKind::Conflict: return "conflict";
                }
                return "?";
            }();
            if (verdict.kind == ReconcileKind::Conflict) {
                log.drop(unit.id, "domain files neither disjoint nor identical");
                continue;
            }
            DomainModel model = *verdict.merged;
            if (!model.version) {
                if (auto pin = find_dependency_pin(root, unit.folder)) {
                    model.version = pin;
                    model.version_source = "dependency_pin";
                }
            }
            models[unit.id] = detail::domain_to_json(model, /*include_responses=*/true);
        }
        json j{{"models", models}, {"verdicts", verdicts}, {"drops", log.drops}};
        write_file(cfg_.checkpoint_dir / "domains.json", j.dump(2) + "\n");
    }

    std::map<std::string, DomainModel> load_models() const {
        std::map<std::string, DomainModel> out;
        json j = json::parse(read_file(cfg_.checkpoint_dir / "domains.json"));
        for (auto& [unit_id, m] : j.at("models").items()) {
            out[unit_id] = detail::domain_from_json(m);
        }
        return out;
    }

    // ---- stage: language --------------------------------------------------

    void stage_language() {
        auto repos = load_repos();
        std::map<std::string, const RepoRecord*> by_id;
        for (const auto& r : repos) by_id[r.id()] = &r;
        auto units = load_units();
        auto models = load_models();
        StageLog log;

        fs::path partial_file = cfg_.checkpoint_dir / "language_partial.json";
        json partial = fs::exists(partial_file) ? json::parse(read_file(partial_file))
                                                : json::object();
        std::vector<LanguageAnnotation> annotations;
        size_t since_save = 0;
        try {
            for (const auto& unit : units) {
                auto model_it = models.find(unit.id);
                if (model_it == models.end()) continue;  // dropped in the domain stage
                if (partial.contains(unit.id)) {
                    annotations.push_back(
                        detail::languages_from_json(partial[unit.id], unit.id));
                    continue;
                }
                fs::path root = tree_root(*by_id.at(unit.repo_id));
                auto phrases = sample_training_phrases(unit, root, cfg_.seed,
                                                       cfg_.default_intent_set());
                auto responses =
                    sample_response_texts(model_it->second.responses, unit.id, cfg_.seed);
                if (phrases.empty() && responses.empty()) {
                    log.drop(unit.id, "neither training phrases nor responses");
                    continue;
                }
                LanguageAnnotation ann = annotate_languages(
                    unit.id, phrases, responses, detector(),
                    static_cast<size_t>(cfg_.detector_batch_size));
                annotations.push_back(ann);
                partial[unit.id] = detail::languages_to_json(ann);
                if (++since_save % 50 == 0) {
                    write_file(partial_file, partial.dump() + "\n");
                }
            }
        } catch (const DetectorUnavailableError&) {
            write_file(partial_file, partial.dump() + "\n");  // resumable state
            throw;
        }

        annotations = apply_review(std::move(annotations), cfg_.language_review);
        json anns = json::array();
        for (const auto& a : annotations) {
            json entry = detail::languages_to_json(a);
            entry["unit_id"] = a.unit_id;
            anns.push_back(entry);
        }
        json j{{"annotations", anns}, {"drops", log.drops}};
        write_file(cfg_.checkpoint_dir / "annotations.json", j.dump(2) + "\n");
        std::error_code ec;
        fs::remove(partial_file, ec);
    }

    std::map<std::string, LanguageAnnotation> load_annotations() const {
        std::map<std::string, LanguageAnnotation> out;
        json j = json::parse(read_file(cfg_.checkpoint_dir / "annotations.json"));
        for (const auto& entry : j.at("annotations")) {
            std::string id = entry.at("unit_id");
            out[id] = detail::languages_from_json(entry, id);
        }
        return out;
    }

    // ---- stage: dedup -----------------------------------------------------

    ActionCode load_action_code(const ChatbotUnit& unit, const fs::path& root) const {
        ActionCode code;
        for (const auto& rel : unit.action_files) {
            std::string key = unit.folder == "." ? rel : rel.substr(unit.folder.size() + 1);
            try {
                code[key] = read_file(root / rel);
            } catch (const IoError&) {
                code[key] = "";
            }
        }
        return code;
    }

    void stage_dedup() {
        auto repos = load_repos();
        std::map<std::string, const RepoRecord*> by_id;
        for (const auto& r : repos) by_id[r.id()] = &r;
        auto units = load_units();
        auto models = load_models();
        auto annotations = load_annotations();

        std::vector<DedupEntry> entries;
        std::map<std::string, KeeperKey> keys;
        for (const auto& unit : units) {
            auto m = models.find(unit.id);
            auto a = annotations.find(unit.id);
            if (m == models.end() || a == annotations.end()) continue;
            const RepoRecord& repo = *by_id.at(unit.repo_id);
            DedupEntry e;
            e.unit_id = unit.id;
            e.signature = make_signature(m->second, a->second);
            e.action_code = load_action_code(unit, tree_root(repo));
            entries.push_back(std::move(e));
            keys[unit.id] = KeeperKey{m->second.version, repo.stars + repo.forks,
                                      repo.created_at, unit.id};
        }
        auto groups = group_copies(entries, cfg_.dedup_threshold);
        json groups_json = json::array();
        std::vector<std::string> removed;
        int seq = 0;
        for (auto& g : groups) {
            g.keeper = select_keeper(g.members, keys);
            std::string gid = "dup-" + std::to_string(++seq);
            groups_json.push_back(json{{"id", gid},
                                       {"members", g.members},
                                       {"keeper", g.keeper},
                                       {"min_similarity", g.min_similarity}});
            for (const auto& m : g.members) {
                if (m != g.keeper) removed.push_back(m);
            }
        }
        std::sort(removed.begin(), removed.end());
        json j{{"groups", groups_json}, {"removed", removed}};
        write_file(cfg_.checkpoint_dir / "groups.json", j.dump(2) + "\n");
    }

    // ---- stage: curate ----------------------------------------------------

    void stage_curate() {
        auto repos = load_repos();
        std::map<std::string, const RepoRecord*> by_id;
        for (const auto& r : repos) by_id[r.id()] = &r;
        auto units = load_units();
        auto models = load_models();
        auto annotations = load_annotations();
        json dedup = json::parse(read_file(cfg_.checkpoint_dir / "groups.json"));
        std::set<std::string> removed;
        for (const auto& r : dedup.at("removed")) removed.insert(r.get<std::string>());

        std::vector<CurateInput> inputs;
        for (const auto& unit : units) {
            auto m = models.find(unit.id);
            auto a = annotations.find(unit.id);
            if (m == models.end() || a == annotations.end() || removed.count(unit.id)) continue;
            const RepoRecord& repo = *by_id.at(unit.repo_id);
            inputs.push_back(CurateInput{unit.id, m->second, a->second, repo,
                                         load_action_code(unit, tree_root(repo))});
        }
        SelectionResult result = apply_selection(inputs);
        save_selection(result, "selection.json");

        std::string csv = csv_row({"unit_id", "dialogue", "functional", "english", "version",
                                   "stars", "passed", "failed_stage"});
        for (const auto& v : result.verdicts) {
            auto flag = [&](SelectionStage s) { return v.stage_flags.at(s) ? "1" : "0"; };
            csv += csv_row({v.unit_id, flag(SelectionStage::Dialogue),
                            flag(SelectionStage::Functional), flag(SelectionStage::English),
                            flag(SelectionStage::Version), flag(SelectionStage::Stars),
                            v.passed ? "1" : "0",
                            v.failed_stage ? to_string(*v.failed_stage) : ""});
        }
        write_file(cfg_.checkpoint_dir / "selection.csv", csv);
    }

    void save_selection(const SelectionResult& result, const std::string& filename) const {
        json verdicts = json::array();
        for (const auto& v : result.verdicts) {
            json entry = detail::selection_to_json(v);
            entry["unit_id"] = v.unit_id;
            verdicts.push_back(entry);
        }
        json counts = json::array();
        for (const auto& [stage, count] : result.stage_counts) {
            counts.push_back(json::array({stage, count}));
        }
        json j{{"verdicts", verdicts}, {"stage_counts", counts}};
        write_file(cfg_.checkpoint_dir / filename, j.dump(2) + "\n");
    }

    SelectionResult load_selection(const std::string& filename) const {
        SelectionResult result;
        json j = json::parse(read_file(cfg_.checkpoint_dir / filename));
        for (const auto& entry : j.at("verdicts")) {
            std::string id = entry.at("unit_id");
            result.verdicts.push_back(detail::selection_from_json(entry, id));
        }
        for (const auto& entry : j.at("stage_counts")) {
            result.stage_counts.emplace_back(entry.at(0).get<std::string>(),
                                             entry.at(1).get<long>());
        }
        return result;
    }

    // ---- stage: enrich ----------------------------------------------------

    void stage_enrich() {
        auto repos = load_repos();
        std::map<std::string, const RepoRecord*> by_id;
        for (const auto& r : repos) by_id[r.id()] = &r;
        auto units = load_units();
        std::map<std::string, const ChatbotUnit*> unit_by_id;
        for (const auto& u : units) unit_by_id[u.id] = &u;
        auto models = load_models();
        SelectionResult selection = load_selection("selection.json");

        PromptTemplates templates = PromptTemplates::load(cfg_.prompt_extraction,
                                                          cfg_.prompt_merge, cfg_.prompt_topic);
        AliasTable aliases = AliasTable::load(cfg_.alias_table);

        std::vector<std::string> candidates;
        for (const auto& v : selection.verdicts) {
            if (v.passed) candidates.push_back(v.unit_id);
        }

        fs::path partial_file = cfg_.checkpoint_dir / "enrich_partial.json";
        json partial = fs::exists(partial_file) ? json::parse(read_file(partial_file))
                                                : json::object();
        std::vector<ServiceReport> reports;
        try {
            for (const auto& id : candidates) {
                if (partial.contains(id)) {
                    reports.push_back(detail::services_from_json(partial[id], id));
                    continue;
                }
                const ChatbotUnit& unit = *unit_by_id.at(id);
                fs::path root = tree_root(*by_id.at(unit.repo_id));
                ServiceReport report;
                report.unit_id = id;
                for (const auto& [_, text] : load_action_code(unit, root)) {
                    if (trim(text).empty()) continue;
                    auto ex = extract_services(text, SourceKind::ActionCode, llm(), cfg_.llm,
                                               templates);
                    report.from_code.insert(ex.services.begin(), ex.services.end());
                    report.manual_review = report.manual_review || ex.manual_review;
                }
                for (const auto& rel : unit.readme_files) {
                    std::string text;
                    try {
                        text = read_file(root / rel);
                    } catch (const IoError&) {
                        continue;
                    }
                    if (trim(text).empty()) continue;
                    auto ex = extract_services(text, SourceKind::Readme, llm(), cfg_.llm,
                                               templates);
                    report.from_readme.insert(ex.services.begin(), ex.services.end());
                    report.manual_review = report.manual_review || ex.manual_review;
                }
                std::set<std::string> merged;
                merged.insert(report.from_code.begin(), report.from_code.end());
                merged.insert(report.from_readme.begin(), report.from_readme.end());
                report.final = aliases.normalize(merged);
                partial[id] = detail::services_to_json(report);
                reports.push_back(std::move(report));
                write_file(partial_file, partial.dump() + "\n");
            }
        } catch (const LlmUnavailableError&) {
            write_file(partial_file, partial.dump() + "\n");
            throw;
        }

        reports = apply_service_review(std::move(reports), cfg_.service_review, aliases);
        aliases.save(cfg_.alias_table);

        std::set<std::string> flagged;
        for (const auto& r : reports) {
            if (r.discontinued_flag) flagged.insert(r.unit_id);
        }
        fold_discontinued(selection, flagged);
        selection.stage_counts.emplace_back(
            "curated",
            std::count_if(selection.verdicts.begin(), selection.verdicts.end(),
                          [](const SelectionVerdict& v) { return v.passed; }));
        save_selection(selection, "selection_final.json");

        json services = json::array();
        for (const auto& r : reports) {
            json entry = detail::services_to_json(r);
            entry["unit_id"] = r.unit_id;
            services.push_back(entry);
        }
        write_file(cfg_.checkpoint_dir / "services.json", services.dump(2) + "\n");

        // topic extraction runs once per curated unit
        std::vector<std::string> categories;
        for (const auto& line : split_lines(read_file(cfg_.categories_file))) {
            if (!trim(line).empty()) categories.push_back(trim(line));
        }
        json topics = json::object();
        fs::path topic_partial_file = cfg_.checkpoint_dir / "topic_partial.json";
        if (fs::exists(topic_partial_file)) {
            topics = json::parse(read_file(topic_partial_file));
        }
        try {
            for (const auto& v : selection.verdicts) {
                if (!v.passed || topics.contains(v.unit_id)) continue;
                const ChatbotUnit& unit = *unit_by_id.at(v.unit_id);
                const RepoRecord& repo = *by_id.at(unit.repo_id);
                TopicContext ctx;
                ctx.unit_id = v.unit_id;
                ctx.repo_name = repo.id();
                ctx.description = repo.description;
                for (const auto& rel : unit.readme_files) {
                    try {
                        ctx.readme_texts.push_back(read_file(tree_root(repo) / rel));
                    } catch (const IoError&) {
                    }
                }
                ctx.model = models.at(v.unit_id);
                TopicResult topic = extract_topic(ctx, categories, llm(), cfg_.llm, templates);
                topics[v.unit_id] = json{{"name", topic.topic},
                                         {"novel", topic.novel},
                                         {"manual_review", topic.manual_review}};
                write_file(topic_partial_file, topics.dump() + "\n");
            }
        } catch (const LlmUnavailableError&) {
            write_file(topic_partial_file, topics.dump() + "\n");
            throw;
        }
        write_file(cfg_.checkpoint_dir / "topics.json", topics.dump(2) + "\n");
        std::error_code ec;
        fs::remove(partial_file, ec);
        fs::remove(topic_partial_file, ec);
    }

    // ---- stage: report ----------------------------------------------------

    void stage_report() {
        auto repos = load_repos();
        json repos_file = json::parse(read_file(cfg_.checkpoint_dir / "repos.json"));
        std::map<std::string, const RepoRecord*> by_id;
        long non_empty = 0;
        for (const auto& r : repos) {
            by_id[r.id()] = &r;
            if (!r.empty) non_empty++;
        }
        json cands = json::parse(read_file(cfg_.checkpoint_dir / "candidates.json"));
        long chatbot_repos = 0;
        for (auto& [_, entry] : cands.items()) {
            if (entry.value("verdict", "") == "chatbot") chatbot_repos++;
        }
        auto units = load_units();
        auto models = load_models();
        auto annotations = load_annotations();
        json dedup = json::parse(read_file(cfg_.checkpoint_dir / "groups.json"));
        std::set<std::string> removed;
        for (const auto& r : dedup.at("removed")) removed.insert(r.get<std::string>());
        std::map<std::string, std::string> group_of;  // keeper -> group id
        for (const auto& g : dedup.at("groups")) {
            group_of[g.at("keeper").get<std::string>()] = g.at("id").get<std::string>();
        }
        SelectionResult selection = load_selection("selection_final.json");
        std::map<std::string, const SelectionVerdict*> verdict_of;
        for (const auto& v : selection.verdicts) verdict_of[v.unit_id] = &v;
        std::map<std::string, ServiceReport> services;
        for (const auto& entry : json::parse(read_file(cfg_.checkpoint_dir / "services.json"))) {
            std::string id = entry.at("unit_id");
            services[id] = detail::services_from_json(entry, id);
        }
        json topics = json::parse(read_file(cfg_.checkpoint_dir / "topics.json"));

        DatasetManifest snapshot;
        snapshot.dataset_name = cfg_.dataset_name + "-snapshot";
        snapshot.snapshot_date = cfg_.snapshot_date;
        snapshot.stage_counts = {
            {"searched", static_cast<long>(repos.size())},
            {"non_empty", non_empty},
            {"chatbot_repos", chatbot_repos},
            {"units", static_cast<long>(units.size())},
            {"parsed", static_cast<long>(models.size())},
            {"language_annotated", static_cast<long>(annotations.size())},
            {"snapshot", static_cast<long>(annotations.size() - removed.size())}};

        for (const auto& unit : units) {
            auto m = models.find(unit.id);
            auto a = annotations.find(unit.id);
            if (m == models.end() || a == annotations.end() || removed.count(unit.id)) continue;
            ManifestUnit mu;
            mu.id = unit.id;
            mu.repo = *by_id.at(unit.repo_id);
            mu.folder = unit.folder;
            mu.domain_files = unit.domain_files;
            mu.action_files = unit.action_files;
            mu.readme_files = unit.readme_files;
            mu.domain = m->second;
            mu.domain.responses.clear();  // manifests carry parameters, not texts
            mu.languages = a->second;
            if (group_of.count(unit.id)) mu.duplicate_group = group_of[unit.id];
            if (verdict_of.count(unit.id)) mu.selection = *verdict_of.at(unit.id);
            if (services.count(unit.id)) mu.services = services.at(unit.id);
            if (topics.contains(unit.id)) {
                TopicResult t;
                t.topic = topics[unit.id].value("name", "");
                t.novel = topics[unit.id].value("novel", false);
                mu.topic = t;
            }
            snapshot.units.push_back(std::move(mu));
        }

        DatasetManifest curated;
        curated.dataset_name = cfg_.dataset_name + "-curated";
        curated.snapshot_date = cfg_.snapshot_date;
        curated.stage_counts = snapshot.stage_counts;
        for (const auto& [stage, count] : selection.stage_counts) {
            curated.stage_counts.emplace_back(stage, count);
        }
        for (const auto& mu : snapshot.units) {
            if (mu.selection && mu.selection->passed) curated.units.push_back(mu);
        }

        save_manifest(snapshot, cfg_.checkpoint_dir / "snapshot_manifest.json");
        save_manifest(curated, cfg_.checkpoint_dir / "curated_manifest.json");

        std::set<std::string> formats{"csv", "json", "svg"};
        emit_outputs(compute_report(snapshot, cfg_.rasa3_release_date),
                     cfg_.out_dir / "snapshot", formats);
        emit_outputs(compute_report(curated, cfg_.rasa3_release_date), cfg_.out_dir / "curated",
                     formats);
    }

    void run_stage(const std::string& name) {
        if (name == "harvest") stage_harvest();
        else if (name == "classify") stage_classify();
        else if (name == "extract") stage_extract();
        else if (name == "domain") stage_domain();
        else if (name == "language") stage_language();
        else if (name == "dedup") stage_dedup();
        else if (name == "curate") stage_curate();
        else if (name == "enrich") stage_enrich();
        else if (name == "report") stage_report();
        else throw ConfigError("unknown stage '" + name + "'");
    }

private:
    Config cfg_;
    std::unique_ptr<RestClient> rest_;
    std::unique_ptr<DetectorClient> detector_;
    std::unique_ptr<LlmClient> llm_;
};

// Runs the requested stages in dependency order with checkpointing. Stages
// must form a prefix-closed slice of the stage chain: every predecessor is
// either requested too or already done.
inline int run_pipeline(const Config& cfg, std::vector<std::string> stages, bool resume,
                        std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto& order = pipeline_stage_order();
    if (stages.empty()) stages = order;
    std::set<std::string> requested(stages.begin(), stages.end());
    for (const auto& s : requested) {
        if (std::find(order.begin(), order.end(), s) == order.end()) {
            throw ConfigError("unknown stage '" + s + "'");
        }
    }

    fs::create_directories(cfg.checkpoint_dir);
    PipelineState state = PipelineState::load(cfg.checkpoint_dir);
    std::string hash = config_hash(cfg);
    if (state.config_hash != hash) {
        if (!state.config_hash.empty()) {
            err << "config changed; previous checkpoints invalidated\n";
        }
        for (const auto& name : order) state.stage_status[name] = "pending";
        state.config_hash = hash;
    }

    std::string pending_gap;
    for (const auto& name : order) {
        if (requested.count(name)) {
            if (!pending_gap.empty()) {
                throw ConfigError("stage '" + name + "' requested but predecessor '" +
                                  pending_gap + "' is pending");
            }
        } else if (!state.done(name) && pending_gap.empty()) {
            pending_gap = name;
        }
    }

    Pipeline pipeline(cfg);
    for (const auto& name : order) {
        if (!requested.count(name)) continue;
        if (resume && state.done(name)) {
            out << "[skip] " << name << " (done)\n";
            continue;
        }
        out << "[run ] " << name << "\n";
        try {
            pipeline.run_stage(name);
            state.stage_status[name] = "done";
            state.save(cfg.checkpoint_dir);
        } catch (const std::exception& e) {
            state.stage_status[name] = "failed";
            state.save(cfg.checkpoint_dir);
            err << "stage '" << name << "' failed: " << e.what() << "\n";
            err << "downstream stages not run\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace botmine
