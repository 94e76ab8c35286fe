#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "botmine/dedup.hpp"
#include "botmine/domain.hpp"
#include "botmine/language.hpp"
#include "botmine/types.hpp"
#include "botmine/version.hpp"

namespace botmine {

enum class SelectionStage { Dialogue, Functional, English, Version, Stars, DiscontinuedService };

inline const std::array<SelectionStage, 5>& selection_stage_order() {
    static const std::array<SelectionStage, 5> order{
        SelectionStage::Dialogue, SelectionStage::Functional, SelectionStage::English,
        SelectionStage::Version, SelectionStage::Stars};
    return order;
}

inline const char* to_string(SelectionStage s) {
    switch (s) {
        case SelectionStage::Dialogue: return "dialogue";
        case SelectionStage::Functional: return "functional";
        case SelectionStage::English: return "english";
        case SelectionStage::Version: return "version";
        case SelectionStage::Stars: return "stars";
        case SelectionStage::DiscontinuedService: return "discontinued_service";
    }
    return "?";
}

// At least one intent and one information retrieval component.
inline bool dialogue_filter(const DomainModel& model) {
    return !model.intents.empty() && (!model.entities.empty() || !model.slots.empty());
}

// At least one declared custom action actually implemented in a backend file.
inline bool functional_filter(const DomainModel& model, const ActionCode& action_code) {
    if (model.custom_actions.empty()) return false;
    for (const auto& name : model.custom_actions) {
        for (const auto& [_, text] : action_code) {
            if (text.find(name) != std::string::npos) return true;
        }
    }
    return false;
}

struct UtilityFlags {
    bool english = false;
    bool version = false;
    bool stars = false;
};

inline UtilityFlags utility_filters(const LanguageAnnotation& annotation,
                                    const DomainModel& model, const RepoRecord& repo) {
    UtilityFlags f;
    f.english = annotation.overall.count("en") > 0;
    auto major = version_major(model.version);
    f.version = major.has_value() && *major == 3;
    f.stars = repo.stars >= 1;
    return f;
}

struct SelectionVerdict {
    std::string unit_id;
    bool passed = false;
    std::optional<SelectionStage> failed_stage;
    std::map<SelectionStage, bool> stage_flags;
};

struct CurateInput {
    std::string unit_id;
    DomainModel model;
    LanguageAnnotation annotation;
    RepoRecord repo;
    ActionCode action_code;
};

struct SelectionResult {
    std::vector<SelectionVerdict> verdicts;
    // survivors after each stage, in application order
    std::vector<std::pair<std::string, long>> stage_counts;
};

inline SelectionVerdict evaluate_unit(const CurateInput& in) {
    SelectionVerdict v;
    v.unit_id = in.unit_id;
    UtilityFlags u = utility_filters(in.annotation, in.model, in.repo);
    v.stage_flags[SelectionStage::Dialogue] = dialogue_filter(in.model);
    v.stage_flags[SelectionStage::Functional] = functional_filter(in.model, in.action_code);
    v.stage_flags[SelectionStage::English] = u.english;
    v.stage_flags[SelectionStage::Version] = u.version;
    v.stage_flags[SelectionStage::Stars] = u.stars;
    v.passed = true;
    for (SelectionStage s : selection_stage_order()) {
        if (!v.stage_flags[s]) {
            v.failed_stage = s;
            v.passed = false;
            break;
        }
    }
    return v;
}

// Fixed-order filters with survivor counts per stage. The discontinued-service
// verdict is folded in later, once service extraction has run.
inline SelectionResult apply_selection(const std::vector<CurateInput>& units) {
    SelectionResult out;
    std::map<SelectionStage, long> survivors;
    for (const auto& in : units) {
        SelectionVerdict v = evaluate_unit(in);
        bool alive = true;
        for (SelectionStage s : selection_stage_order()) {
            alive = alive && v.stage_flags.at(s);
            if (alive) survivors[s]++;
        }
        out.verdicts.push_back(std::move(v));
    }
    for (SelectionStage s : selection_stage_order()) {
        out.stage_counts.emplace_back(to_string(s), survivors[s]);
    }
    return out;
}

// Marks units that depend on discontinued services as failed, after the
// ordered filters. Only units that passed everything else can fail here.
inline void fold_discontinued(SelectionResult& result,
                              const std::set<std::string>& flagged_unit_ids) {
    long survivors = 0;
    for (auto& v : result.verdicts) {
        bool flagged = flagged_unit_ids.count(v.unit_id) > 0;
        v.stage_flags[SelectionStage::DiscontinuedService] = !flagged;
        if (v.passed && flagged) {
            v.passed = false;
            v.failed_stage = SelectionStage::DiscontinuedService;
        }
        if (v.passed) survivors++;
    }
    result.stage_counts.emplace_back(to_string(SelectionStage::DiscontinuedService), survivors);
}

}  // namespace botmine
