#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "botmine/csv.hpp"
#include "botmine/manifest.hpp"
#include "botmine/stats.hpp"
#include "botmine/svg.hpp"
#include "botmine/util.hpp"
#include "botmine/version.hpp"

namespace botmine {

struct DialogueStats {
    FiveNumberSummary intents, entities, slots;
    std::vector<long> intent_counts, entity_counts, slot_counts;  // sorted ascending
};

inline DialogueStats dialogue_stats(const DatasetManifest& manifest) {
    if (manifest.units.empty()) throw EmptyManifestError("manifest has no units");
    DialogueStats s;
    std::vector<double> in, en, sl;
    for (const auto& u : manifest.units) {
        s.intent_counts.push_back(static_cast<long>(u.domain.intents.size()));
        s.entity_counts.push_back(static_cast<long>(u.domain.entities.size()));
        s.slot_counts.push_back(static_cast<long>(u.domain.slots.size()));
    }
    std::sort(s.intent_counts.begin(), s.intent_counts.end());
    std::sort(s.entity_counts.begin(), s.entity_counts.end());
    std::sort(s.slot_counts.begin(), s.slot_counts.end());
    for (long v : s.intent_counts) in.push_back(static_cast<double>(v));
    for (long v : s.entity_counts) en.push_back(static_cast<double>(v));
    for (long v : s.slot_counts) sl.push_back(static_cast<double>(v));
    s.intents = five_number_summary(in);
    s.entities = five_number_summary(en);
    s.slots = five_number_summary(sl);
    return s;
}

struct UtilityTables {
    std::vector<std::pair<long, long>> language_count_table;  // (#languages, frequency)
    std::vector<std::pair<std::string, long>> version_table;
    std::vector<std::pair<std::string, long>> language_distribution;  // per language code
    std::vector<std::pair<long, long>> star_histogram;                // (stars, #units)
    std::vector<std::pair<std::string, long>> topic_distribution;
};

// Version categories: known majors ("3.x", "2.x", ...), plus version-unknown
// units split by whether the repository was last pushed before the Rasa 3
// release ("<3.0") or not ("Undefined").
inline UtilityTables utility_tables(const DatasetManifest& manifest,
                                    const std::string& rasa3_release_date = "2021-12-01") {
    if (manifest.units.empty()) throw EmptyManifestError("manifest has no units");
    UtilityTables t;
    std::map<long, long> lang_counts;
    std::map<long, long, std::greater<long>> majors;
    long pre_release = 0, undefined = 0;
    std::map<std::string, long> per_language;
    std::map<long, long> stars;
    std::map<std::string, long> topics;
    for (const auto& u : manifest.units) {
        lang_counts[static_cast<long>(u.languages.overall.size())]++;
        auto major = version_major(u.domain.version);
        if (major) {
            majors[*major]++;
        } else if (!u.repo.pushed_at.empty() &&
                   u.repo.pushed_at.substr(0, 10) < rasa3_release_date) {
            pre_release++;
        } else {
            undefined++;
        }
        for (const auto& code : u.languages.overall) per_language[code]++;
        stars[u.repo.stars]++;
        if (u.topic) topics[u.topic->topic]++;
    }
    for (const auto& [k, v] : lang_counts) t.language_count_table.emplace_back(k, v);
    for (const auto& [major, count] : majors) {
        t.version_table.emplace_back(std::to_string(major) + ".x", count);
    }
    t.version_table.emplace_back("<3.0", pre_release);
    t.version_table.emplace_back("Undefined", undefined);
    std::vector<std::pair<std::string, long>> langs(per_language.begin(), per_language.end());
    std::sort(langs.begin(), langs.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    t.language_distribution = std::move(langs);
    for (const auto& [k, v] : stars) t.star_histogram.emplace_back(k, v);
    std::vector<std::pair<std::string, long>> tp(topics.begin(), topics.end());
    std::sort(tp.begin(), tp.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    t.topic_distribution = std::move(tp);
    return t;
}

struct FunctionalStats {
    FiveNumberSummary actions, custom_actions;
    std::vector<long> action_counts, custom_action_counts;   // sorted ascending
    std::vector<std::pair<long, long>> service_histogram;    // (#services, #units)
    std::vector<std::pair<std::string, long>> top_services;  // (service, #units) descending
    long total_services = 0;        // sum of per-unit service counts
    long units_with_services = 0;   // >= 1 final service
    long units_without_services = 0;
    long max_services = 0;
};

inline FunctionalStats functional_stats(const DatasetManifest& manifest) {
    if (manifest.units.empty()) throw EmptyManifestError("manifest has no units");
    FunctionalStats s;
    std::vector<double> ac, cu;
    std::map<long, long> hist;
    std::map<std::string, long> freq;
    for (const auto& u : manifest.units) {
        s.action_counts.push_back(static_cast<long>(u.domain.actions.size()));
        s.custom_action_counts.push_back(static_cast<long>(u.domain.custom_actions.size()));
        if (u.services) {
            long n = static_cast<long>(u.services->final.size());
            hist[n]++;
            s.total_services += n;
            s.max_services = std::max(s.max_services, n);
            if (n > 0) s.units_with_services++;
            else s.units_without_services++;
            for (const auto& name : u.services->final) freq[name]++;
        }
    }
    std::sort(s.action_counts.begin(), s.action_counts.end());
    std::sort(s.custom_action_counts.begin(), s.custom_action_counts.end());
    for (long v : s.action_counts) ac.push_back(static_cast<double>(v));
    for (long v : s.custom_action_counts) cu.push_back(static_cast<double>(v));
    s.actions = five_number_summary(ac);
    s.custom_actions = five_number_summary(cu);
    for (const auto& [k, v] : hist) s.service_histogram.emplace_back(k, v);
    std::vector<std::pair<std::string, long>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    s.top_services = std::move(ranked);
    return s;
}

struct ReportStats {
    DialogueStats dialogue;
    UtilityTables utility;
    FunctionalStats functional;
    std::vector<std::pair<std::string, long>> stage_counts;
};

inline ReportStats compute_report(const DatasetManifest& manifest,
                                  const std::string& rasa3_release_date = "2021-12-01") {
    return {dialogue_stats(manifest), utility_tables(manifest, rasa3_release_date),
            functional_stats(manifest), manifest.stage_counts};
}

namespace detail {

inline std::string five_number_csv_row(const std::string& name, const FiveNumberSummary& s) {
    auto f = [](double v) {
        std::ostringstream oss;
        oss << v;
        return oss.str();
    };
    return csv_row({name, f(s.min), f(s.q1), f(s.median), f(s.q3), f(s.max)});
}

inline json five_number_json(const FiveNumberSummary& s) {
    return json{{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

}  // namespace detail

// Writes one file per table or plot with stable names and stable bytes.
inline std::vector<fs::path> emit_outputs(const ReportStats& stats, const fs::path& out_dir,
                                          const std::set<std::string>& formats) {
    std::vector<fs::path> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        fs::path p = out_dir / name;
        write_file(p, content);
        written.push_back(p);
    };

    if (formats.count("csv")) {
        std::string dialogue = csv_row({"parameter", "min", "q1", "median", "q3", "max"});
        dialogue += detail::five_number_csv_row("intents", stats.dialogue.intents);
        dialogue += detail::five_number_csv_row("entities", stats.dialogue.entities);
        dialogue += detail::five_number_csv_row("slots", stats.dialogue.slots);
        emit("dialogue_stats.csv", dialogue);

        std::string actions = csv_row({"parameter", "min", "q1", "median", "q3", "max"});
        actions += detail::five_number_csv_row("actions", stats.functional.actions);
        actions += detail::five_number_csv_row("custom_actions", stats.functional.custom_actions);
        emit("action_stats.csv", actions);

        std::string lc = csv_row({"languages", "frequency"});
        for (const auto& [k, v] : stats.utility.language_count_table) {
            lc += csv_row({std::to_string(k), std::to_string(v)});
        }
        emit("language_counts.csv", lc);

        std::string ld = csv_row({"language", "chatbots"});
        for (const auto& [k, v] : stats.utility.language_distribution) {
            ld += csv_row({k, std::to_string(v)});
        }
        emit("language_distribution.csv", ld);

        std::string ver = csv_row({"version", "frequency"});
        for (const auto& [k, v] : stats.utility.version_table) {
            ver += csv_row({k, std::to_string(v)});
        }
        emit("versions.csv", ver);

        std::string st = csv_row({"stars", "chatbots"});
        for (const auto& [k, v] : stats.utility.star_histogram) {
            st += csv_row({std::to_string(k), std::to_string(v)});
        }
        emit("stars.csv", st);

        std::string tp = csv_row({"topic", "chatbots"});
        for (const auto& [k, v] : stats.utility.topic_distribution) {
            tp += csv_row({k, std::to_string(v)});
        }
        emit("topics.csv", tp);

        std::string sh = csv_row({"services", "chatbots"});
        for (const auto& [k, v] : stats.functional.service_histogram) {
            sh += csv_row({std::to_string(k), std::to_string(v)});
        }
        emit("service_histogram.csv", sh);

        std::string ts = csv_row({"service", "chatbots"});
        for (const auto& [k, v] : stats.functional.top_services) {
            ts += csv_row({k, std::to_string(v)});
        }
        emit("top_services.csv", ts);

        std::string sc = csv_row({"stage", "survivors"});
        for (const auto& [k, v] : stats.stage_counts) {
            sc += csv_row({k, std::to_string(v)});
        }
        emit("stage_counts.csv", sc);
    }

    if (formats.count("json")) {
        json j;
        j["dialogue"] = {{"intents", detail::five_number_json(stats.dialogue.intents)},
                         {"entities", detail::five_number_json(stats.dialogue.entities)},
                         {"slots", detail::five_number_json(stats.dialogue.slots)},
                         {"intent_counts", stats.dialogue.intent_counts},
                         {"entity_counts", stats.dialogue.entity_counts},
                         {"slot_counts", stats.dialogue.slot_counts}};
        j["functional"] = {{"actions", detail::five_number_json(stats.functional.actions)},
                           {"custom_actions",
                            detail::five_number_json(stats.functional.custom_actions)},
                           {"service_histogram", stats.functional.service_histogram},
                           {"top_services", stats.functional.top_services},
                           {"total_services", stats.functional.total_services},
                           {"units_with_services", stats.functional.units_with_services},
                           {"units_without_services", stats.functional.units_without_services},
                           {"max_services", stats.functional.max_services}};
        j["utility"] = {{"language_count_table", stats.utility.language_count_table},
                        {"version_table", stats.utility.version_table},
                        {"language_distribution", stats.utility.language_distribution},
                        {"star_histogram", stats.utility.star_histogram},
                        {"topic_distribution", stats.utility.topic_distribution}};
        j["stage_counts"] = stats.stage_counts;
        emit("stats.json", j.dump(2) + "\n");
    }

    if (formats.count("svg")) {
        emit("dialogue_boxplot.svg",
             svg_boxplot("Dialogue parameters", {"intents", "entities", "slots"},
                         {stats.dialogue.intents, stats.dialogue.entities, stats.dialogue.slots}));
        emit("actions_boxplot.svg",
             svg_boxplot("Actions per chatbot", {"actions", "custom actions"},
                         {stats.functional.actions, stats.functional.custom_actions}));
        std::vector<std::pair<std::string, long>> lang_bars(
            stats.utility.language_distribution.begin(),
            stats.utility.language_distribution.end());
        emit("languages_bar.svg", svg_bar_chart("Chatbots per language", lang_bars));
        emit("versions_bar.svg", svg_bar_chart("Rasa version distribution",
                                               stats.utility.version_table));
        std::vector<std::pair<std::string, long>> star_bars;
        for (const auto& [k, v] : stats.utility.star_histogram) {
            star_bars.emplace_back(std::to_string(k), v);
        }
        emit("stars_histogram.svg", svg_bar_chart("Chatbots by star count", star_bars));
        std::vector<std::pair<std::string, long>> service_bars;
        for (const auto& [k, v] : stats.functional.service_histogram) {
            service_bars.emplace_back(std::to_string(k), v);
        }
        emit("services_histogram.svg",
             svg_bar_chart("Chatbots by external service count", service_bars));
        emit("topics_bar.svg", svg_bar_chart("Topic distribution",
                                             stats.utility.topic_distribution));
    }

    std::sort(written.begin(), written.end());
    return written;
}

}  // namespace botmine
