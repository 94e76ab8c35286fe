#pragma once

#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "botmine/enrich.hpp"
#include "botmine/hash.hpp"
#include "botmine/types.hpp"
#include "botmine/util.hpp"

namespace botmine {

struct Config {
    std::string mode = "replay";  // "live" | "replay"
    fs::path fixtures;
    fs::path checkpoint_dir = "checkpoints";
    fs::path cache_dir = "cache";
    fs::path out_dir = "out";
    std::string dataset_name = "rasa-chatbots";
    std::string snapshot_date;
    uint64_t seed = 42;
    int parallelism = 8;
    double dedup_threshold = 0.95;
    std::string rasa3_release_date = "2021-12-01";

    std::vector<std::string> keywords{"rasa", "chatbot"};
    int page_size = 100;

    LlmConfig llm;
    int detector_batch_size = 50;

    fs::path prompt_extraction = "data/prompt_extraction.txt";
    fs::path prompt_merge = "data/prompt_merge.txt";
    fs::path prompt_topic = "data/prompt_topic.txt";
    fs::path categories_file = "data/play_store_categories.txt";
    fs::path language_review;  // defaults under checkpoint_dir
    fs::path service_review;
    fs::path alias_table;

    std::string host_base_url = "https://api.github.com";
    std::string detector_base_url = "https://ws.detectlanguage.com";
    std::string llm_base_url = "https://api.openai.com";

    std::vector<std::string> default_intents{"nlu_fallback", "out_of_scope", "restart", "back",
                                             "session_start"};

    std::set<std::string> default_intent_set() const {
        return {default_intents.begin(), default_intents.end()};
    }
};

namespace detail {

inline void reject_unknown_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                                const std::string& prefix) {
    if (!node || !node.IsMap()) return;
    for (const auto& kv : node) {
        std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) {
            throw ConfigError("unknown config key '" + prefix + key + "'");
        }
    }
}

template <typename T>
T value_or(const YAML::Node& node, const char* key, T fallback) {
    if (node && node[key]) return node[key].as<T>();
    return fallback;
}

inline fs::path resolve(const fs::path& base, const fs::path& p) {
    return p.is_absolute() ? p : base / p;
}

}  // namespace detail

// Parses and normalizes a pipeline config. Unknown keys are rejected by key
// path; documented defaults are filled in; relative paths resolve against the
// config file's directory.
inline Config validate_config(const fs::path& config_file) {
    if (!fs::exists(config_file)) {
        throw ConfigError("config file not found: " + config_file.string());
    }
    YAML::Node root;
    try {
        root = YAML::Load(read_file(config_file));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (!root.IsMap()) throw ConfigError("config root must be a mapping");

    detail::reject_unknown_keys(
        root,
        {"mode", "fixtures", "checkpoint_dir", "cache_dir", "out_dir", "dataset_name",
         "snapshot_date", "seed", "parallelism", "dedup_threshold", "rasa3_release_date", "query",
         "llm", "detector", "prompts", "categories_file", "language_review", "service_review",
         "alias_table", "host_base_url", "detector_base_url", "llm_base_url", "default_intents"},
        "");

    Config cfg;
    fs::path base = config_file.has_parent_path() ? config_file.parent_path() : fs::path(".");

    cfg.mode = detail::value_or<std::string>(root, "mode", cfg.mode);
    if (cfg.mode != "live" && cfg.mode != "replay") {
        throw ConfigError("mode must be 'live' or 'replay'");
    }
    if (root["fixtures"]) {
        cfg.fixtures = detail::resolve(base, root["fixtures"].as<std::string>());
    } else if (cfg.mode == "replay") {
        throw ConfigError("replay mode requires 'fixtures'");
    }
    cfg.checkpoint_dir = detail::resolve(
        base, detail::value_or<std::string>(root, "checkpoint_dir", "checkpoints"));
    cfg.cache_dir = detail::resolve(base, detail::value_or<std::string>(root, "cache_dir", "cache"));
    cfg.out_dir = detail::resolve(base, detail::value_or<std::string>(root, "out_dir", "out"));
    cfg.dataset_name = detail::value_or<std::string>(root, "dataset_name", cfg.dataset_name);
    cfg.snapshot_date = detail::value_or<std::string>(root, "snapshot_date", cfg.snapshot_date);
    cfg.seed = detail::value_or<uint64_t>(root, "seed", cfg.seed);
    cfg.parallelism = detail::value_or<int>(root, "parallelism", cfg.parallelism);
    if (cfg.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    cfg.dedup_threshold = detail::value_or<double>(root, "dedup_threshold", cfg.dedup_threshold);
    if (cfg.dedup_threshold < 0.0 || cfg.dedup_threshold > 1.0) {
        throw ConfigError("dedup_threshold must be a ratio in [0,1]");
    }
    cfg.rasa3_release_date =
        detail::value_or<std::string>(root, "rasa3_release_date", cfg.rasa3_release_date);

    if (auto q = root["query"]) {
        detail::reject_unknown_keys(q, {"keywords", "page_size"}, "query.");
        if (q["keywords"]) cfg.keywords = q["keywords"].as<std::vector<std::string>>();
        cfg.page_size = detail::value_or<int>(q, "page_size", cfg.page_size);
    }
    if (cfg.keywords.empty()) throw ConfigError("query.keywords must be non-empty");
    if (cfg.page_size < 1 || cfg.page_size > 100) {
        throw ConfigError("query.page_size must be in [1,100]");
    }

    if (auto l = root["llm"]) {
        detail::reject_unknown_keys(l, {"temperature", "top_p", "samples", "model"}, "llm.");
        cfg.llm.temperature = detail::value_or<double>(l, "temperature", cfg.llm.temperature);
        cfg.llm.top_p = detail::value_or<double>(l, "top_p", cfg.llm.top_p);
        cfg.llm.samples = detail::value_or<int>(l, "samples", cfg.llm.samples);
        cfg.llm.model_name = detail::value_or<std::string>(l, "model", cfg.llm.model_name);
    }
    validate(cfg.llm);

    if (auto d = root["detector"]) {
        detail::reject_unknown_keys(d, {"batch_size"}, "detector.");
        cfg.detector_batch_size = detail::value_or<int>(d, "batch_size", cfg.detector_batch_size);
    }
    if (cfg.detector_batch_size < 1) throw ConfigError("detector.batch_size must be >= 1");

    if (auto p = root["prompts"]) {
        detail::reject_unknown_keys(p, {"extraction", "merge", "topic"}, "prompts.");
        if (p["extraction"]) cfg.prompt_extraction = p["extraction"].as<std::string>();
        if (p["merge"]) cfg.prompt_merge = p["merge"].as<std::string>();
        if (p["topic"]) cfg.prompt_topic = p["topic"].as<std::string>();
    }
    cfg.prompt_extraction = detail::resolve(base, cfg.prompt_extraction);
    cfg.prompt_merge = detail::resolve(base, cfg.prompt_merge);
    cfg.prompt_topic = detail::resolve(base, cfg.prompt_topic);
    if (root["categories_file"]) {
        cfg.categories_file = root["categories_file"].as<std::string>();
    }
    cfg.categories_file = detail::resolve(base, cfg.categories_file);

    cfg.language_review =
        root["language_review"]
            ? detail::resolve(base, root["language_review"].as<std::string>())
            : cfg.checkpoint_dir / "language_review.csv";
    cfg.service_review = root["service_review"]
                             ? detail::resolve(base, root["service_review"].as<std::string>())
                             : cfg.checkpoint_dir / "service_review.csv";
    cfg.alias_table = root["alias_table"]
                          ? detail::resolve(base, root["alias_table"].as<std::string>())
                          : cfg.checkpoint_dir / "service_aliases.json";

    cfg.host_base_url = detail::value_or<std::string>(root, "host_base_url", cfg.host_base_url);
    cfg.detector_base_url =
        detail::value_or<std::string>(root, "detector_base_url", cfg.detector_base_url);
    cfg.llm_base_url = detail::value_or<std::string>(root, "llm_base_url", cfg.llm_base_url);
    if (root["default_intents"]) {
        cfg.default_intents = root["default_intents"].as<std::vector<std::string>>();
    }
    return cfg;
}

// Stable digest of the normalized config; checkpoints from a different config
// must not be resumed.
inline std::string config_hash(const Config& cfg) {
    json j{{"mode", cfg.mode},
           {"fixtures", cfg.fixtures.string()},
           {"dataset_name", cfg.dataset_name},
           {"snapshot_date", cfg.snapshot_date},
           {"seed", cfg.seed},
           {"dedup_threshold", cfg.dedup_threshold},
           {"rasa3_release_date", cfg.rasa3_release_date},
           {"keywords", cfg.keywords},
           {"page_size", cfg.page_size},
           {"llm",
            {{"temperature", cfg.llm.temperature},
             {"top_p", cfg.llm.top_p},
             {"samples", cfg.llm.samples},
             {"model", cfg.llm.model_name}}},
           {"detector_batch_size", cfg.detector_batch_size},
           {"default_intents", cfg.default_intents}};
    return fnv1a64_hex(j.dump());
}

}  // namespace botmine
