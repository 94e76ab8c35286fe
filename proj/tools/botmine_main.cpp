#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "botmine/pipeline.hpp"

namespace {

using namespace botmine;

int cmd_run(const std::string& config_path, const std::vector<std::string>& stages, bool resume,
            const std::string& out_override) {
    Config cfg = validate_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    return run_pipeline(cfg, stages, resume);
}

int cmd_status(const std::string& config_path) {
    Config cfg = validate_config(config_path);
    PipelineState state = PipelineState::load(cfg.checkpoint_dir);
    std::string hash = config_hash(cfg);
    if (!state.config_hash.empty() && state.config_hash != hash) {
        std::cout << "note: config changed since the last run; checkpoints are stale\n";
    }
    for (const auto& name : pipeline_stage_order()) {
        std::cout << name << ": " << state.stage_status.at(name) << "\n";
    }
    return 0;
}

int cmd_export_review(const std::string& config_path, const std::string& kind,
                      const std::string& out_override) {
    Config cfg = validate_config(config_path);
    Pipeline pipeline(cfg);
    if (kind == "language") {
        fs::path out = out_override.empty() ? cfg.language_review : fs::path(out_override);
        auto annotations = pipeline.load_annotations();
        std::vector<LanguageAnnotation> list;
        for (auto& [_, a] : annotations) list.push_back(a);
        export_language_review(list, out);
        std::cout << "wrote " << out.string() << "\n";
    } else if (kind == "service") {
        fs::path out = out_override.empty() ? cfg.service_review : fs::path(out_override);
        std::vector<ServiceReport> reports;
        for (const auto& entry :
             json::parse(read_file(cfg.checkpoint_dir / "services.json"))) {
            std::string id = entry.at("unit_id");
            reports.push_back(detail::services_from_json(entry, id));
        }
        export_service_review(reports, out);
        std::cout << "wrote " << out.string() << "\n";
    } else {
        std::cerr << "unknown review kind '" << kind << "'\n";
        return 2;
    }
    return 0;
}

int cmd_import_review(const std::string& config_path, const std::string& kind,
                      const std::string& file) {
    Config cfg = validate_config(config_path);
    std::string invalidate_stage;
    fs::path target;
    if (kind == "language") {
        target = cfg.language_review;
        invalidate_stage = "language";
    } else if (kind == "service") {
        target = cfg.service_review;
        invalidate_stage = "enrich";
    } else {
        std::cerr << "unknown review kind '" << kind << "'\n";
        return 2;
    }
    if (!fs::exists(file)) {
        std::cerr << "review file not found: " << file << "\n";
        return 2;
    }
    write_file(target, read_file(file));
    PipelineState state = PipelineState::load(cfg.checkpoint_dir);
    invalidate_downstream(state, invalidate_stage);
    state.save(cfg.checkpoint_dir);
    std::cout << "imported review into " << target.string() << "; stages from '"
              << invalidate_stage << "' reset, rerun with --resume\n";
    return 0;
}

int cmd_report(const std::string& manifest_path, const std::string& out_dir,
               const std::vector<std::string>& formats, const std::string& rasa3_date) {
    DatasetManifest manifest = load_manifest(manifest_path);
    std::set<std::string> fmt(formats.begin(), formats.end());
    if (fmt.empty()) fmt = {"csv", "json", "svg"};
    for (const auto& f : fmt) {
        if (f != "csv" && f != "json" && f != "svg") {
            std::cerr << "unknown format '" << f << "'\n";
            return 2;
        }
    }
    auto written = emit_outputs(compute_report(manifest, rasa3_date), out_dir, fmt);
    for (const auto& p : written) std::cout << p.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rasa chatbot corpus construction pipeline"};
    app.require_subcommand(1);

    std::string config_path, out_override, review_kind, review_file;
    std::string manifest_path, rasa3_date = "2021-12-01";
    std::vector<std::string> stages, formats;
    bool resume = false;

    auto* run = app.add_subcommand("run", "run pipeline stages");
    run->add_option("--config", config_path, "pipeline config file")->required();
    run->add_option("--stages", stages, "comma-separated stage names")->delimiter(',');
    run->add_flag("--resume", resume, "skip stages already done");
    run->add_option("--out", out_override, "report output directory override");

    auto* status = app.add_subcommand("status", "show per-stage checkpoint status");
    status->add_option("--config", config_path, "pipeline config file")->required();

    auto* exp = app.add_subcommand("export-review", "export a manual review CSV");
    exp->add_option("--config", config_path, "pipeline config file")->required();
    exp->add_option("--kind", review_kind, "language|service")->required();
    exp->add_option("--out", out_override, "CSV destination (defaults to the configured path)");

    auto* imp = app.add_subcommand("import-review", "import a filled review CSV");
    imp->add_option("--config", config_path, "pipeline config file")->required();
    imp->add_option("--kind", review_kind, "language|service")->required();
    imp->add_option("--file", review_file, "filled review CSV")->required();

    auto* rep = app.add_subcommand("report", "compute statistics for a manifest");
    rep->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
    rep->add_option("--out", out_override, "output directory")->required();
    rep->add_option("--formats", formats, "subset of csv,json,svg")->delimiter(',');
    rep->add_option("--rasa3-date", rasa3_date, "Rasa 3 release cutoff date");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, stages, resume, out_override);
        if (status->parsed()) return cmd_status(config_path);
        if (exp->parsed()) return cmd_export_review(config_path, review_kind, out_override);
        if (imp->parsed()) return cmd_import_review(config_path, review_kind, review_file);
        if (rep->parsed()) return cmd_report(manifest_path, out_override, formats, rasa3_date);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
