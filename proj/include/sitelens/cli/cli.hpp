#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sitelens/crawl/crawler.hpp"
#include "sitelens/dataset/builders.hpp"
#include "sitelens/eval/metrics.hpp"
#include "sitelens/llm/http_backend.hpp"
#include "sitelens/llm/mock_backend.hpp"
#include "sitelens/measure/scopes.hpp"
#include "sitelens/measure/trackers.hpp"
#include "sitelens/prompt/classify.hpp"
#include "sitelens/report/config.hpp"
#include "sitelens/report/figure.hpp"
#include "sitelens/report/summary.hpp"

namespace sitelens::cli {

namespace detail {

inline void require_file(const std::string& path, const std::string& what) {
    if (path.empty())
        raise(ErrorCode::ConfigError, what + " path not set (config or flag)");
    if (!std::filesystem::exists(path))
        raise(ErrorCode::ConfigError, what + " '" + path + "' does not exist");
}

inline void write_text(const std::string& path, std::string_view text) {
    if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write '" + path + "'");
    out << text;
}

inline PublicSuffixTable load_psl(const report::ToolConfig& config) {
    require_file(config.paths.psl, "public suffix list");
    return PublicSuffixTable::from_file(config.paths.psl);
}

inline prompt::PromptTemplate build_template(const report::ToolConfig& config, TaskKind task,
                                             bool screenshots, bool university_hint,
                                             bool single_label,
                                             const std::string& template_file) {
    prompt::PromptTemplate tmpl;
    switch (task) {
        case TaskKind::Governmental:
            tmpl = prompt::governmental_template(screenshots, university_hint);
            break;
        case TaskKind::Country:
            tmpl = prompt::country_template(screenshots);
            break;
        case TaskKind::Category:
            tmpl = prompt::category_template(screenshots, config.categories,
                                             single_label ? 1 : 2);
            break;
    }
    if (!template_file.empty()) tmpl.skeleton = prompt::load_skeleton_file(template_file);
    return tmpl;
}

inline std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

}  // namespace detail

/// Entry point behind the sitelens binary; also callable in-process.
/// Exit codes: 0 success, 1 completed with per-item failures recorded,
/// 2 fatal configuration or environment error.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"sitelens: labeled website datasets, LLM classification, "
                 "and web-privacy measurements"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file");

    // ---- sample ----
    auto* sample = app.add_subcommand("sample", "Build labeled dataset manifests");
    sample->require_subcommand(1);
    std::string gov_seed_path, manifest_out, manual_labels_path, curlie_path;
    std::uint64_t seed_flag = 0;
    bool seed_given = false;
    std::size_t per_cc = 100, generic_n = 500, min_class = 10, per_class = 500;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_flag, "sampling seed")
            ->each([&](const std::string&) { seed_given = true; });
        cmd->add_option("--out", manifest_out, "manifest output path (JSONL)");
    };
    auto* sample_gov = sample->add_subcommand("governmental", "balanced gov/non-gov benchmark");
    sample_gov->add_option("--gov-seed", gov_seed_path, "seed list of governmental sites")
        ->required();
    add_seed(sample_gov);
    auto* sample_country = sample->add_subcommand("country", "ccTLD-labeled country benchmark");
    sample_country->add_option("--per-cc", per_cc, "samples per ccTLD");
    sample_country->add_option("--generic-n", generic_n, "generic-TLD samples");
    sample_country->add_option("--min-class", min_class, "drop classes below this size");
    sample_country->add_option("--manual-labels", manual_labels_path,
                               "CSV domain,label for generic-TLD sites");
    add_seed(sample_country);
    auto* sample_category = sample->add_subcommand("category", "balanced category benchmark");
    sample_category->add_option("--curlie", curlie_path, "curated snapshot CSV")->required();
    sample_category->add_option("--per-class", per_class, "samples per category");
    add_seed(sample_category);

    // ---- crawl ----
    auto* crawl_cmd = app.add_subcommand("crawl", "Visit landing pages and store artifacts");
    std::string manifest_path, store_path;
    int load_wait_ms = -1, parallel = -1;
    bool headless = false;
    crawl_cmd->add_option("--manifest", manifest_path, "dataset manifest")->required();
    crawl_cmd->add_option("--store", store_path, "artifact store directory");
    crawl_cmd->add_option("--load-wait", load_wait_ms, "post-load wait in ms");
    crawl_cmd->add_option("--parallel", parallel, "concurrent browser instances");
    crawl_cmd->add_flag("--headless", headless, "run the browser headless");

    // ---- classify ----
    auto* classify_cmd = app.add_subcommand("classify", "Label manifest sites with a backend");
    std::string backend_name = "mock", predictions_out, template_file;
    bool with_screenshots = false, university_hint = false, single_label = false;
    std::size_t batch_size = 10;
    int parse_retries = 2;
    double mock_error_rate = 0.0;
    std::uint64_t mock_seed = 1;
    classify_cmd->add_option("--manifest", manifest_path, "dataset manifest")->required();
    classify_cmd->add_option("--backend", backend_name,
                             "backend name from the config, or 'mock'");
    classify_cmd->add_option("--out", predictions_out, "prediction store (JSONL)");
    classify_cmd->add_option("--store", store_path, "artifact store (for screenshots)");
    classify_cmd->add_flag("--screenshots", with_screenshots, "attach homepage screenshots");
    classify_cmd->add_flag("--university-hint", university_hint,
                           "extra governmental-prompt instruction");
    classify_cmd->add_flag("--single-label", single_label, "one category per site");
    classify_cmd->add_option("--batch-size", batch_size, "sites per prompt");
    classify_cmd->add_option("--parse-retries", parse_retries, "whole-batch retries");
    classify_cmd->add_option("--template-file", template_file, "prompt skeleton file");
    classify_cmd->add_option("--mock-error-rate", mock_error_rate, "mock corruption rate");
    classify_cmd->add_option("--mock-seed", mock_seed, "mock corruption seed");

    // ---- evaluate ----
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against a manifest");
    std::vector<std::string> pred_paths, subset_names;
    std::string rule_name = "exact", report_out, summary_out, confusion_out;
    evaluate_cmd->add_option("--manifest", manifest_path, "dataset manifest")->required();
    evaluate_cmd->add_option("--pred", pred_paths, "prediction store(s)")->required();
    evaluate_cmd->add_option("--rule", rule_name, "exact | any-of-2");
    evaluate_cmd->add_option("--subset", subset_names, "named subset(s), e.g. generic_tld");
    evaluate_cmd->add_option("--out", report_out, "report JSON path");
    evaluate_cmd->add_option("--summary", summary_out, "summary CSV path (multi-pred table)");
    evaluate_cmd->add_option("--confusion", confusion_out, "confusion matrix CSV path");

    // ---- measure ----
    auto* measure_cmd = app.add_subcommand("measure", "Run the privacy measurements");
    measure_cmd->require_subcommand(1);
    std::string disconnect_path, scope_records_path, idp_filter, classifier_name = "a";
    std::size_t min_sites = 100, top_k = 5, top_categories = 10;
    bool compare = false;
    std::string measure_out;
    auto* trackers_cmd =
        measure_cmd->add_subcommand("trackers", "third-party tracking-cookie prevalence");
    trackers_cmd->add_option("--manifest", manifest_path, "country-labeled manifest")
        ->required();
    trackers_cmd->add_option("--store", store_path, "artifact store");
    trackers_cmd->add_option("--disconnect", disconnect_path, "Disconnect services JSON");
    trackers_cmd->add_option("--min-sites", min_sites, "minimum sites per country");
    trackers_cmd->add_option("--out", measure_out, "output basename (.json/.csv)");
    auto* scripts_cmd =
        measure_cmd->add_subcommand("scripts", "top body-script trackers per country");
    scripts_cmd->add_option("--manifest", manifest_path, "country-labeled manifest")->required();
    scripts_cmd->add_option("--store", store_path, "artifact store");
    scripts_cmd->add_option("--disconnect", disconnect_path, "Disconnect services JSON");
    scripts_cmd->add_option("--top", top_k, "top-k trackers per country");
    scripts_cmd->add_option("--out", measure_out, "output basename (.json/.csv)");
    auto* scopes_cmd =
        measure_cmd->add_subcommand("scopes", "minimal-scope share by website category");
    scopes_cmd->add_option("--records", scope_records_path, "ScopeRecord JSONL")->required();
    scopes_cmd->add_option("--classifier", classifier_name, "a (external tool) | b (model)");
    scopes_cmd->add_option("--top", top_categories, "most populous categories to keep");
    scopes_cmd->add_option("--idp", idp_filter, "restrict to one identity provider");
    scopes_cmd->add_flag("--compare", compare, "compare both classifiers and report deltas");
    scopes_cmd->add_option("--out", measure_out, "output basename (.json/.csv)");

    // ---- templates ----
    auto* templates_cmd =
        app.add_subcommand("templates", "Write the default prompt skeleton files");
    std::string templates_dir = "templates";
    bool templates_screenshots = false;
    templates_cmd->add_option("--dir", templates_dir, "output directory");
    templates_cmd->add_flag("--screenshots", templates_screenshots,
                            "screenshot-mode variants");

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "Render a grouped-bar SVG from a CSV");
    std::string csv_in, svg_out, title = "sitelens figure", x_label, y_label;
    report_cmd->add_option("--csv", csv_in, "figure CSV (category,series,value)")->required();
    report_cmd->add_option("--out", svg_out, "SVG output path")->required();
    report_cmd->add_option("--title", title, "figure title");
    report_cmd->add_option("--x-label", x_label, "x axis label");
    report_cmd->add_option("--y-label", y_label, "y axis label");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        report::ToolConfig config =
            config_path.empty() ? report::ToolConfig{} : report::ToolConfig::load(config_path);
        auto out_path = [&](const std::string& name) {
            return (std::filesystem::path(config.paths.output_dir) / name).string();
        };

        if (sample_gov->parsed() || sample_country->parsed() || sample_category->parsed()) {
            auto psl = detail::load_psl(config);
            dataset::DatasetManifest manifest;
            if (sample_gov->parsed()) {
                detail::require_file(gov_seed_path, "governmental seed list");
                detail::require_file(config.paths.tranco, "Tranco list");
                auto seeds = dataset::load_seed_list(gov_seed_path, psl);
                auto tranco = dataset::load_tranco(config.paths.tranco);
                auto seed = seed_given ? seed_flag : config.seed_for("governmental");
                manifest = dataset::build_governmental_dataset(
                    seeds, tranco, dataset::default_excluded_gov_tlds(), seed, psl);
                if (manifest_out.empty()) manifest_out = out_path("governmental.jsonl");
            } else if (sample_country->parsed()) {
                detail::require_file(config.paths.tranco, "Tranco list");
                std::map<std::string, std::string> manual;
                if (!manual_labels_path.empty()) {
                    detail::require_file(manual_labels_path, "manual labels");
                    manual = dataset::load_manual_labels(manual_labels_path);
                }
                auto seed = seed_given ? seed_flag : config.seed_for("country");
                manifest = dataset::build_country_dataset(
                    dataset::load_tranco(config.paths.tranco), config.cctld, per_cc, generic_n,
                    min_class, manual, seed, psl);
                if (manifest_out.empty()) manifest_out = out_path("country.jsonl");
            } else {
                detail::require_file(curlie_path, "curated category snapshot");
                auto seed = seed_given ? seed_flag : config.seed_for("category");
                manifest = dataset::build_category_dataset(dataset::load_curlie(curlie_path),
                                                           per_class, seed, psl,
                                                           config.categories);
                if (manifest_out.empty()) manifest_out = out_path("category.jsonl");
            }
            if (auto parent = std::filesystem::path(manifest_out).parent_path();
                !parent.empty())
                std::filesystem::create_directories(parent);
            dataset::save_manifest(manifest, manifest_out);
            std::cout << "wrote " << manifest.records.size() << " records ("
                      << manifest.class_counts().size() << " classes) to " << manifest_out
                      << "\n";
            return 0;
        }

        if (crawl_cmd->parsed()) {
            auto psl = detail::load_psl(config);
            detail::require_file(manifest_path, "manifest");
            auto manifest = dataset::load_manifest(manifest_path, psl);
            auto crawl_config = config.crawl;
            if (load_wait_ms >= 0) crawl_config.load_wait = std::chrono::milliseconds(load_wait_ms);
            if (parallel > 0) crawl_config.max_parallel = parallel;
            if (headless) crawl_config.headful = false;
            crawl::ArtifactStore store(store_path.empty() ? config.paths.artifact_store
                                                          : store_path);
            auto summary = crawl::crawl_all(manifest, crawl_config, store);
            std::cout << "crawl: " << summary.success << " ok, " << summary.nav_error
                      << " nav errors, " << summary.timeout << " timeouts, "
                      << summary.skipped << " already stored (of " << summary.total << ")\n";
            return (summary.nav_error + summary.timeout) > 0 ? 1 : 0;
        }

        if (classify_cmd->parsed()) {
            auto psl = detail::load_psl(config);
            detail::require_file(manifest_path, "manifest");
            auto manifest = dataset::load_manifest(manifest_path, psl);
            auto tmpl = detail::build_template(config, manifest.task, with_screenshots,
                                               university_hint, single_label, template_file);

            std::unique_ptr<llm::Backend> backend;
            if (backend_name == "mock") {
                std::map<std::string, std::string> truth;
                for (const auto& mr : manifest.records)
                    truth[mr.record.url] = mr.record.labels.at(manifest.task);
                backend = std::make_unique<llm::MockBackend>(tmpl, truth, mock_error_rate,
                                                             mock_seed);
            } else {
                backend = std::make_unique<llm::HttpBackend>(config.backend(backend_name));
            }

            prompt::ScreenshotSource screenshots;
            std::optional<crawl::ArtifactStore> store;
            if (with_screenshots) {
                store.emplace(store_path.empty() ? config.paths.artifact_store : store_path);
                screenshots = [&store](const WebsiteRecord& record) {
                    if (!store->contains(record.registrable_domain))
                        raise(ErrorCode::MissingScreenshot,
                              "no crawl artifact for '" + record.registrable_domain + "'");
                    auto artifact = store->load(record.registrable_domain);
                    if (artifact.outcome != crawl::CrawlOutcome::Success ||
                        artifact.screenshot.empty())
                        raise(ErrorCode::MissingScreenshot,
                              "no screenshot for '" + record.registrable_domain + "'");
                    return artifact.screenshot;
                };
            }

            if (predictions_out.empty()) predictions_out = out_path("predictions.jsonl");
            if (auto parent = std::filesystem::path(predictions_out).parent_path();
                !parent.empty())
                std::filesystem::create_directories(parent);
            prompt::PredictionStore store_file(predictions_out);
            auto outcome = prompt::classify(
                manifest, tmpl, *backend,
                {.batch_size = batch_size, .parse_retries = parse_retries}, store_file,
                screenshots);
            std::cout << "classify: " << outcome.classified << " classified, "
                      << outcome.unclassified << " unclassified, " << outcome.skipped
                      << " already stored, " << outcome.requests << " requests -> "
                      << predictions_out << "\n";
            return outcome.unclassified > 0 ? 1 : 0;
        }

        if (evaluate_cmd->parsed()) {
            auto psl = detail::load_psl(config);
            detail::require_file(manifest_path, "manifest");
            auto manifest = dataset::load_manifest(manifest_path, psl);
            auto rule = eval::match_rule_from_name(rule_name);
            std::vector<eval::SubsetFilter> subsets;
            for (const auto& name : subset_names)
                subsets.push_back(eval::builtin_subset_filter(name));

            std::vector<report::SummaryRow> rows;
            for (const auto& pred_path : pred_paths) {
                detail::require_file(pred_path, "prediction store");
                prompt::PredictionStore store(pred_path);
                rows.push_back({detail::stem_of(pred_path),
                                eval::evaluate(manifest, store.predictions(), rule, subsets)});
            }

            if (rows.size() == 1) {
                auto json_text = eval::report_to_json(rows.front().report).dump(2) + "\n";
                if (report_out.empty()) {
                    std::cout << json_text;
                } else {
                    detail::write_text(report_out, json_text);
                    std::cout << "wrote " << report_out << "\n";
                }
                if (!confusion_out.empty())
                    detail::write_text(confusion_out, rows.front().report.confusion.to_csv());
            }
            if (!summary_out.empty() || rows.size() > 1) {
                if (summary_out.empty()) summary_out = out_path("evaluation_summary.csv");
                detail::write_text(summary_out, report::summary_csv(rows));
                std::cout << report::summary_table(rows);
                std::cout << "wrote " << summary_out << "\n";
            }
            return 0;
        }

        if (trackers_cmd->parsed() || scripts_cmd->parsed()) {
            auto psl = detail::load_psl(config);
            detail::require_file(manifest_path, "manifest");
            if (disconnect_path.empty()) disconnect_path = config.paths.disconnect;
            detail::require_file(disconnect_path, "Disconnect list");
            auto manifest = dataset::load_manifest(manifest_path, psl);
            auto trackers = measure::load_disconnect(disconnect_path);
            crawl::ArtifactStore store(store_path.empty() ? config.paths.artifact_store
                                                          : store_path);

            std::vector<crawl::CrawlArtifact> artifacts;
            std::size_t missing = 0;
            for (const auto& mr : manifest.records) {
                if (!store.contains(mr.record.registrable_domain)) {
                    ++missing;
                    continue;
                }
                auto artifact = store.load(mr.record.registrable_domain);
                artifact.record.labels = mr.record.labels;
                artifacts.push_back(std::move(artifact));
            }
            if (missing > 0)
                std::cerr << "note: " << missing << " manifest records have no artifact\n";

            if (trackers_cmd->parsed()) {
                auto prevalence =
                    measure::third_party_tracker_prevalence(artifacts, trackers, psl, min_sites);
                nlohmann::json j = nlohmann::json::object();
                std::map<std::string, double> pct;
                for (const auto& [country, stats] : prevalence) {
                    j[country] = {{"sites_total", stats.sites_total},
                                  {"sites_with_tp_tracker", stats.sites_with_tp_tracker},
                                  {"pct", stats.pct}};
                    pct[country] = stats.pct;
                }
                if (measure_out.empty()) measure_out = out_path("trackers");
                detail::write_text(measure_out + ".json", j.dump(2) + "\n");
                if (!pct.empty()) {
                    auto figure = report::make_figure(
                        "Sites with third-party tracking cookies", "country", "% of sites",
                        {{"third-party tracker cookies", pct}});
                    detail::write_text(measure_out + ".csv", report::sidecar_csv(figure));
                }
                std::cout << "wrote " << measure_out << ".json (" << prevalence.size()
                          << " countries)\n";
            } else {
                auto ranking = measure::top_script_trackers(artifacts, trackers, top_k);
                nlohmann::json j = nlohmann::json::object();
                std::string csv = "country,rank,domain,sites\n";
                for (const auto& [country, ranked] : ranking) {
                    nlohmann::json list = nlohmann::json::array();
                    for (std::size_t i = 0; i < ranked.size(); ++i) {
                        list.push_back(
                            {{"domain", ranked[i].domain}, {"sites", ranked[i].sites}});
                        csv += country + "," + std::to_string(i + 1) + "," +
                               csv_escape(ranked[i].domain) + "," +
                               std::to_string(ranked[i].sites) + "\n";
                    }
                    j[country] = list;
                }
                if (measure_out.empty()) measure_out = out_path("script_trackers");
                detail::write_text(measure_out + ".json", j.dump(2) + "\n");
                detail::write_text(measure_out + ".csv", csv);
                std::cout << "wrote " << measure_out << ".json (" << ranking.size()
                          << " countries)\n";
            }
            return 0;
        }

        if (scopes_cmd->parsed()) {
            detail::require_file(scope_records_path, "scope records");
            auto records = measure::load_scope_records(scope_records_path);
            std::optional<std::string> idp;
            if (!idp_filter.empty()) idp = idp_filter;

            nlohmann::json j = nlohmann::json::object();
            auto stats_to_json = [](const std::map<std::string, measure::CategoryScopeStats>& m) {
                nlohmann::json out = nlohmann::json::object();
                for (const auto& [category, stats] : m)
                    out[category] = {{"total", stats.total}, {"minimal_pct", stats.minimal_pct}};
                return out;
            };

            if (compare) {
                auto a = measure::minimal_scope_by_category(records, measure::Classifier::A,
                                                            top_categories, idp);
                auto b = measure::minimal_scope_by_category(records, measure::Classifier::B,
                                                            top_categories, idp);
                auto cmp = measure::compare_breakdowns(measure::to_pct_map(a),
                                                       measure::to_pct_map(b));
                j["classifier_a"] = stats_to_json(a);
                j["classifier_b"] = stats_to_json(b);
                nlohmann::json deltas = nlohmann::json::object();
                for (const auto& [category, delta] : cmp.delta) deltas[category] = delta;
                j["delta"] = deltas;
                j["max_delta"] = cmp.max_delta;
                j["max_delta_category"] = cmp.max_delta_category;
                j["bottom2_agree"] = cmp.bottom2_agree;

                auto figure = report::make_figure(
                    "Minimal-scope share by category", "category", "% minimal scope",
                    {{"classifier A", measure::to_pct_map(a)},
                     {"classifier B", measure::to_pct_map(b)}});
                if (measure_out.empty()) measure_out = out_path("scopes_compare");
                detail::write_text(measure_out + ".csv", report::sidecar_csv(figure));
            } else {
                auto which = measure::classifier_from_name(classifier_name);
                auto stats =
                    measure::minimal_scope_by_category(records, which, top_categories, idp);
                j["breakdown"] = stats_to_json(stats);
                auto figure = report::make_figure(
                    "Minimal-scope share by category", "category", "% minimal scope",
                    {{"classifier " + to_upper(classifier_name), measure::to_pct_map(stats)}});
                if (measure_out.empty()) measure_out = out_path("scopes");
                detail::write_text(measure_out + ".csv", report::sidecar_csv(figure));
            }
            detail::write_text(measure_out + ".json", j.dump(2) + "\n");
            std::cout << "wrote " << measure_out << ".json\n";
            return 0;
        }

        if (templates_cmd->parsed()) {
            std::filesystem::create_directories(templates_dir);
            auto dump = [&](const std::string& name, const prompt::PromptTemplate& tmpl) {
                detail::write_text((std::filesystem::path(templates_dir) / name).string(),
                                   prompt::canonical_skeleton(tmpl));
            };
            dump("governmental.txt", prompt::governmental_template(templates_screenshots));
            dump("country.txt", prompt::country_template(templates_screenshots));
            dump("category.txt",
                 prompt::category_template(templates_screenshots, config.categories));
            std::cout << "wrote 3 skeletons to " << templates_dir << "\n";
            return 0;
        }

        if (report_cmd->parsed()) {
            detail::require_file(csv_in, "figure CSV");
            std::ifstream in(csv_in, std::ios::binary);
            auto figure = report::figure_from_csv(in, title, x_label, y_label);
            std::string sidecar = svg_out + ".csv";
            report::emit_grouped_bar(figure, svg_out, sidecar);
            std::cout << "wrote " << svg_out << " and " << sidecar << "\n";
            return 0;
        }

        raise(ErrorCode::ConfigError, "no subcommand handled");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

inline int run(const std::vector<std::string>& args) {
    std::vector<std::string> argv_storage;
    argv_storage.push_back("sitelens");
    for (const auto& a : args) argv_storage.push_back(a);
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

inline int run(int argc, char** argv) {
    return run(argc, const_cast<const char* const*>(argv));
}

}  // namespace sitelens::cli
