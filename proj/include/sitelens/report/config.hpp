#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/core/record.hpp"
#include "sitelens/crawl/config.hpp"
#include "sitelens/dataset/cctld.hpp"
#include "sitelens/llm/backend.hpp"

namespace sitelens::report {

struct ToolPaths {
    std::string tranco;
    std::string psl;
    std::string disconnect;
    std::string artifact_store = "artifacts";
    std::string output_dir = "out";
};

/// Toolkit configuration file (JSON). Everything has a default; the paths
/// referenced by a subcommand are checked when that subcommand starts.
struct ToolConfig {
    std::map<std::string, llm::BackendConfig> backends;
    crawl::CrawlConfig crawl;
    ToolPaths paths;
    std::map<std::string, std::uint64_t> seeds;
    dataset::CcTldMap cctld = dataset::CcTldMap::defaults();
    std::vector<std::string> categories = default_categories();

    const llm::BackendConfig& backend(const std::string& name) const {
        auto it = backends.find(name);
        if (it == backends.end())
            raise(ErrorCode::ConfigError, "no backend named '" + name + "' in the config");
        return it->second;
    }

    std::uint64_t seed_for(const std::string& stage, std::uint64_t fallback = 1) const {
        auto it = seeds.find(stage);
        return it == seeds.end() ? fallback : it->second;
    }

    static ToolConfig from_json(const nlohmann::json& j) {
        if (!j.is_object()) raise(ErrorCode::ConfigError, "config root must be a JSON object");
        ToolConfig config;

        if (j.contains("backends")) {
            if (!j["backends"].is_object())
                raise(ErrorCode::ConfigError, "'backends' must be an object");
            for (const auto& [name, b] : j["backends"].items()) {
                llm::BackendConfig backend;
                backend.name = name;
                backend.endpoint_url = b.value("endpoint_url", "");
                backend.api_key_env = b.value("api_key_env", "");
                backend.model_id = b.value("model_id", "");
                backend.wire_dialect =
                    llm::wire_dialect_from_name(b.value("wire_dialect", "openai-compatible"));
                backend.max_concurrent = b.value("max_concurrent", 4);
                backend.requests_per_minute = b.value("requests_per_minute", 60);
                backend.max_retries = b.value("max_retries", 3);
                backend.timeout = std::chrono::milliseconds(b.value("timeout_ms", 30000));
                backend.supports_images = b.value("supports_images", false);
                backend.validate();
                config.backends[name] = std::move(backend);
            }
        }

        if (j.contains("crawl")) {
            const auto& c = j["crawl"];
            config.crawl.load_wait = std::chrono::milliseconds(c.value("load_wait_ms", 10000));
            config.crawl.nav_timeout =
                std::chrono::milliseconds(c.value("nav_timeout_ms", 30000));
            config.crawl.headful = c.value("headful", true);
            if (c.contains("viewport")) {
                const auto& v = c["viewport"];
                if (!v.is_array() || v.size() != 2)
                    raise(ErrorCode::ConfigError, "'crawl.viewport' must be [width, height]");
                config.crawl.viewport_width = v[0].get<int>();
                config.crawl.viewport_height = v[1].get<int>();
            }
            config.crawl.max_parallel = c.value("max_parallel", 1);
            config.crawl.browser_executable = c.value("browser_executable", "");
            if (c.contains("extra_browser_args"))
                config.crawl.extra_browser_args =
                    c["extra_browser_args"].get<std::vector<std::string>>();
            config.crawl.devtools_endpoint = c.value("devtools_endpoint", "");
            config.crawl.validate();
        }

        if (j.contains("paths")) {
            const auto& p = j["paths"];
            config.paths.tranco = p.value("tranco", "");
            config.paths.psl = p.value("psl", "");
            config.paths.disconnect = p.value("disconnect", "");
            config.paths.artifact_store = p.value("artifact_store", "artifacts");
            config.paths.output_dir = p.value("output_dir", "out");
        }

        if (j.contains("seeds")) {
            for (const auto& [stage, seed] : j["seeds"].items()) {
                if (!seed.is_number_unsigned() && !seed.is_number_integer())
                    raise(ErrorCode::ConfigError, "seed '" + stage + "' must be an integer");
                config.seeds[stage] = seed.get<std::uint64_t>();
            }
        }

        if (j.contains("cctld_map")) {
            config.cctld.cc.clear();
            for (const auto& [tld, code] : j["cctld_map"].items())
                config.cctld.cc[to_lower(tld)] = code.get<std::string>();
        }
        if (j.contains("generic_tlds")) {
            config.cctld.generic.clear();
            for (const auto& tld : j["generic_tlds"])
                config.cctld.generic.insert(to_lower(tld.get<std::string>()));
        }
        config.cctld.validate();

        if (j.contains("categories")) {
            config.categories = j["categories"].get<std::vector<std::string>>();
            if (config.categories.empty())
                raise(ErrorCode::ConfigError, "'categories' must not be empty");
        }
        return config;
    }

    static ToolConfig load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(ErrorCode::ConfigError, "cannot open config '" + path + "'");
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded())
            raise(ErrorCode::ConfigError, "config '" + path + "' is not valid JSON");
        return from_json(j);
    }
};

}  // namespace sitelens::report
