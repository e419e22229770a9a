#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "sitelens/core/error.hpp"

namespace sitelens::crawl {

/// Landing-page visit parameters. Every domain is visited by a fresh
/// browser instance with a clean profile; after the load event fires the
/// crawler waits a further `load_wait` before harvesting.
struct CrawlConfig {
    std::chrono::milliseconds load_wait{10000};
    std::chrono::milliseconds nav_timeout{30000};
    bool headful = true;
    int viewport_width = 1366;
    int viewport_height = 768;
    int max_parallel = 1;
    std::string browser_executable;                // auto-detected when empty
    std::vector<std::string> extra_browser_args;   // appended to the launch command
    std::string devtools_endpoint;                 // "host:port": attach instead of launching

    void validate() const {
        if (load_wait > nav_timeout)
            raise(ErrorCode::ConfigError, "load_wait must not exceed nav_timeout");
        if (max_parallel < 1) raise(ErrorCode::ConfigError, "max_parallel must be >= 1");
        if (viewport_width < 1 || viewport_height < 1)
            raise(ErrorCode::ConfigError, "viewport must be positive");
    }
};

}  // namespace sitelens::crawl
