#pragma once

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/crawl/config.hpp"
#include "sitelens/crawl/ws.hpp"

extern char** environ;

namespace sitelens::crawl {

/// Synchronous DevTools-protocol session over one page WebSocket. Commands
/// block until their response arrives; protocol events encountered along the
/// way are buffered for wait_event/take_events.
class CdpConnection {
public:
    CdpConnection(const std::string& host, int port, const std::string& path,
                  std::chrono::milliseconds timeout)
        : client_(ws::Client::connect(host, port, path, timeout)) {}

    nlohmann::json call(const std::string& method, const nlohmann::json& params,
                        std::chrono::milliseconds timeout) {
        int id = next_id_++;
        nlohmann::json message{{"id", id}, {"method", method}, {"params", params}};
        client_.send_text(message.dump());
        auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            if (auto it = results_.find(id); it != results_.end()) {
                nlohmann::json result = std::move(it->second);
                results_.erase(it);
                if (result.contains("error"))
                    raise(ErrorCode::TransportError,
                          method + " failed: " + result["error"].dump());
                return result.value("result", nlohmann::json::object());
            }
            auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (remaining.count() <= 0)
                raise(ErrorCode::TransportError, method + " timed out");
            pump(remaining);
        }
    }

    /// Waits for one occurrence of the named event; earlier buffered
    /// occurrences are consumed first. Returns its params or nullopt.
    std::optional<nlohmann::json> wait_event(const std::string& method,
                                             std::chrono::milliseconds timeout) {
        auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            for (auto it = events_.begin(); it != events_.end(); ++it) {
                if (it->first == method) {
                    nlohmann::json params = std::move(it->second);
                    events_.erase(it);
                    return params;
                }
            }
            auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (remaining.count() <= 0) return std::nullopt;
            pump(remaining);
        }
    }

    /// Removes and returns all buffered occurrences of an event.
    std::vector<nlohmann::json> take_events(const std::string& method) {
        std::vector<nlohmann::json> out;
        for (auto it = events_.begin(); it != events_.end();) {
            if (it->first == method) {
                out.push_back(std::move(it->second));
                it = events_.erase(it);
            } else {
                ++it;
            }
        }
        return out;
    }

private:
    void pump(std::chrono::milliseconds budget) {
        auto slice = std::min(budget, std::chrono::milliseconds(250));
        auto text = client_.receive_text(slice);
        if (!text) return;
        nlohmann::json message = nlohmann::json::parse(*text, nullptr, false);
        if (message.is_discarded() || !message.is_object()) return;
        if (message.contains("id")) {
            results_[message["id"].get<int>()] = message;
        } else if (message.contains("method")) {
            events_.emplace_back(message["method"].get<std::string>(),
                                 message.value("params", nlohmann::json::object()));
        }
    }

    ws::Client client_;
    int next_id_ = 1;
    std::map<int, nlohmann::json> results_;
    std::deque<std::pair<std::string, nlohmann::json>> events_;
};

/// Queries /json/list until a page target appears; returns the WebSocket
/// path of the first one.
inline std::string discover_page_target(const std::string& host, int port,
                                        std::chrono::milliseconds timeout) {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    std::string last_error = "no page target";
    while (std::chrono::steady_clock::now() < deadline) {
        httplib::Client http(host, port);
        http.set_connection_timeout(2, 0);
        http.set_read_timeout(2, 0);
        if (auto res = http.Get("/json/list"); res && res->status == 200) {
            nlohmann::json targets = nlohmann::json::parse(res->body, nullptr, false);
            if (targets.is_array()) {
                for (const auto& target : targets) {
                    if (target.value("type", "") != "page") continue;
                    auto ws_url = target.value("webSocketDebuggerUrl", "");
                    auto pos = ws_url.find("/devtools/");
                    if (pos != std::string::npos) return ws_url.substr(pos);
                }
                last_error = "no page target among " + std::to_string(targets.size());
            }
        } else {
            last_error = "devtools endpoint not answering";
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    raise(ErrorCode::BrowserLaunch, "devtools discovery failed: " + last_error);
}

/// Well-known Chromium-family binary names, checked against $PATH when the
/// config names no executable. SITELENS_BROWSER overrides everything.
inline std::string find_browser_executable(const CrawlConfig& config) {
    if (!config.browser_executable.empty()) return config.browser_executable;
    if (const char* env = std::getenv("SITELENS_BROWSER"); env && *env) return env;
    const char* candidates[] = {"chromium", "chromium-browser", "google-chrome",
                                "google-chrome-stable", "chrome", "headless_shell"};
    const char* path_env = std::getenv("PATH");
    if (!path_env) return {};
    for (const char* name : candidates) {
        std::string path(path_env);
        std::size_t start = 0;
        while (start <= path.size()) {
            std::size_t end = path.find(':', start);
            std::string dir = path.substr(start, end == std::string::npos ? end : end - start);
            if (!dir.empty()) {
                auto candidate = std::filesystem::path(dir) / name;
                std::error_code ec;
                if (std::filesystem::exists(candidate, ec)) return candidate.string();
            }
            if (end == std::string::npos) break;
            start = end + 1;
        }
    }
    return {};
}

/// A freshly launched browser with a clean throwaway profile. The remote
/// debugging port is assigned by the browser and read back from the
/// DevToolsActivePort file. Teardown kills the process and deletes the
/// profile directory.
class BrowserProcess {
public:
    BrowserProcess(const BrowserProcess&) = delete;
    BrowserProcess& operator=(const BrowserProcess&) = delete;

    BrowserProcess(BrowserProcess&& other) noexcept
        : pid_(other.pid_), port_(other.port_), profile_dir_(std::move(other.profile_dir_)) {
        other.pid_ = -1;
    }

    ~BrowserProcess() { terminate(); }

    static BrowserProcess launch(const CrawlConfig& config) {
        std::string exe = find_browser_executable(config);
        if (exe.empty())
            raise(ErrorCode::BrowserLaunch,
                  "no Chromium-family browser found; set crawl.browser_executable or "
                  "SITELENS_BROWSER");

        std::random_device rd;
        auto profile = std::filesystem::temp_directory_path() /
                       ("sitelens-profile-" + std::to_string(::getpid()) + "-" +
                        std::to_string(rd()));
        std::error_code ec;
        std::filesystem::create_directories(profile, ec);
        if (ec) raise(ErrorCode::BrowserLaunch, "cannot create profile dir");

        std::vector<std::string> args = {
            exe,
            "--remote-debugging-port=0",
            "--user-data-dir=" + profile.string(),
            "--no-first-run",
            "--no-default-browser-check",
            "--disable-background-networking",
            "--disable-sync",
            "--disable-component-update",
            "--mute-audio",
            "--window-size=" + std::to_string(config.viewport_width) + "," +
                std::to_string(config.viewport_height),
        };
        if (!config.headful) args.push_back("--headless=new");
        for (const auto& extra : config.extra_browser_args) args.push_back(extra);
        args.push_back("about:blank");

        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);

        pid_t pid = -1;
        int rc = posix_spawnp(&pid, exe.c_str(), nullptr, nullptr, argv.data(), environ);
        if (rc != 0) {
            std::filesystem::remove_all(profile, ec);
            raise(ErrorCode::BrowserLaunch, "cannot spawn '" + exe + "': " + strerror(rc));
        }

        BrowserProcess process(pid, profile);
        process.port_ = process.wait_for_devtools_port(std::chrono::seconds(20));
        return process;
    }

    int port() const { return port_; }

private:
    BrowserProcess(pid_t pid, std::filesystem::path profile)
        : pid_(pid), profile_dir_(std::move(profile)) {}

    int wait_for_devtools_port(std::chrono::seconds timeout) {
        auto port_file = profile_dir_ / "DevToolsActivePort";
        auto deadline = std::chrono::steady_clock::now() + timeout;
        while (std::chrono::steady_clock::now() < deadline) {
            if (int status = 0; waitpid(pid_, &status, WNOHANG) == pid_) {
                pid_ = -1;
                cleanup_profile();
                raise(ErrorCode::BrowserLaunch, "browser exited during startup");
            }
            std::ifstream in(port_file);
            if (in) {
                int port = 0;
                in >> port;
                if (port > 0) return port;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        terminate();
        raise(ErrorCode::BrowserLaunch, "DevToolsActivePort never appeared");
    }

    void terminate() {
        if (pid_ > 0) {
            ::kill(pid_, SIGTERM);
            auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(3);
            int status = 0;
            while (std::chrono::steady_clock::now() < deadline) {
                if (waitpid(pid_, &status, WNOHANG) == pid_) {
                    pid_ = -1;
                    break;
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
            if (pid_ > 0) {
                ::kill(pid_, SIGKILL);
                waitpid(pid_, &status, 0);
                pid_ = -1;
            }
        }
        cleanup_profile();
    }

    void cleanup_profile() {
        if (!profile_dir_.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(profile_dir_, ec);
            profile_dir_.clear();
        }
    }

    pid_t pid_ = -1;
    int port_ = 0;
    std::filesystem::path profile_dir_;
};

}  // namespace sitelens::crawl
