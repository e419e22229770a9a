#pragma once

#include <functional>
#include <string>
#include <thread>

#include "httplib.h"

namespace sitelens::testing {

/// httplib server on an ephemeral localhost port, torn down on destruction.
class ScopedServer {
public:
    ScopedServer() = default;

    ~ScopedServer() { stop(); }

    httplib::Server& server() { return server_; }

    int start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port_;
    }

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace sitelens::testing
