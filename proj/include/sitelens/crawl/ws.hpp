#pragma once

// Minimal RFC 6455 WebSocket client for loopback DevTools endpoints.
// Text messages only at the API surface; handles fragmentation, ping/pong
// and close. Receive deadlines are implemented with SO_RCVTIMEO and an
// accumulating buffer, so a timed-out receive never desynchronizes framing.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <cstring>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "sitelens/core/base64.hpp"
#include "sitelens/core/error.hpp"

namespace sitelens::crawl::ws {

enum class Opcode : std::uint8_t {
    Continuation = 0x0,
    Text = 0x1,
    Binary = 0x2,
    Close = 0x8,
    Ping = 0x9,
    Pong = 0xA,
};

struct Frame {
    bool fin = true;
    Opcode opcode = Opcode::Text;
    std::string payload;
};

/// Encodes one frame. Client frames must carry a 4-byte mask.
inline std::string encode_frame(const Frame& frame, const std::uint8_t* mask4 = nullptr) {
    std::string out;
    out.push_back(static_cast<char>((frame.fin ? 0x80 : 0x00) |
                                    static_cast<std::uint8_t>(frame.opcode)));
    const std::size_t len = frame.payload.size();
    const std::uint8_t mask_bit = mask4 ? 0x80 : 0x00;
    if (len < 126) {
        out.push_back(static_cast<char>(mask_bit | len));
    } else if (len <= 0xFFFF) {
        out.push_back(static_cast<char>(mask_bit | 126));
        out.push_back(static_cast<char>((len >> 8) & 0xFF));
        out.push_back(static_cast<char>(len & 0xFF));
    } else {
        out.push_back(static_cast<char>(mask_bit | 127));
        for (int shift = 56; shift >= 0; shift -= 8)
            out.push_back(static_cast<char>((len >> shift) & 0xFF));
    }
    if (mask4) {
        out.append(reinterpret_cast<const char*>(mask4), 4);
        for (std::size_t i = 0; i < len; ++i)
            out.push_back(static_cast<char>(frame.payload[i] ^ mask4[i % 4]));
    } else {
        out += frame.payload;
    }
    return out;
}

/// Incremental frame decoder over an accumulating byte buffer.
class FrameParser {
public:
    void feed(const char* data, std::size_t len) { buffer_.append(data, len); }

    /// Extracts the next complete frame, or nullopt if more bytes are needed.
    std::optional<Frame> next() {
        if (buffer_.size() < 2) return std::nullopt;
        const auto* b = reinterpret_cast<const std::uint8_t*>(buffer_.data());
        Frame frame;
        frame.fin = (b[0] & 0x80) != 0;
        frame.opcode = static_cast<Opcode>(b[0] & 0x0F);
        bool masked = (b[1] & 0x80) != 0;
        std::uint64_t len = b[1] & 0x7F;
        std::size_t header = 2;
        if (len == 126) {
            if (buffer_.size() < 4) return std::nullopt;
            len = (static_cast<std::uint64_t>(b[2]) << 8) | b[3];
            header = 4;
        } else if (len == 127) {
            if (buffer_.size() < 10) return std::nullopt;
            len = 0;
            for (int i = 0; i < 8; ++i) len = (len << 8) | b[2 + i];
            header = 10;
        }
        std::uint8_t mask[4] = {0, 0, 0, 0};
        if (masked) {
            if (buffer_.size() < header + 4) return std::nullopt;
            std::memcpy(mask, b + header, 4);
            header += 4;
        }
        if (buffer_.size() < header + len) return std::nullopt;
        frame.payload.resize(static_cast<std::size_t>(len));
        for (std::uint64_t i = 0; i < len; ++i) {
            char c = buffer_[header + static_cast<std::size_t>(i)];
            frame.payload[static_cast<std::size_t>(i)] =
                masked ? static_cast<char>(static_cast<std::uint8_t>(c) ^ mask[i % 4]) : c;
        }
        buffer_.erase(0, header + static_cast<std::size_t>(len));
        return frame;
    }

private:
    std::string buffer_;
};

inline std::string websocket_accept_key(const std::string& client_key) {
    static const char* guid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
    std::string input = client_key + guid;
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(input.data()), input.size(), digest);
    return base64_encode(digest, SHA_DIGEST_LENGTH);
}

namespace detail {

inline void set_recv_timeout(int fd, std::chrono::milliseconds timeout) {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

}  // namespace detail

/// Blocking WebSocket client bound to one connection.
class Client {
public:
    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;
    Client(Client&& other) noexcept { *this = std::move(other); }
    Client& operator=(Client&& other) noexcept {
        if (this != &other) {
            close();
            fd_ = other.fd_;
            other.fd_ = -1;
            parser_ = std::move(other.parser_);
            message_ = std::move(other.message_);
            rng_ = other.rng_;
            open_ = other.open_;
            other.open_ = false;
        }
        return *this;
    }

    ~Client() { close(); }

    static Client connect(const std::string& host, int port, const std::string& path,
                          std::chrono::milliseconds timeout) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) raise(ErrorCode::TransportError, "socket(): " + std::string(strerror(errno)));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(static_cast<std::uint16_t>(port));
        if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd);
            raise(ErrorCode::TransportError, "not an IPv4 address: '" + host + "'");
        }
        detail::set_recv_timeout(fd, timeout);
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            int err = errno;
            ::close(fd);
            raise(ErrorCode::TransportError,
                  "connect " + host + ":" + std::to_string(port) + ": " + strerror(err));
        }
        int one = 1;
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));

        Client client(fd);
        client.handshake(host, port, path, timeout);
        return client;
    }

    bool is_open() const { return open_; }

    void send_text(std::string_view payload) {
        Frame frame{true, Opcode::Text, std::string(payload)};
        std::uint8_t mask[4];
        std::uint32_t r = static_cast<std::uint32_t>(rng_());
        std::memcpy(mask, &r, 4);
        send_raw(encode_frame(frame, mask));
    }

    /// Next complete text message, transparently answering pings. Returns
    /// nullopt when the deadline passes; throws on a closed connection.
    std::optional<std::string> receive_text(std::chrono::milliseconds timeout) {
        auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            while (auto frame = parser_.next()) {
                if (auto message = handle_frame(*frame)) return message;
                if (!open_) raise(ErrorCode::TransportError, "websocket closed by peer");
            }
            auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (remaining.count() <= 0) return std::nullopt;
            detail::set_recv_timeout(fd_, std::min(remaining, std::chrono::milliseconds(250)));
            char buf[16384];
            ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
            if (n > 0) {
                parser_.feed(buf, static_cast<std::size_t>(n));
            } else if (n == 0) {
                open_ = false;
                raise(ErrorCode::TransportError, "websocket connection closed");
            } else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
                open_ = false;
                raise(ErrorCode::TransportError, "recv(): " + std::string(strerror(errno)));
            }
        }
    }

    void close() {
        if (fd_ >= 0) {
            if (open_) {
                std::uint8_t mask[4] = {0x11, 0x22, 0x33, 0x44};
                Frame frame{true, Opcode::Close, ""};
                try {
                    send_raw(encode_frame(frame, mask));
                } catch (const Error&) {
                }
                open_ = false;
            }
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    explicit Client(int fd) : fd_(fd), rng_(std::random_device{}()) {}

    void handshake(const std::string& host, int port, const std::string& path,
                   std::chrono::milliseconds timeout) {
        std::uint8_t key_bytes[16];
        for (auto& b : key_bytes) b = static_cast<std::uint8_t>(rng_());
        std::string key = base64_encode(key_bytes, sizeof(key_bytes));
        std::string request = "GET " + path + " HTTP/1.1\r\n" +
                              "Host: " + host + ":" + std::to_string(port) + "\r\n" +
                              "Upgrade: websocket\r\n" +
                              "Connection: Upgrade\r\n" +
                              "Sec-WebSocket-Key: " + key + "\r\n" +
                              "Sec-WebSocket-Version: 13\r\n\r\n";
        send_raw(request);

        detail::set_recv_timeout(fd_, timeout);
        std::string response;
        while (response.find("\r\n\r\n") == std::string::npos) {
            char buf[4096];
            ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
            if (n <= 0) raise(ErrorCode::TransportError, "websocket handshake failed");
            response.append(buf, static_cast<std::size_t>(n));
            if (response.size() > 65536)
                raise(ErrorCode::TransportError, "oversized handshake response");
        }
        if (response.find(" 101 ") == std::string::npos)
            raise(ErrorCode::TransportError,
                  "websocket upgrade rejected: " + response.substr(0, response.find("\r\n")));
        std::string expected = websocket_accept_key(key);
        if (response.find(expected) == std::string::npos)
            raise(ErrorCode::TransportError, "websocket accept key mismatch");
        // Bytes past the header belong to the frame stream.
        auto body_start = response.find("\r\n\r\n") + 4;
        if (body_start < response.size())
            parser_.feed(response.data() + body_start, response.size() - body_start);
        open_ = true;
    }

    std::optional<std::string> handle_frame(const Frame& frame) {
        switch (frame.opcode) {
            case Opcode::Text:
            case Opcode::Binary:
            case Opcode::Continuation:
                message_ += frame.payload;
                if (frame.fin) {
                    std::string whole = std::move(message_);
                    message_.clear();
                    return whole;
                }
                return std::nullopt;
            case Opcode::Ping: {
                std::uint8_t mask[4] = {0x55, 0x66, 0x77, 0x88};
                send_raw(encode_frame({true, Opcode::Pong, frame.payload}, mask));
                return std::nullopt;
            }
            case Opcode::Pong:
                return std::nullopt;
            case Opcode::Close:
                open_ = false;
                return std::nullopt;
        }
        return std::nullopt;
    }

    void send_raw(std::string_view data) {
        std::size_t sent = 0;
        while (sent < data.size()) {
            ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                open_ = false;
                raise(ErrorCode::TransportError, "send(): " + std::string(strerror(errno)));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    int fd_ = -1;
    FrameParser parser_;
    std::string message_;
    std::mt19937_64 rng_;
    bool open_ = false;
};

}  // namespace sitelens::crawl::ws
