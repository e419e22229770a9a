#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <string>

namespace sitelens {

/// "2025-04-06T12:34:56Z" style UTC timestamp.
inline std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
    std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

inline std::string now_iso8601_utc() { return iso8601_utc(std::chrono::system_clock::now()); }

}  // namespace sitelens
