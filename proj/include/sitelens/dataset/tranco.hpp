#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "sitelens/core/csv.hpp"
#include "sitelens/core/error.hpp"
#include "sitelens/core/strings.hpp"

namespace sitelens::dataset {

struct TrancoEntry {
    std::uint32_t rank = 0;
    std::string domain;

    bool operator==(const TrancoEntry&) const = default;
};

/// Reads a Tranco CSV ("rank,domain" per line). Entries come back in file
/// order; ranks must be strictly increasing.
inline std::vector<TrancoEntry> load_tranco(std::istream& in) {
    std::vector<TrancoEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t prev_rank = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = csv_split(line);
        if (fields.size() != 2)
            raise(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected 'rank,domain'");
        std::uint64_t rank = 0;
        try {
            std::size_t used = 0;
            rank = std::stoull(fields[0], &used);
            if (used != fields[0].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            raise(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": bad rank '" + fields[0] + "'");
        }
        if (rank == 0 || rank > std::numeric_limits<std::uint32_t>::max())
            raise(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": rank out of range");
        if (rank <= prev_rank)
            raise(ErrorCode::NonMonotonicRank,
                  "line " + std::to_string(line_no) + ": rank " + std::to_string(rank) +
                      " not greater than " + std::to_string(prev_rank));
        std::string domain = to_lower(trim(fields[1]));
        if (domain.empty())
            raise(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty domain");
        entries.push_back({static_cast<std::uint32_t>(rank), std::move(domain)});
        prev_rank = rank;
    }
    return entries;
}

inline std::vector<TrancoEntry> load_tranco(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open Tranco list '" + path + "'");
    return load_tranco(in);
}

}  // namespace sitelens::dataset
