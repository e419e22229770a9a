#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "sitelens/core/csv.hpp"
#include "sitelens/eval/metrics.hpp"

namespace sitelens::report {

/// One scored prediction set in the cross-backend summary table.
struct SummaryRow {
    std::string label;  // e.g. "gemini/url+screenshot"
    eval::EvalReport report;
};

namespace detail {

inline std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace detail

/// Dataset x backend x prompt-mode summary matrix as CSV. Subset metrics
/// (when present) get their own columns per subset name.
inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::set<std::string> subset_names;
    for (const auto& row : rows)
        for (const auto& [name, core] : row.report.subset_reports) subset_names.insert(name);

    std::string out = "label,n,accuracy,macro_f1";
    for (const auto& name : subset_names)
        out += "," + name + ".n," + name + ".accuracy," + name + ".macro_f1";
    out += "\n";
    for (const auto& row : rows) {
        out += csv_escape(row.label) + "," + std::to_string(row.report.n) + "," +
               detail::fixed3(row.report.accuracy) + "," + detail::fixed3(row.report.macro_f1);
        for (const auto& name : subset_names) {
            auto it = row.report.subset_reports.find(name);
            if (it == row.report.subset_reports.end()) {
                out += ",,,";
            } else {
                out += "," + std::to_string(it->second.n) + "," +
                       detail::fixed3(it->second.accuracy) + "," +
                       detail::fixed3(it->second.macro_f1);
            }
        }
        out += "\n";
    }
    return out;
}

/// Plain-text rendering of the same matrix for terminals.
inline std::string summary_table(const std::vector<SummaryRow>& rows) {
    std::size_t label_w = 5;
    for (const auto& row : rows) label_w = std::max(label_w, row.label.size());
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-*s  %8s  %8s  %8s\n", static_cast<int>(label_w),
                  "label", "n", "accuracy", "macro_f1");
    out += line;
    for (const auto& row : rows) {
        std::snprintf(line, sizeof(line), "%-*s  %8zu  %8.3f  %8.3f\n",
                      static_cast<int>(label_w), row.label.c_str(), row.report.n,
                      row.report.accuracy, row.report.macro_f1);
        out += line;
        for (const auto& [name, core] : row.report.subset_reports) {
            std::snprintf(line, sizeof(line), "%-*s  %8zu  %8.3f  %8.3f\n",
                          static_cast<int>(label_w), ("  " + row.label + ":" + name).c_str(),
                          core.n, core.accuracy, core.macro_f1);
            out += line;
        }
    }
    return out;
}

}  // namespace sitelens::report
