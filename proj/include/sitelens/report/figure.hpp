#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sitelens/core/csv.hpp"
#include "sitelens/core/error.hpp"

namespace sitelens::report {

/// A grouped-bar figure: named series over a shared category axis. Output is
/// a self-contained SVG plus a CSV sidecar holding exactly the plotted
/// numbers; plotting the sidecar again reproduces the SVG byte for byte.
struct FigureSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> categories;
    std::vector<std::pair<std::string, std::vector<double>>> series;

    void validate() const {
        if (categories.empty() || series.empty())
            raise(ErrorCode::MismatchedSeries, "figure needs categories and at least one series");
        for (const auto& [name, values] : series)
            if (values.size() != categories.size())
                raise(ErrorCode::MismatchedSeries,
                      "series '" + name + "' has " + std::to_string(values.size()) +
                          " values for " + std::to_string(categories.size()) + " categories");
    }
};

/// Builds a spec from per-series category->value maps; all series must share
/// one key set. Categories are emitted in sorted order.
inline FigureSpec make_figure(std::string title, std::string x_label, std::string y_label,
                              const std::vector<std::pair<std::string,
                                                          std::map<std::string, double>>>& data) {
    if (data.empty()) raise(ErrorCode::MismatchedSeries, "no series given");
    FigureSpec spec;
    spec.title = std::move(title);
    spec.x_label = std::move(x_label);
    spec.y_label = std::move(y_label);
    for (const auto& [category, value] : data.front().second)
        spec.categories.push_back(category);
    for (const auto& [name, values] : data) {
        std::vector<double> aligned;
        if (values.size() != spec.categories.size())
            raise(ErrorCode::MismatchedSeries, "series '" + name + "' keys differ");
        for (const auto& category : spec.categories) {
            auto it = values.find(category);
            if (it == values.end())
                raise(ErrorCode::MismatchedSeries,
                      "series '" + name + "' lacks category '" + category + "'");
            aligned.push_back(it->second);
        }
        spec.series.emplace_back(name, std::move(aligned));
    }
    return spec;
}

namespace detail {

inline std::string shortest(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "0";
    return std::string(buf, ptr);
}

inline std::string coord(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

inline std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Smallest 1/2/5 x 10^k value >= max, for a stable y axis.
inline double nice_ceiling(double max_value) {
    if (max_value <= 0.0) return 1.0;
    double magnitude = std::pow(10.0, std::floor(std::log10(max_value)));
    for (double step : {1.0, 2.0, 5.0, 10.0}) {
        if (max_value <= step * magnitude) return step * magnitude;
    }
    return 10.0 * magnitude;
}

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {
        "#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
        "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    };
    return colors;
}

}  // namespace detail

inline std::string render_svg(const FigureSpec& spec) {
    spec.validate();
    const std::size_t n_categories = spec.categories.size();
    const std::size_t n_series = spec.series.size();

    const double bar_w = 26.0;
    const double group_gap = 22.0;
    const double group_w = bar_w * static_cast<double>(n_series) + group_gap;
    const double margin_left = 70.0, margin_top = 46.0, margin_bottom = 78.0,
                 margin_right = 30.0;
    const double plot_w = group_w * static_cast<double>(n_categories);
    const double plot_h = 300.0;
    const double width = margin_left + plot_w + margin_right;
    const double height = margin_top + plot_h + margin_bottom;

    double max_value = 0.0;
    for (const auto& [name, values] : spec.series)
        for (double v : values) max_value = std::max(max_value, v);
    const double y_max = detail::nice_ceiling(max_value);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::coord(width)
        << "\" height=\"" << detail::coord(height) << "\" viewBox=\"0 0 "
        << detail::coord(width) << " " << detail::coord(height) << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << detail::coord(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">"
        << detail::xml_escape(spec.title) << "</text>\n";

    // Axes and horizontal grid lines with tick labels.
    const int ticks = 5;
    for (int t = 0; t <= ticks; ++t) {
        double frac = static_cast<double>(t) / ticks;
        double y = margin_top + plot_h * (1.0 - frac);
        svg << "<line x1=\"" << detail::coord(margin_left) << "\" y1=\"" << detail::coord(y)
            << "\" x2=\"" << detail::coord(margin_left + plot_w) << "\" y2=\""
            << detail::coord(y) << "\" stroke=\"" << (t == 0 ? "#333333" : "#dddddd")
            << "\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << detail::coord(margin_left - 8) << "\" y=\""
            << detail::coord(y + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << detail::shortest(y_max * frac) << "</text>\n";
    }

    // Bars.
    for (std::size_t c = 0; c < n_categories; ++c) {
        for (std::size_t s = 0; s < n_series; ++s) {
            double value = spec.series[s].second[c];
            double h = y_max > 0 ? (value / y_max) * plot_h : 0.0;
            double x = margin_left + group_w * static_cast<double>(c) + group_gap / 2 +
                       bar_w * static_cast<double>(s);
            double y = margin_top + plot_h - h;
            svg << "<rect x=\"" << detail::coord(x) << "\" y=\"" << detail::coord(y)
                << "\" width=\"" << detail::coord(bar_w - 2) << "\" height=\""
                << detail::coord(h) << "\" fill=\""
                << detail::palette()[s % detail::palette().size()] << "\"><title>"
                << detail::xml_escape(spec.series[s].first) << " / "
                << detail::xml_escape(spec.categories[c]) << ": " << detail::shortest(value)
                << "</title></rect>\n";
        }
        double cx = margin_left + group_w * (static_cast<double>(c) + 0.5);
        svg << "<text x=\"" << detail::coord(cx) << "\" y=\""
            << detail::coord(margin_top + plot_h + 16) << "\" text-anchor=\"end\" "
               "font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-35 "
            << detail::coord(cx) << " " << detail::coord(margin_top + plot_h + 16) << ")\">"
            << detail::xml_escape(spec.categories[c]) << "</text>\n";
    }

    // Axis labels.
    svg << "<text x=\"" << detail::coord(margin_left + plot_w / 2) << "\" y=\""
        << detail::coord(height - 12) << "\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"12\">"
        << detail::xml_escape(spec.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << detail::coord(margin_top + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 "
        << detail::coord(margin_top + plot_h / 2) << ")\">" << detail::xml_escape(spec.y_label)
        << "</text>\n";

    // Legend.
    for (std::size_t s = 0; s < n_series; ++s) {
        double lx = margin_left + 10 + 150.0 * static_cast<double>(s);
        svg << "<rect x=\"" << detail::coord(lx) << "\" y=\"30\" width=\"12\" height=\"12\" "
               "fill=\""
            << detail::palette()[s % detail::palette().size()] << "\"/>\n";
        svg << "<text x=\"" << detail::coord(lx + 16) << "\" y=\"40\" "
               "font-family=\"sans-serif\" font-size=\"11\">"
            << detail::xml_escape(spec.series[s].first) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

/// "category,series,value" rows in plot order; exactly the plotted numbers.
inline std::string sidecar_csv(const FigureSpec& spec) {
    spec.validate();
    std::string out = "category,series,value\n";
    for (std::size_t c = 0; c < spec.categories.size(); ++c)
        for (const auto& [name, values] : spec.series)
            out += csv_escape(spec.categories[c]) + "," + csv_escape(name) + "," +
                   detail::shortest(values[c]) + "\n";
    return out;
}

/// Rebuilds a FigureSpec from a sidecar; category and series order follow
/// first appearance, so re-plotting reproduces the original SVG exactly.
inline FigureSpec figure_from_csv(std::istream& in, std::string title, std::string x_label,
                                  std::string y_label) {
    FigureSpec spec;
    spec.title = std::move(title);
    spec.x_label = std::move(x_label);
    spec.y_label = std::move(y_label);

    std::map<std::string, std::size_t> category_index;
    std::map<std::string, std::size_t> series_index;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::vector<std::tuple<std::size_t, std::size_t, double>> cells;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        auto fields = csv_split(line);
        if (fields.size() != 3)
            raise(ErrorCode::ParseError,
                  "figure csv line " + std::to_string(line_no) + ": expected 3 fields");
        double value = 0;
        auto [ptr, ec] =
            std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), value);
        if (ec != std::errc{} || ptr != fields[2].data() + fields[2].size())
            raise(ErrorCode::ParseError,
                  "figure csv line " + std::to_string(line_no) + ": bad value");
        if (!category_index.count(fields[0])) {
            category_index[fields[0]] = spec.categories.size();
            spec.categories.push_back(fields[0]);
        }
        if (!series_index.count(fields[1])) {
            series_index[fields[1]] = spec.series.size();
            spec.series.emplace_back(fields[1], std::vector<double>{});
        }
        cells.emplace_back(series_index[fields[1]], category_index[fields[0]], value);
    }
    for (auto& [name, values] : spec.series)
        values.assign(spec.categories.size(), 0.0);
    for (const auto& [s, c, value] : cells) spec.series[s].second[c] = value;
    spec.validate();
    return spec;
}

/// Writes figure.svg and its CSV sidecar; byte-deterministic.
inline void emit_grouped_bar(const FigureSpec& spec, const std::string& svg_path,
                             const std::string& csv_path) {
    spec.validate();
    std::ofstream svg(svg_path, std::ios::binary | std::ios::trunc);
    if (!svg) raise(ErrorCode::IoError, "cannot write '" + svg_path + "'");
    svg << render_svg(spec);
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) raise(ErrorCode::IoError, "cannot write '" + csv_path + "'");
    csv << sidecar_csv(spec);
}

}  // namespace sitelens::report
