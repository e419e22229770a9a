#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "sitelens/core/csv.hpp"
#include "sitelens/core/error.hpp"

namespace sitelens::eval {

/// Square confusion matrix over an ordered class list. Rows are true
/// classes, columns predicted classes. Records with no usable prediction
/// are tallied per true class in an "unclassified" overflow column.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;

    explicit ConfusionMatrix(std::vector<std::string> classes) : classes_(std::move(classes)) {
        counts_.assign(classes_.size(), std::vector<std::size_t>(classes_.size(), 0));
        unclassified_.assign(classes_.size(), 0);
        for (std::size_t i = 0; i < classes_.size(); ++i) index_[classes_[i]] = i;
    }

    const std::vector<std::string>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }

    std::size_t index_of(const std::string& cls) const {
        auto it = index_.find(cls);
        if (it == index_.end())
            raise(ErrorCode::MisalignedInput, "class '" + cls + "' not in matrix");
        return it->second;
    }

    void add(const std::string& truth, const std::string& predicted, std::size_t n = 1) {
        counts_[index_of(truth)][index_of(predicted)] += n;
    }

    void add_unclassified(const std::string& truth, std::size_t n = 1) {
        unclassified_[index_of(truth)] += n;
    }

    std::size_t count(std::size_t row, std::size_t col) const { return counts_[row][col]; }
    std::size_t unclassified(std::size_t row) const { return unclassified_[row]; }

    std::size_t row_total(std::size_t row) const {
        std::size_t sum = unclassified_[row];
        for (auto c : counts_[row]) sum += c;
        return sum;
    }

    std::size_t col_total(std::size_t col) const {
        std::size_t sum = 0;
        for (const auto& row : counts_) sum += row[col];
        return sum;
    }

    std::size_t trace() const {
        std::size_t sum = 0;
        for (std::size_t i = 0; i < size(); ++i) sum += counts_[i][i];
        return sum;
    }

    std::size_t total() const {
        std::size_t sum = 0;
        for (std::size_t i = 0; i < size(); ++i) sum += row_total(i);
        return sum;
    }

    /// "truth,<classes...>,unclassified" header then one row per true class.
    std::string to_csv() const {
        std::string out = "truth";
        for (const auto& c : classes_) out += "," + csv_escape(c);
        out += ",unclassified\n";
        for (std::size_t i = 0; i < size(); ++i) {
            out += csv_escape(classes_[i]);
            for (std::size_t j = 0; j < size(); ++j) out += "," + std::to_string(counts_[i][j]);
            out += "," + std::to_string(unclassified_[i]) + "\n";
        }
        return out;
    }

private:
    std::vector<std::string> classes_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> counts_;
    std::vector<std::size_t> unclassified_;
};

}  // namespace sitelens::eval
