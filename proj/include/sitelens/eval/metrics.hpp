#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sitelens/dataset/manifest.hpp"
#include "sitelens/eval/confusion.hpp"

namespace sitelens::eval {

/// Exact: the first prediction must equal the truth. AnyOfK: any entry of
/// the prediction list may match (the two-best-categories rule).
enum class MatchRule { Exact, AnyOfK };

inline MatchRule match_rule_from_name(std::string_view name) {
    if (name == "exact") return MatchRule::Exact;
    if (name == "any-of-k" || name == "any-of-2") return MatchRule::AnyOfK;
    raise(ErrorCode::ConfigError, "unknown match rule '" + std::string(name) + "'");
}

inline bool prediction_matches(const std::string& truth, const std::vector<std::string>& predicted,
                               MatchRule rule) {
    if (predicted.empty()) return false;  // unclassified counts as incorrect
    if (rule == MatchRule::Exact) return predicted.front() == truth;
    for (const auto& p : predicted)
        if (p == truth) return true;
    return false;
}

/// Fraction of aligned records whose prediction matches the truth.
inline double accuracy(const std::vector<std::string>& truth,
                       const std::vector<std::vector<std::string>>& predicted, MatchRule rule) {
    if (truth.size() != predicted.size())
        raise(ErrorCode::MisalignedInput,
              "truth has " + std::to_string(truth.size()) + " records, predictions " +
                  std::to_string(predicted.size()));
    if (truth.empty()) raise(ErrorCode::MisalignedInput, "no records to score");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (prediction_matches(truth[i], predicted[i], rule)) ++correct;
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Per-class precision/recall/F1 from the matrix. Unclassified records count
/// toward the true class's support (false negatives).
inline ClassMetrics class_metrics(const ConfusionMatrix& cm, std::size_t cls) {
    const double tp = static_cast<double>(cm.count(cls, cls));
    const double fp = static_cast<double>(cm.col_total(cls)) - tp;
    const double fn = static_cast<double>(cm.row_total(cls)) - tp;
    ClassMetrics m;
    m.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    m.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

/// Unweighted mean of per-class F1 over classes with truth support.
inline double macro_f1(const ConfusionMatrix& cm) {
    if (cm.size() == 0 || cm.total() == 0)
        raise(ErrorCode::EmptyMatrix, "confusion matrix has no scored records");
    double sum = 0.0;
    std::size_t supported = 0;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        if (cm.row_total(i) == 0) continue;  // never appears in truth
        sum += class_metrics(cm, i).f1;
        ++supported;
    }
    if (supported == 0) raise(ErrorCode::EmptyMatrix, "no class has truth support");
    return sum / static_cast<double>(supported);
}

struct EvalCore {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::size_t n = 0;
    std::map<std::string, ClassMetrics> per_class;
    ConfusionMatrix confusion;
};

struct EvalReport : EvalCore {
    std::map<std::string, EvalCore> subset_reports;
};

using PredictionMap = std::map<std::string, std::vector<std::string>>;

struct SubsetFilter {
    std::string name;
    std::function<bool(const dataset::ManifestRecord&)> keep;
};

/// Resolves a named record filter; "generic_tld" is built in.
inline SubsetFilter builtin_subset_filter(const std::string& name) {
    if (name == "generic_tld")
        return {name, [](const dataset::ManifestRecord& mr) { return mr.generic_tld; }};
    raise(ErrorCode::UnknownSubset, "unknown subset '" + name + "'");
}

namespace detail {

/// Scores one slice of the manifest. Under AnyOfK a match is credited to the
/// (truth, truth) cell so that trace/total equals the any-of-k accuracy;
/// a miss counts the first prediction as the predicted class.
inline EvalCore score(const std::vector<const dataset::ManifestRecord*>& records, TaskKind task,
                      const PredictionMap& predictions, MatchRule rule) {
    std::set<std::string> class_set;
    for (const auto* mr : records) class_set.insert(mr->record.labels.at(task));
    for (const auto* mr : records) {
        auto it = predictions.find(mr->record.url);
        if (it == predictions.end() || it->second.empty()) continue;
        if (prediction_matches(mr->record.labels.at(task), it->second, rule)) continue;
        class_set.insert(it->second.front());
    }

    EvalCore core;
    core.confusion = ConfusionMatrix({class_set.begin(), class_set.end()});
    for (const auto* mr : records) {
        const auto& truth = mr->record.labels.at(task);
        auto it = predictions.find(mr->record.url);
        if (it == predictions.end() || it->second.empty()) {
            core.confusion.add_unclassified(truth);
        } else if (prediction_matches(truth, it->second, rule)) {
            core.confusion.add(truth, truth);
        } else {
            core.confusion.add(truth, it->second.front());
        }
    }
    core.n = core.confusion.total();
    core.accuracy =
        static_cast<double>(core.confusion.trace()) / static_cast<double>(core.n);
    core.macro_f1 = eval::macro_f1(core.confusion);
    for (std::size_t i = 0; i < core.confusion.size(); ++i)
        if (core.confusion.row_total(i) > 0)
            core.per_class[core.confusion.classes()[i]] = class_metrics(core.confusion, i);
    return core;
}

}  // namespace detail

/// Scores predictions against a manifest; records without predictions count
/// as errors. Each named subset is re-scored over its filtered records.
inline EvalReport evaluate(const dataset::DatasetManifest& manifest,
                           const PredictionMap& predictions, MatchRule rule,
                           const std::vector<SubsetFilter>& subsets = {}) {
    if (manifest.records.empty()) raise(ErrorCode::MisalignedInput, "manifest has no records");
    std::vector<const dataset::ManifestRecord*> all;
    all.reserve(manifest.records.size());
    for (const auto& mr : manifest.records) all.push_back(&mr);

    EvalReport report;
    static_cast<EvalCore&>(report) = detail::score(all, manifest.task, predictions, rule);
    for (const auto& subset : subsets) {
        std::vector<const dataset::ManifestRecord*> slice;
        for (const auto* mr : all)
            if (subset.keep(*mr)) slice.push_back(mr);
        if (slice.empty())
            raise(ErrorCode::EmptySelection, "subset '" + subset.name + "' selects no records");
        report.subset_reports[subset.name] =
            detail::score(slice, manifest.task, predictions, rule);
    }
    return report;
}

inline nlohmann::json eval_core_to_json(const EvalCore& core) {
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& [cls, m] : core.per_class)
        per_class[cls] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
    return {{"accuracy", core.accuracy},
            {"macro_f1", core.macro_f1},
            {"n", core.n},
            {"per_class", per_class}};
}

inline nlohmann::json report_to_json(const EvalReport& report) {
    auto j = eval_core_to_json(report);
    if (!report.subset_reports.empty()) {
        nlohmann::json subsets = nlohmann::json::object();
        for (const auto& [name, core] : report.subset_reports)
            subsets[name] = eval_core_to_json(core);
        j["subsets"] = subsets;
    }
    return j;
}

}  // namespace sitelens::eval
