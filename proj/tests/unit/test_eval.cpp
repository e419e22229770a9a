#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sitelens/eval/metrics.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"

using namespace sitelens;
using namespace sitelens::eval;

namespace {

ConfusionMatrix matrix_from(const testing::RawMatrix& raw) {
    std::vector<std::string> classes;
    for (std::size_t i = 0; i < raw.counts.size(); ++i) classes.push_back("c" + std::to_string(i));
    ConfusionMatrix cm(classes);
    for (std::size_t i = 0; i < raw.counts.size(); ++i) {
        for (std::size_t j = 0; j < raw.counts.size(); ++j)
            if (raw.counts[i][j] > 0) cm.add(classes[i], classes[j], raw.counts[i][j]);
        if (raw.unclassified[i] > 0) cm.add_unclassified(classes[i], raw.unclassified[i]);
    }
    return cm;
}

dataset::DatasetManifest tiny_manifest(TaskKind task,
                                       const std::vector<std::pair<std::string, std::string>>&
                                           url_labels) {
    dataset::DatasetManifest manifest;
    manifest.task = task;
    for (const auto& [url, label] : url_labels) {
        dataset::ManifestRecord mr;
        mr.record.url = url;
        mr.record.host = url;
        mr.record.registrable_domain = url;
        mr.record.labels[task] = label;
        manifest.records.push_back(std::move(mr));
    }
    return manifest;
}

}  // namespace

TEST_CASE("accuracy rules") {
    CHECK(accuracy({"A", "B"}, {{"A"}, {"B"}}, MatchRule::Exact) == 1.0);
    CHECK(accuracy({"Sport"}, {{"News", "Sport"}}, MatchRule::AnyOfK) == 1.0);
    CHECK(accuracy({"Sport"}, {{"News", "Sport"}}, MatchRule::Exact) == 0.0);
    CHECK(accuracy({"A", "B", "C"}, {{"A"}, {"B"}, {"A"}}, MatchRule::Exact) ==
          Catch::Approx(2.0 / 3.0));
    // Unclassified counts as incorrect.
    CHECK(accuracy({"A", "B"}, {{"A"}, {}}, MatchRule::AnyOfK) == 0.5);
    CHECK_THROWS_AS(accuracy({"A"}, {}, MatchRule::Exact), Error);
}

TEST_CASE("macro F1 frozen two-class example") {
    // tp1=8 fn1=2 fp1=1, tp2=9 fn2=1 fp2=2.
    ConfusionMatrix cm({"one", "two"});
    cm.add("one", "one", 8);
    cm.add("one", "two", 2);
    cm.add("two", "one", 1);
    cm.add("two", "two", 9);

    auto m1 = class_metrics(cm, 0);
    auto m2 = class_metrics(cm, 1);
    CHECK(m1.f1 == Catch::Approx(16.0 / 19.0).epsilon(1e-12));
    CHECK(m2.f1 == Catch::Approx(6.0 / 7.0).epsilon(1e-12));
    CHECK(macro_f1(cm) == Catch::Approx(113.0 / 133.0).epsilon(1e-12));
    CHECK(macro_f1(cm) == Catch::Approx(0.849624060150376).epsilon(1e-12));
}

TEST_CASE("macro F1 edge cases") {
    ConfusionMatrix diag({"a", "b", "c"});
    diag.add("a", "a", 5);
    diag.add("b", "b", 1);
    diag.add("c", "c", 7);
    CHECK(macro_f1(diag) == 1.0);

    // A class never true-present is excluded from the mean even if predicted.
    ConfusionMatrix with_ghost({"a", "b", "ghost"});
    with_ghost.add("a", "a", 5);
    with_ghost.add("b", "ghost", 1);
    with_ghost.add("b", "b", 4);
    double expected_a = 1.0;                      // p=1, r=1
    double expected_b = 2.0 * (1.0 * 0.8) / 1.8;  // p=1, r=4/5
    CHECK(macro_f1(with_ghost) == Catch::Approx((expected_a + expected_b) / 2.0).epsilon(1e-12));

    ConfusionMatrix empty({"a"});
    CHECK_THROWS_AS(macro_f1(empty), Error);
    CHECK_THROWS_AS(macro_f1(ConfusionMatrix{}), Error);
}

TEST_CASE("metrics agree with the direct-formula oracle") {
    std::mt19937_64 rng(20250406);
    for (int trial = 0; trial < 300; ++trial) {
        auto raw = testing::random_matrix(rng);
        auto cm = matrix_from(raw);
        double acc = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
        CHECK(acc == Catch::Approx(testing::oracle_accuracy(raw)).margin(1e-12));
        CHECK(macro_f1(cm) == Catch::Approx(testing::oracle_macro_f1(raw)).margin(1e-12));
    }
}

TEST_CASE("relabeling classes permutes per-class metrics only") {
    std::mt19937_64 rng(7);
    auto raw = testing::random_matrix(rng, 5, 30);
    auto cm = matrix_from(raw);

    const std::size_t k = raw.counts.size();
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = (i + 1) % k;
    testing::RawMatrix permuted;
    permuted.counts.assign(k, std::vector<std::size_t>(k, 0));
    permuted.unclassified.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        permuted.unclassified[perm[i]] = raw.unclassified[i];
        for (std::size_t j = 0; j < k; ++j) permuted.counts[perm[i]][perm[j]] = raw.counts[i][j];
    }
    auto cm2 = matrix_from(permuted);
    CHECK(macro_f1(cm) == Catch::Approx(macro_f1(cm2)).margin(1e-12));
    CHECK(cm.trace() == cm2.trace());
    CHECK(cm.total() == cm2.total());
}

TEST_CASE("evaluate over a manifest") {
    auto manifest = tiny_manifest(TaskKind::Category, {{"u1", "Arts"},
                                                       {"u2", "News"},
                                                       {"u3", "News"},
                                                       {"u4", "Sports"}});
    PredictionMap predictions{
        {"u1", {"Arts", "Business"}},   // exact hit
        {"u2", {"Sports", "News"}},     // rescued by second choice
        {"u3", {"Arts", "Business"}},   // miss; first prediction is the predicted class
                                        // u4 unclassified
    };

    auto exact = evaluate(manifest, predictions, MatchRule::Exact);
    CHECK(exact.n == 4);
    CHECK(exact.accuracy == Catch::Approx(0.25));

    auto any2 = evaluate(manifest, predictions, MatchRule::AnyOfK);
    CHECK(any2.accuracy == Catch::Approx(0.5));
    CHECK(any2.accuracy >= exact.accuracy);
    // Credited cell is (truth, truth): trace/total equals the accuracy.
    CHECK(any2.confusion.trace() == 2);
    CHECK(any2.confusion.count(any2.confusion.index_of("News"),
                               any2.confusion.index_of("Arts")) == 1);
    CHECK(any2.confusion.unclassified(any2.confusion.index_of("Sports")) == 1);
    CHECK(any2.per_class.count("Sports") == 1);

    auto j = report_to_json(any2);
    CHECK(j["n"] == 4);
    CHECK(j["per_class"].contains("News"));

    auto csv = any2.confusion.to_csv();
    CHECK(csv.find("truth,") == 0);
    CHECK(csv.find("unclassified") != std::string::npos);
}

TEST_CASE("evaluate subsets") {
    auto manifest = tiny_manifest(TaskKind::Country, {{"u1", "DE"},
                                                      {"u2", "DE"},
                                                      {"u3", "US"},
                                                      {"u4", "US"}});
    manifest.records[2].generic_tld = true;
    manifest.records[3].generic_tld = true;
    PredictionMap predictions{
        {"u1", {"DE"}}, {"u2", {"DE"}}, {"u3", {"US"}}, {"u4", {"DE"}}};

    auto report = evaluate(manifest, predictions, MatchRule::Exact,
                           {builtin_subset_filter("generic_tld")});
    CHECK(report.accuracy == Catch::Approx(0.75));
    REQUIRE(report.subset_reports.count("generic_tld") == 1);
    const auto& sub = report.subset_reports.at("generic_tld");
    CHECK(sub.n == 2);
    CHECK(sub.accuracy == Catch::Approx(0.5));

    CHECK_THROWS_AS(builtin_subset_filter("nope"), Error);
    SubsetFilter empty{"none", [](const dataset::ManifestRecord&) { return false; }};
    CHECK_THROWS_AS(evaluate(manifest, predictions, MatchRule::Exact, {empty}), Error);
}

TEST_CASE("planted corruption: 10 wrong out of 100 scores 0.90 exactly") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; i < 100; ++i)
        rows.emplace_back("u" + std::to_string(i), i % 2 ? "DE" : "FR");
    auto manifest = tiny_manifest(TaskKind::Country, rows);
    PredictionMap predictions;
    for (int i = 0; i < 100; ++i) {
        const auto& truth = rows[static_cast<std::size_t>(i)].second;
        // Corrupt every 10th record to a different valid label.
        predictions[rows[static_cast<std::size_t>(i)].first] = {
            i % 10 == 0 ? (truth == "DE" ? "IT" : "DE") : truth};
    }
    auto report = evaluate(manifest, predictions, MatchRule::Exact);
    CHECK(report.accuracy == 0.90);
    CHECK(report.n == 100);
}

TEST_CASE("any-of-2 accuracy dominates exact accuracy") {
    std::mt19937_64 rng(99);
    std::vector<std::string> vocab = {"A", "B", "C", "D"};
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
        std::vector<std::string> truth;
        std::vector<std::vector<std::string>> preds;
        std::size_t rescues = 0;
        for (int i = 0; i < 50; ++i) {
            truth.push_back(vocab[pick(rng)]);
            std::vector<std::string> p{vocab[pick(rng)], vocab[pick(rng)]};
            if (p[0] != truth.back() && p[1] == truth.back()) ++rescues;
            preds.push_back(std::move(p));
        }
        double exact = accuracy(truth, preds, MatchRule::Exact);
        double any2 = accuracy(truth, preds, MatchRule::AnyOfK);
        CHECK(any2 >= exact);
        CHECK((any2 == exact) == (rescues == 0));
        CHECK(any2 - exact == Catch::Approx(static_cast<double>(rescues) / 50.0).margin(1e-12));
    }
}

TEST_CASE("emitted metrics stay within bounds") {
    std::mt19937_64 rng(515);
    for (int trial = 0; trial < 100; ++trial) {
        auto raw = testing::random_matrix(rng);
        auto cm = matrix_from(raw);
        double f1 = macro_f1(cm);
        CHECK(f1 >= 0.0);
        CHECK(f1 <= 1.0);
        for (std::size_t i = 0; i < cm.size(); ++i) {
            auto m = class_metrics(cm, i);
            CHECK(m.precision >= 0.0);
            CHECK(m.precision <= 1.0);
            CHECK(m.recall >= 0.0);
            CHECK(m.recall <= 1.0);
            CHECK(m.f1 >= 0.0);
            CHECK(m.f1 <= 1.0);
        }
    }
}
