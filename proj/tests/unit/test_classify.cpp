#include <catch2/catch_amalgamated.hpp>

#include "sitelens/llm/mock_backend.hpp"
#include "sitelens/prompt/classify.hpp"
#include "support/paths.hpp"

using namespace sitelens;
using namespace sitelens::prompt;

namespace {

/// Scripted-failure backend for exercising retry/split paths.
class FlakyBackend : public llm::Backend {
public:
    using Responder = std::function<std::string(const llm::CompletionRequest&, std::size_t)>;

    explicit FlakyBackend(Responder responder) : responder_(std::move(responder)) {
        config_.name = "flaky";
        config_.endpoint_url = "http://flaky.invalid";
        config_.model_id = "flaky";
        config_.max_concurrent = 1;
    }

    const llm::BackendConfig& config() const override { return config_; }

    llm::CompletionResult complete(const llm::CompletionRequest& request) override {
        llm::CompletionResult result;
        result.text = responder_(request, calls_++);
        return result;
    }

    std::size_t calls() const { return calls_; }

private:
    Responder responder_;
    llm::BackendConfig config_;
    std::size_t calls_ = 0;
};

dataset::DatasetManifest planted_manifest(TaskKind task, std::size_t n) {
    dataset::DatasetManifest manifest;
    manifest.task = task;
    for (std::size_t i = 0; i < n; ++i) {
        dataset::ManifestRecord mr;
        mr.record.url = "https://site" + std::to_string(i) + ".example";
        mr.record.host = "site" + std::to_string(i) + ".example";
        mr.record.registrable_domain = mr.record.host;
        mr.record.labels[task] = (i % 2 == 0) ? "gov" : "non-gov";
        manifest.records.push_back(std::move(mr));
    }
    return manifest;
}

std::map<std::string, std::string> truth_of(const dataset::DatasetManifest& manifest) {
    std::map<std::string, std::string> truth;
    for (const auto& mr : manifest.records)
        truth[mr.record.url] = mr.record.labels.at(manifest.task);
    return truth;
}

}  // namespace

TEST_CASE("classify batches and persists predictions") {
    auto manifest = planted_manifest(TaskKind::Governmental, 10);
    auto tmpl = governmental_template(false);
    llm::MockBackend backend(tmpl, truth_of(manifest), 0.0, 7);

    testing::TempDir tmp;
    PredictionStore store((tmp / "pred.jsonl").string());
    auto outcome = classify(manifest, tmpl, backend, {.batch_size = 4}, store);

    CHECK(outcome.classified == 10);
    CHECK(outcome.unclassified == 0);
    CHECK(outcome.requests == 3);  // batches of 4, 4, 2
    CHECK(outcome.skipped == 0);

    auto predictions = store.predictions();
    CHECK(predictions.size() == 10);
    for (const auto& mr : manifest.records)
        CHECK(predictions.at(mr.record.url).front() ==
              mr.record.labels.at(TaskKind::Governmental));

    // Rerun resumes: nothing new to do.
    PredictionStore reopened((tmp / "pred.jsonl").string());
    auto second = classify(manifest, tmpl, backend, {.batch_size = 4}, reopened);
    CHECK(second.skipped == 10);
    CHECK(second.requests == 0);
    CHECK(second.classified == 10);
}

TEST_CASE("classify retries a batch on parse failure") {
    auto manifest = planted_manifest(TaskKind::Governmental, 10);
    auto tmpl = governmental_template(false);
    auto truth = truth_of(manifest);
    llm::MockBackend oracle(tmpl, truth, 0.0, 7);

    std::size_t failures_left = 1;
    FlakyBackend backend([&](const llm::CompletionRequest& req, std::size_t) -> std::string {
        if (failures_left > 0) {
            --failures_left;
            return "garbage that is not json";
        }
        return oracle.complete(req).text;
    });

    testing::TempDir tmp;
    PredictionStore store((tmp / "pred.jsonl").string());
    auto outcome = classify(manifest, tmpl, backend, {.batch_size = 4}, store);
    CHECK(outcome.classified == 10);
    CHECK(outcome.unclassified == 0);
    CHECK(outcome.requests == 4);  // one failed attempt + 3 clean batches
}

TEST_CASE("classify splits failing batches and records exhausted singletons") {
    auto manifest = planted_manifest(TaskKind::Governmental, 4);
    auto tmpl = governmental_template(false);
    auto truth = truth_of(manifest);
    llm::MockBackend oracle(tmpl, truth, 0.0, 7);

    // One URL is poison: any batch containing it yields malformed output.
    const std::string poison = "https://site2.example";
    FlakyBackend backend([&](const llm::CompletionRequest& req, std::size_t) -> std::string {
        if (req.text.find(poison) != std::string::npos) return "{broken";
        return oracle.complete(req).text;
    });

    testing::TempDir tmp;
    PredictionStore store((tmp / "pred.jsonl").string());
    auto outcome = classify(manifest, tmpl, backend, {.batch_size = 4, .parse_retries = 1}, store);

    CHECK(outcome.classified == 3);
    CHECK(outcome.unclassified == 1);
    CHECK(store.predictions().count(poison) == 0);
    CHECK(store.contains(poison));

    // Coverage: classified + unclassified equals the manifest size.
    CHECK(outcome.classified + outcome.unclassified == manifest.records.size());
}

TEST_CASE("classify marks everything unclassified when batches never parse") {
    auto manifest = planted_manifest(TaskKind::Governmental, 3);
    auto tmpl = governmental_template(false);
    FlakyBackend backend(
        [](const llm::CompletionRequest&, std::size_t) { return std::string("nope"); });

    testing::TempDir tmp;
    PredictionStore store((tmp / "pred.jsonl").string());
    auto outcome = classify(manifest, tmpl, backend, {.batch_size = 1, .parse_retries = 2}, store);
    CHECK(outcome.classified == 0);
    CHECK(outcome.unclassified == 3);
    CHECK(outcome.requests == 9);  // 3 records x (1 + 2 retries)
}

TEST_CASE("classify with screenshots pulls images through the source") {
    auto manifest = planted_manifest(TaskKind::Governmental, 3);
    auto tmpl = governmental_template(true);
    llm::MockBackend backend(tmpl, truth_of(manifest), 0.0, 7);

    std::size_t supplied = 0;
    ScreenshotSource source = [&](const WebsiteRecord&) {
        ++supplied;
        return std::vector<std::uint8_t>{0x89, 'P', 'N', 'G'};
    };

    testing::TempDir tmp;
    PredictionStore store((tmp / "pred.jsonl").string());
    auto outcome = classify(manifest, tmpl, backend, {.batch_size = 2}, store, source);
    CHECK(outcome.classified == 3);
    CHECK(supplied == 3);

    PredictionStore fresh((tmp / "fresh.jsonl").string());
    CHECK_THROWS_AS(classify(manifest, tmpl, backend, {.batch_size = 2}, fresh), Error);
}

TEST_CASE("prediction store round trips and finalizes deterministically") {
    testing::TempDir tmp;
    auto path = (tmp / "store.jsonl").string();
    {
        PredictionStore store(path);
        store.append_prediction("https://b.example", TaskKind::Country, {"DE"}, "d1", "mock",
                                "t1");
        store.append_unclassified("https://a.example", TaskKind::Country, "gave up", "mock",
                                  "t1");
        CHECK(store.contains("https://a.example"));
        CHECK(store.size() == 2);
        CHECK(store.unclassified_count() == 1);
        store.finalize({"https://a.example", "https://b.example"});
    }
    std::ifstream in(path);
    std::string first_line;
    std::getline(in, first_line);
    CHECK(first_line.find("https://a.example") != std::string::npos);

    PredictionStore reopened(path);
    CHECK(reopened.size() == 2);
    CHECK(reopened.predictions().size() == 1);
    CHECK(reopened.predictions().at("https://b.example") == std::vector<std::string>{"DE"});
}

TEST_CASE("classify end to end with planted corruption equals the seeded count") {
    auto manifest = planted_manifest(TaskKind::Governmental, 200);
    auto tmpl = governmental_template(false);
    auto truth = truth_of(manifest);
    llm::MockBackend backend(tmpl, truth, 0.15, 1234);

    testing::TempDir tmp;
    PredictionStore store((tmp / "pred.jsonl").string());
    auto outcome = classify(manifest, tmpl, backend, {.batch_size = 10}, store);
    CHECK(outcome.classified == 200);

    auto report = eval::evaluate(manifest, store.predictions(), eval::MatchRule::Exact);
    auto corrupted = backend.corrupted_urls();
    double expected_accuracy =
        static_cast<double>(200 - corrupted.size()) / static_cast<double>(200);
    CHECK(report.accuracy == expected_accuracy);

    // Vocabulary closure: even corrupted predictions stay in the vocabulary.
    for (const auto& [url, labels] : store.predictions())
        for (const auto& label : labels)
            CHECK(is_valid_label(TaskKind::Governmental, label));
}
