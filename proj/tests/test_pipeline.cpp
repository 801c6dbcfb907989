#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "i2i/pipeline.hpp"

using namespace i2i;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_events(const fs::path& dir, std::uint64_t seed) {
    const auto data = testutil::clustered_interactions(3, 10, 120, 7, 0.1, seed);
    const auto path = dir / "events.tsv";
    std::ofstream out(path);
    out << testutil::events_text(data);
    return path;
}

fs::path write_content(const fs::path& dir, std::size_t items) {
    // Tokens shared inside blocks of ten items.
    const auto path = dir / "content.tsv";
    std::ofstream out(path);
    for (std::size_t i = 0; i < items; ++i) {
        out << 'i' << i << "\tblock:" << i / 10 << '\n';
        out << 'i' << i << "\tparity:" << i % 2 << '\n';
    }
    return path;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("prepare, train and evaluate run end to end") {
    TempDir dir("i2i_pipeline_e2e");
    const auto events = write_events(dir.path, 61);
    const auto content = write_content(dir.path, 30);

    PrepareOptions prepare;
    prepare.events_path = events;
    prepare.content_path = content;
    prepare.out_dir = dir.path / "stores";
    prepare.split_ratio = 0.8;
    prepare.seed = 13;
    const auto summary = run_prepare(prepare);
    CHECK(summary.items == 30);
    CHECK(summary.users == 120);
    CHECK(summary.training_pairs > 0);
    CHECK(summary.testing_pairs > 0);

    TrainOptions train;
    train.stores_dir = prepare.out_dir;
    train.modalities = {parse_modality_spec("jaccard:8"), parse_modality_spec("content:4")};
    train.seed = 13;
    const auto trained = run_train(train);
    CHECK(trained.fitted.size() == 2);

    EvaluateRunOptions eval;
    eval.stores_dir = prepare.out_dir;
    eval.out_dir = dir.path / "reports";
    eval.rankers = {"jaccard", "fd-jaccard", "fc-jaccard", "fd+fc-jaccard", "fd-multi", "oracle"};
    eval.eval.candidate_samples = 15;
    eval.eval.seed = 13;
    eval.eval.bucket_edges = {0, 10};
    eval.filter_percentiles = {50};
    eval.dump_events = true;
    const auto result = run_evaluate(eval);
    REQUIRE(result.reports.size() == 6);
    for (const auto& report : result.reports) {
        CHECK(report.overall.events == summary.testing_pairs);
        CHECK(report.overall.mpr >= 0.0);
        CHECK(report.overall.mpr <= 1.0);
    }
    // Oracle is last and perfect.
    CHECK(result.reports.back().overall.recall == 1.0);

    for (const auto& path : result.csv_paths) CHECK(fs::exists(path));
    CHECK(fs::exists(eval.out_dir / "run_config.txt"));
    // Per-event dump: one header plus one line per test event.
    std::ifstream events_csv(eval.out_dir / "events_jaccard.csv");
    REQUIRE(events_csv.good());
    std::size_t lines = 0;
    for (std::string line; std::getline(events_csv, line);) ++lines;
    CHECK(lines == summary.testing_pairs + 1);
}

TEST_CASE("identically seeded runs produce identical files") {
    TempDir dir("i2i_pipeline_det");
    const auto events = write_events(dir.path, 62);

    auto run_once = [&](const fs::path& out) {
        PrepareOptions prepare;
        prepare.events_path = events;
        prepare.out_dir = out / "stores";
        prepare.seed = 99;
        run_prepare(prepare);
        TrainOptions train;
        train.stores_dir = prepare.out_dir;
        train.modalities = {parse_modality_spec("jaccard:6")};
        train.seed = 99;
        run_train(train);
        EvaluateRunOptions eval;
        eval.stores_dir = prepare.out_dir;
        eval.out_dir = out / "reports";
        eval.rankers = {"fd-jaccard"};
        eval.eval.candidate_samples = 10;
        eval.eval.seed = 99;
        run_evaluate(eval);
    };
    run_once(dir.path / "a");
    run_once(dir.path / "b");

    auto bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    for (const char* rel :
         {"stores/interactions.fi2i", "stores/split.fi2i", "stores/fisher.fi2i",
          "reports/metrics_fd-jaccard.csv"})
        CHECK(bytes(dir.path / "a" / rel) == bytes(dir.path / "b" / rel));
}

TEST_CASE("ranker registry reports valid names on an unknown ranker") {
    TempDir dir("i2i_pipeline_names");
    const auto events = write_events(dir.path, 63);
    PrepareOptions prepare;
    prepare.events_path = events;
    prepare.out_dir = dir.path / "stores";
    run_prepare(prepare);
    TrainOptions train;
    train.stores_dir = prepare.out_dir;
    train.modalities = {parse_modality_spec("jaccard:5")};
    run_train(train);

    auto context = load_context(StorePaths{prepare.out_dir}, StorePaths{prepare.out_dir});
    CHECK_THROWS_WITH_AS(context.ranker("fd-jacard"), doctest::Contains("valid rankers:"),
                         DataError);
    CHECK_THROWS_WITH_AS(context.ranker("content"), doctest::Contains("valid rankers:"),
                         DataError);  // no content store loaded
    CHECK(context.ranker("fd-jaccard").name == "fd-jaccard");
    CHECK(context.ranker("oracle").needs_truth);
}

TEST_CASE("train without prepared stores names the missing file") {
    TrainOptions train;
    train.stores_dir = "/nonexistent/stores";
    CHECK_THROWS_WITH_AS(run_train(train), doctest::Contains("interactions.fi2i"), DataError);
}

TEST_CASE("content modality without a content store is rejected") {
    TempDir dir("i2i_pipeline_nocontent");
    const auto events = write_events(dir.path, 64);
    PrepareOptions prepare;
    prepare.events_path = events;
    prepare.out_dir = dir.path / "stores";
    run_prepare(prepare);
    TrainOptions train;
    train.stores_dir = prepare.out_dir;
    train.modalities = {parse_modality_spec("content")};
    CHECK_THROWS_WITH_AS(run_train(train), doctest::Contains("content"), DataError);
}

TEST_CASE("modality specs parse kinds and sample counts") {
    const auto a = parse_modality_spec("jaccard:20");
    CHECK(a.kind == SimilarityKind::jaccard);
    CHECK(a.samples == 20);
    const auto b = parse_modality_spec("content");
    CHECK(b.kind == SimilarityKind::content);
    CHECK(b.samples == 10);  // content default
    const auto c = parse_modality_spec("cosine");
    CHECK(c.samples == 20);
    CHECK_THROWS_AS(parse_modality_spec("bogus:3"), DataError);
    CHECK_THROWS_AS(parse_modality_spec("jaccard:0"), DataError);
    CHECK_THROWS_AS(parse_modality_spec("jaccard:x"), DataError);
}

TEST_CASE("run configs round-trip") {
    TempDir dir("i2i_runconfig");
    const std::vector<std::pair<std::string, std::string>> entries = {
        {"command", "prepare"}, {"seed", "42"}, {"split_ratio", "0.900000"}};
    const auto path = dir.path / "run_config.txt";
    write_run_config(path, entries);
    const auto loaded = read_run_config(path);
    CHECK(loaded.size() == entries.size());
    for (const auto& [key, value] : entries) CHECK(loaded.at(key) == value);
}

TEST_CASE("recommend scans every other item") {
    TempDir dir("i2i_recommend");
    const auto events = write_events(dir.path, 65);
    PrepareOptions prepare;
    prepare.events_path = events;
    prepare.out_dir = dir.path / "stores";
    prepare.seed = 3;
    run_prepare(prepare);
    TrainOptions train;
    train.stores_dir = prepare.out_dir;
    train.modalities = {parse_modality_spec("jaccard:6")};
    train.seed = 3;
    run_train(train);

    auto context = load_context(StorePaths{prepare.out_dir}, StorePaths{prepare.out_dir});
    const auto item = context.vocab.find("i0");
    REQUIRE(item.has_value());

    const auto top1 = recommend(context, "fd-jaccard", *item, 1);
    REQUIRE(top1.size() == 1);
    // Top-1 under fd is the argmin of the fisher distance over all others.
    const auto fisher = context.fisher_evaluator("jaccard");
    double best = std::numeric_limits<double>::infinity();
    ItemIndex best_item = -1;
    for (std::size_t i = 0; i < context.stats.item_count(); ++i) {
        const auto c = static_cast<ItemIndex>(i);
        if (c == *item) continue;
        const double d = fisher->distance(*item, c);
        if (d < best || (d == best && c < best_item)) {
            best = d;
            best_item = c;
        }
    }
    CHECK(top1[0].item == best_item);

    const auto all = recommend(context, "fd-jaccard", *item, 1000);
    CHECK(all.size() == context.stats.item_count() - 1);

    // Orders under fd and fc are labeled by the ranker and may differ.
    const auto fc_all = recommend(context, "fc-jaccard", *item, 1000);
    CHECK(fc_all.size() == all.size());

    CHECK_THROWS_AS(recommend(context, "oracle", *item, 3), DataError);
}

}  // TEST_SUITE
