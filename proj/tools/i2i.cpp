// Command line front end: prepare -> train -> evaluate -> report, plus a
// one-shot recommend query. Exit codes: 0 ok, 1 usage, 2 data, 3 numeric.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "i2i/pipeline.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CliOptions {
    std::uint64_t seed = 42;
    unsigned threads = 1;

    // prepare
    std::string events_path;
    std::string content_path;
    std::string out_dir;
    double split_ratio = 0.9;

    // train
    std::string stores_dir;
    std::vector<std::string> modalities;
    std::size_t pair_samples = 100000;
    bool train_eir = false;
    i2i::EirConfig eir;

    // evaluate
    std::string models_dir;
    std::vector<std::string> rankers;
    std::size_t k = 20;
    std::size_t candidate_samples = 200;
    std::vector<double> filter_percentiles;
    std::vector<double> bucket_edges;
    std::string candidate_sampling = "uniform";
    std::string fc_combine = "norm-sum";
    double fd_weight = 0.5;
    double fc_weight = 0.5;
    bool dump_events = false;

    // recommend
    std::string ranker;
    std::string item_id;
    std::size_t top_n = 10;

    // report
    std::vector<std::string> csv_paths;
};

int cmd_prepare(const CliOptions& cli) {
    i2i::PrepareOptions options;
    options.events_path = cli.events_path;
    if (!cli.content_path.empty()) options.content_path = cli.content_path;
    options.out_dir = cli.out_dir;
    options.split_ratio = cli.split_ratio;
    options.seed = cli.seed;

    const i2i::PrepareSummary summary = i2i::run_prepare(options);
    std::cout << "items " << summary.items << "\nusers " << summary.users << "\ntraining pairs "
              << summary.training_pairs << "\ntesting pairs " << summary.testing_pairs << '\n';
    if (summary.has_content && summary.skipped_unknown_content_items > 0)
        std::cerr << "warning: skipped " << summary.skipped_unknown_content_items
                  << " content lines with unknown item ids\n";
    return 0;
}

int cmd_train(const CliOptions& cli) {
    i2i::TrainOptions options;
    options.stores_dir = cli.stores_dir;
    options.out_dir = cli.out_dir;
    for (const auto& spec : cli.modalities)
        options.modalities.push_back(i2i::parse_modality_spec(spec));
    options.pair_samples = cli.pair_samples;
    options.train_eir = cli.train_eir;
    options.eir = cli.eir;
    options.seed = cli.seed;

    const i2i::TrainSummary summary = i2i::run_train(options);
    for (const auto& spec : summary.fitted)
        std::cout << "fitted modality " << i2i::kind_name(spec.kind) << " with " << spec.samples
                  << " samples\n";
    if (summary.eir_trained) std::cout << "trained eir model\n";
    if (summary.floored_sigmas > 0)
        std::cerr << "warning: floored " << summary.floored_sigmas
                  << " degenerate sample deviations\n";
    return 0;
}

int cmd_evaluate(const CliOptions& cli) {
    i2i::EvaluateRunOptions options;
    options.stores_dir = cli.stores_dir;
    options.models_dir = cli.models_dir;
    options.out_dir = cli.out_dir;
    options.rankers = cli.rankers;
    options.eval.k = cli.k;
    options.eval.candidate_samples = cli.candidate_samples;
    options.eval.seed = cli.seed;
    options.eval.bucket_edges = cli.bucket_edges;
    options.eval.threads = cli.threads;
    if (cli.candidate_sampling == "popularity")
        options.eval.sampling = i2i::CandidateSampling::popularity;
    else if (cli.candidate_sampling != "uniform")
        throw CLI::ValidationError("--candidate-sampling must be uniform or popularity");
    options.filter_percentiles = cli.filter_percentiles;
    options.dump_events = cli.dump_events;
    if (cli.fc_combine == "rss")
        options.fc_combine = i2i::FcCombine::root_sum_square;
    else if (cli.fc_combine != "norm-sum")
        throw CLI::ValidationError("--fc-combine must be norm-sum or rss");
    options.fd_weight = cli.fd_weight;
    options.fc_weight = cli.fc_weight;

    const i2i::EvaluateRunResult result = i2i::run_evaluate(options);
    for (std::size_t r = 0; r < result.reports.size(); ++r) {
        i2i::write_metrics_table(std::cout, result.reports[r]);
        for (const auto& section : result.sections[r])
            i2i::write_section_table(std::cout, section, result.reports[r].k);
        if (result.reports[r].short_candidate_events > 0)
            std::cerr << "warning: " << result.reports[r].short_candidate_events
                      << " events had fewer candidates than requested\n";
    }
    for (const auto& path : result.csv_paths) std::cout << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_recommend(const CliOptions& cli) {
    const i2i::StorePaths stores{cli.stores_dir};
    const i2i::StorePaths models{cli.models_dir.empty() ? cli.stores_dir : cli.models_dir};
    i2i::ModelContext context = i2i::load_context(stores, models);
    if (cli.fc_combine == "rss") context.fc_combine = i2i::FcCombine::root_sum_square;
    context.fd_weight = cli.fd_weight;
    context.fc_weight = cli.fc_weight;

    const auto item = context.vocab.find(cli.item_id);
    if (!item) throw i2i::DataError("unknown item id '" + cli.item_id + "'");

    const auto recs = i2i::recommend(context, cli.ranker, *item, cli.top_n);
    std::cout << "ranker " << cli.ranker << ", item " << cli.item_id
              << " (scores: lower is better; similarity baselines are negated)\n";
    for (std::size_t p = 0; p < recs.size(); ++p)
        std::cout << p + 1 << '\t' << context.vocab.name(recs[p].item) << '\t' << recs[p].score
                  << '\n';
    return 0;
}

int cmd_report(const CliOptions& cli) {
    // Re-prints metrics CSVs as aligned text, grouped the way they were written.
    for (const auto& path : cli.csv_paths) {
        std::ifstream in(path);
        if (!in) throw i2i::DataError(path + ": cannot open");
        std::string line;
        bool first = true;
        std::cout << path << '\n';
        while (std::getline(in, line)) {
            if (first) {
                first = false;
                continue;  // header
            }
            std::vector<std::string> fields;
            std::size_t start = 0;
            while (true) {
                const auto comma = line.find(',', start);
                fields.push_back(line.substr(start, comma - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (fields.size() != 6) throw i2i::DataError(path + ": malformed row: " + line);
            std::cout << "  " << fields[0] << "  " << fields[1] << "  events=" << fields[2];
            if (!fields[3].empty())
                std::cout << "  recall=" << fields[3] << "  dcg=" << fields[4]
                          << "  mpr=" << fields[5];
            std::cout << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fisher-information item-to-item recommendation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);

    CliOptions cli;
    app.add_option("--seed", cli.seed, "global RNG seed")->capture_default_str();
    app.add_option("--threads", cli.threads, "evaluation worker threads")->capture_default_str();

    auto* prepare = app.add_subcommand("prepare", "ingest events, split pairs, count statistics");
    prepare->add_option("--events", cli.events_path, "events file (user<TAB>item per line)")
        ->required();
    prepare->add_option("--content", cli.content_path, "content file (item<TAB>token per line)");
    prepare->add_option("--out", cli.out_dir, "output directory")->required();
    prepare->add_option("--split-ratio", cli.split_ratio, "per-user train fraction")
        ->capture_default_str();

    auto* train = app.add_subcommand("train", "fit fisher modalities and optionally eir");
    train->add_option("--stores", cli.stores_dir, "prepared stores directory")->required();
    train->add_option("--out", cli.out_dir, "model output directory (default: stores)");
    train->add_option("--modalities", cli.modalities,
                      "modalities to fit, e.g. jaccard:20,content:10")
        ->delimiter(',');
    train->add_option("--pair-samples", cli.pair_samples, "random pairs for the pair-mean")
        ->capture_default_str();
    train->add_flag("--eir", cli.train_eir, "train the eir latent factor model");
    train->add_option("--eir-dim", cli.eir.dim)->capture_default_str();
    train->add_option("--eir-epochs", cli.eir.epochs)->capture_default_str();
    train->add_option("--eir-learning-rate", cli.eir.learning_rate)->capture_default_str();
    train->add_option("--eir-negatives", cli.eir.negative_samples)->capture_default_str();

    auto* evaluate = app.add_subcommand("evaluate", "run the sampled-candidate protocol");
    evaluate->add_option("--stores", cli.stores_dir, "prepared stores directory")->required();
    evaluate->add_option("--models", cli.models_dir, "models directory (default: stores)");
    evaluate->add_option("--out", cli.out_dir, "report output directory")->required();
    evaluate->add_option("--rankers", cli.rankers, "comma separated ranker names")
        ->required()
        ->delimiter(',');
    evaluate->add_option("--k", cli.k, "cutoff for recall/dcg")->capture_default_str();
    evaluate->add_option("--sample-size", cli.candidate_samples, "sampled candidates per event")
        ->capture_default_str();
    evaluate->add_option("--filter-percentiles", cli.filter_percentiles,
                         "max-frequency percentile sections, e.g. 25,50,75")
        ->delimiter(',');
    evaluate->add_option("--buckets", cli.bucket_edges, "support bucket edges, e.g. 0,100")
        ->delimiter(',');
    evaluate->add_option("--candidate-sampling", cli.candidate_sampling, "uniform|popularity")
        ->capture_default_str();
    evaluate->add_option("--fc-combine", cli.fc_combine,
                         "multimodal fc combination: norm-sum|rss")
        ->capture_default_str();
    evaluate->add_option("--fd-weight", cli.fd_weight, "fd weight in the fd+fc blend")
        ->capture_default_str();
    evaluate->add_option("--fc-weight", cli.fc_weight, "fc weight in the fd+fc blend")
        ->capture_default_str();
    evaluate->add_flag("--per-event", cli.dump_events, "also dump per-event csv");

    auto* rec = app.add_subcommand("recommend", "print the top next items for one item");
    rec->add_option("--stores", cli.stores_dir, "prepared stores directory")->required();
    rec->add_option("--models", cli.models_dir, "models directory (default: stores)");
    rec->add_option("--ranker", cli.ranker, "ranker name")->required();
    rec->add_option("--item", cli.item_id, "external item id")->required();
    rec->add_option("--top", cli.top_n, "how many items to print")->capture_default_str();
    rec->add_option("--fc-combine", cli.fc_combine)->capture_default_str();
    rec->add_option("--fd-weight", cli.fd_weight)->capture_default_str();
    rec->add_option("--fc-weight", cli.fc_weight)->capture_default_str();

    auto* report = app.add_subcommand("report", "print metrics csv files as a table");
    report->add_option("csv", cli.csv_paths, "metrics csv files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    }

    try {
        if (prepare->parsed()) return cmd_prepare(cli);
        if (train->parsed()) return cmd_train(cli);
        if (evaluate->parsed()) return cmd_evaluate(cli);
        if (rec->parsed()) return cmd_recommend(cli);
        if (report->parsed()) return cmd_report(cli);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const i2i::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const i2i::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        // Unknown ranker names are usage, not data, problems.
        if (std::string(e.what()).rfind("unknown ranker", 0) == 0) return kExitUsage;
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
