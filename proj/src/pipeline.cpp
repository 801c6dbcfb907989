#include "i2i/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "i2i/rng.hpp"

namespace i2i {

void write_run_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
}

std::map<std::string, std::string> read_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open");
    std::map<std::string, std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError(path.string() + ": malformed line " + line);
        entries[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return entries;
}

PrepareSummary run_prepare(const PrepareOptions& options) {
    std::filesystem::create_directories(options.out_dir);
    const StorePaths out{options.out_dir};

    const EventLog log = ingest_events_file(options.events_path);
    PairSplit split = split_pairs(log.user_items, options.split_ratio, options.seed);
    const InteractionStore stats =
        InteractionStore::from_user_items(split.training_segments, log.vocab.size());

    PrepareSummary summary;
    summary.items = log.vocab.size();
    summary.users = log.user_count();
    summary.training_pairs = split.training.size();
    summary.testing_pairs = split.testing.size();

    save_vocabulary(log.vocab, out.vocabulary());
    save_interactions(stats, out.interactions());
    save_split(split, out.split());

    if (options.content_path) {
        const ContentBags bags = ingest_content_file(*options.content_path, log.vocab);
        save_content(bags, out.content());
        summary.has_content = true;
        summary.skipped_unknown_content_items = bags.skipped_unknown_items;
    }

    write_run_config(out.run_config(),
                     {{"command", "prepare"},
                      {"events", options.events_path.string()},
                      {"content", options.content_path ? options.content_path->string() : ""},
                      {"out", options.out_dir.string()},
                      {"split_ratio", std::to_string(options.split_ratio)},
                      {"seed", std::to_string(options.seed)}});
    return summary;
}

ModalitySpec parse_modality_spec(const std::string& text) {
    ModalitySpec spec;
    std::string kind_text = text;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        kind_text = text.substr(0, colon);
        const std::string count_text = text.substr(colon + 1);
        try {
            spec.samples = static_cast<std::size_t>(std::stoull(count_text));
        } catch (const std::exception&) {
            throw DataError("modality spec '" + text + "': bad sample count");
        }
        if (spec.samples == 0) throw DataError("modality spec '" + text + "': bad sample count");
    }
    const auto kind = kind_from_name(kind_text);
    if (!kind) throw DataError("modality spec '" + text + "': unknown distance kind");
    spec.kind = *kind;
    if (colon == std::string::npos)
        spec.samples = spec.kind == SimilarityKind::content ? 10 : 20;
    return spec;
}

namespace {

std::string modality_spec_string(const ModalitySpec& spec) {
    return std::string(kind_name(spec.kind)) + ':' + std::to_string(spec.samples);
}

}  // namespace

TrainSummary run_train(const TrainOptions& options) {
    const StorePaths stores{options.stores_dir};
    const StorePaths out{options.out_dir.empty() ? options.stores_dir : options.out_dir};
    std::filesystem::create_directories(out.dir);

    if (!std::filesystem::exists(stores.interactions()))
        throw DataError("missing store: " + stores.interactions().string() + " (run prepare first)");
    const InteractionStore stats = load_interactions(stores.interactions());
    const bool has_content = std::filesystem::exists(stores.content());

    std::vector<ModalitySpec> specs = options.modalities;
    if (specs.empty()) {
        specs.push_back({SimilarityKind::jaccard, 20});
        if (has_content) specs.push_back({SimilarityKind::content, 10});
    }
    for (std::size_t a = 0; a < specs.size(); ++a)
        for (std::size_t b = a + 1; b < specs.size(); ++b)
            if (specs[a].kind == specs[b].kind)
                throw DataError(std::string("modality '") + kind_name(specs[a].kind) +
                                "' requested twice; rankers address modalities by kind");

    std::optional<ContentBags> bags;
    std::shared_ptr<EirModel> eir;

    TrainSummary summary;
    if (options.train_eir) {
        if (!std::filesystem::exists(stores.split()))
            throw DataError("missing store: " + stores.split().string() + " (run prepare first)");
        const PairSplit split = load_split(stores.split());
        EirConfig config = options.eir;
        config.seed = derive_seed(options.seed, 0x656972);  // "eir" stream
        eir = std::make_shared<EirModel>(train_eir(split.training, stats.item_count(), config));
        save_eir(*eir, out.eir());
        summary.eir_trained = true;
    }

    FisherModel model;
    for (const auto& spec : specs) {
        Distance dist;
        switch (spec.kind) {
            case SimilarityKind::content:
                if (!has_content)
                    throw DataError("missing store: " + stores.content().string() +
                                    " (content modality requested without content data)");
                if (!bags) bags = load_content(stores.content());
                dist = Distance::from_content(*bags);
                break;
            case SimilarityKind::eir:
                if (!eir) {
                    if (!std::filesystem::exists(out.eir()))
                        throw DataError("missing model: " + out.eir().string() +
                                        " (eir modality requested without --eir)");
                    eir = std::make_shared<EirModel>(load_eir(out.eir()));
                }
                dist = Distance::from_eir(*eir);
                break;
            default:
                dist = Distance::from_stats(spec.kind, stats);
                break;
        }
        const SampleSet samples = select_samples(stats, spec.samples);
        FitOptions fit;
        fit.pair_samples = options.pair_samples;
        fit.seed = derive_seed(options.seed, static_cast<std::uint64_t>(spec.kind));
        FitResult result = fit_modality(dist, samples, stats.item_count(), fit);
        summary.floored_sigmas += result.floored_sigmas;
        model.modalities.push_back(std::move(result.modality));
        summary.fitted.push_back(spec);
    }
    save_fisher(model, out.fisher());

    std::string modalities_text;
    for (const auto& spec : summary.fitted) {
        if (!modalities_text.empty()) modalities_text += ',';
        modalities_text += modality_spec_string(spec);
    }
    write_run_config(out.run_config(),
                     {{"command", "train"},
                      {"stores", options.stores_dir.string()},
                      {"out", out.dir.string()},
                      {"modalities", modalities_text},
                      {"pair_samples", std::to_string(options.pair_samples)},
                      {"eir", options.train_eir ? "1" : "0"},
                      {"eir_dim", std::to_string(options.eir.dim)},
                      {"eir_epochs", std::to_string(options.eir.epochs)},
                      {"eir_learning_rate", std::to_string(options.eir.learning_rate)},
                      {"eir_negative_samples", std::to_string(options.eir.negative_samples)},
                      {"seed", std::to_string(options.seed)}});
    return summary;
}

Distance ModelContext::bind_distance(SimilarityKind kind) const {
    switch (kind) {
        case SimilarityKind::content:
            if (!bags) throw DataError("content distance requested but no content store loaded");
            return Distance::from_content(*bags);
        case SimilarityKind::eir:
            if (!eir) throw DataError("eir distance requested but no eir model loaded");
            return Distance::from_eir(*eir);
        default:
            return Distance::from_stats(kind, stats);
    }
}

std::shared_ptr<const FisherEvaluator> ModelContext::fisher_evaluator(
    const std::string& modality_name) {
    auto it = evaluators_.find(modality_name);
    if (it != evaluators_.end()) return it->second;

    std::vector<ModalityView> views;
    if (modality_name == "multi") {
        if (fisher.modalities.size() < 2)
            throw DataError("multi ranker needs at least two fitted modalities");
        for (const auto& m : fisher.modalities)
            views.emplace_back(m, bind_distance(m.kind), stats.item_count());
    } else {
        const auto kind = kind_from_name(modality_name);
        if (!kind) throw DataError("unknown modality '" + modality_name + "'");
        const auto found =
            std::find_if(fisher.modalities.begin(), fisher.modalities.end(),
                         [&](const FisherModality& m) { return m.kind == *kind; });
        if (found == fisher.modalities.end())
            throw DataError("modality '" + modality_name + "' is not fitted in the fisher model");
        views.emplace_back(*found, bind_distance(*kind), stats.item_count());
    }
    auto evaluator =
        std::make_shared<const FisherEvaluator>(std::move(views), fc_combine);
    evaluators_.emplace(modality_name, evaluator);
    return evaluator;
}

std::vector<std::string> ModelContext::ranker_names() const {
    std::vector<std::string> names = {"cosine", "jaccard", "ecp"};
    if (bags) names.push_back("content");
    if (eir) names.push_back("eir");
    std::vector<std::string> modality_names;
    for (const auto& m : fisher.modalities) modality_names.push_back(kind_name(m.kind));
    if (fisher.modalities.size() > 1) modality_names.push_back("multi");
    for (const auto& m : modality_names)
        for (const char* prefix : {"fd-", "fc-", "fd+fc-"}) names.push_back(prefix + m);
    names.push_back("oracle");
    names.push_back("anti-oracle");
    return names;
}

Ranker ModelContext::ranker(const std::string& name) {
    const auto valid = ranker_names();
    if (std::find(valid.begin(), valid.end(), name) == valid.end()) {
        std::string msg = "unknown ranker '" + name + "'; valid rankers:";
        for (const auto& n : valid) msg += ' ' + n;
        throw DataError(msg);
    }

    if (name == "oracle") return make_oracle_ranker();
    if (name == "anti-oracle") return make_anti_oracle_ranker();
    if (name == "eir") return make_eir_ranker(eir);
    if (const auto kind = kind_from_name(name))
        return make_similarity_ranker(*kind, &stats, bags ? &*bags : nullptr);
    for (const char* prefix : {"fd+fc-", "fd-", "fc-"}) {
        if (name.rfind(prefix, 0) == 0) {
            const auto evaluator = fisher_evaluator(name.substr(std::string(prefix).size()));
            if (std::string(prefix) == "fd-") return make_fd_ranker(name, evaluator);
            if (std::string(prefix) == "fc-") return make_fc_ranker(name, evaluator);
            return make_blend_ranker(name, evaluator, fd_weight, fc_weight);
        }
    }
    throw DataError("ranker '" + name + "' is not constructible");  // unreachable
}

ModelContext load_context(const StorePaths& stores, const StorePaths& models, bool need_split) {
    ModelContext context;
    context.vocab = load_vocabulary(stores.vocabulary());
    context.stats = load_interactions(stores.interactions());
    if (std::filesystem::exists(stores.content()))
        context.bags = load_content(stores.content());
    if (need_split) {
        if (!std::filesystem::exists(stores.split()))
            throw DataError("missing store: " + stores.split().string());
        context.split = load_split(stores.split());
    }
    if (std::filesystem::exists(models.fisher())) context.fisher = load_fisher(models.fisher());
    if (std::filesystem::exists(models.eir()))
        context.eir = std::make_shared<EirModel>(load_eir(models.eir()));
    return context;
}

EvaluateRunResult run_evaluate(const EvaluateRunOptions& options) {
    if (options.rankers.empty()) throw DataError("no rankers requested");
    const StorePaths stores{options.stores_dir};
    const StorePaths models{options.models_dir.empty() ? options.stores_dir : options.models_dir};
    std::filesystem::create_directories(options.out_dir);

    ModelContext context = load_context(stores, models, /*need_split=*/true);
    context.fc_combine = options.fc_combine;
    context.fd_weight = options.fd_weight;
    context.fc_weight = options.fc_weight;

    // Fail fast on any unknown ranker before the expensive part starts.
    std::vector<Ranker> rankers;
    for (const auto& name : options.rankers) rankers.push_back(context.ranker(name));

    std::vector<std::uint32_t> thresholds;
    if (!options.filter_percentiles.empty()) {
        std::vector<std::uint32_t> positive;
        for (auto f : context.stats.frequencies())
            if (f > 0) positive.push_back(f);
        for (double q : options.filter_percentiles)
            thresholds.push_back(support_percentile(positive, q));
    }

    EvaluateRunResult result;
    for (const auto& ranker : rankers) {
        MetricsReport report =
            evaluate(context.split->testing, ranker, context.stats, options.eval);
        std::vector<FilteredSection> sections;
        for (std::size_t q = 0; q < options.filter_percentiles.size(); ++q)
            sections.push_back(filter_by_max_frequency(report, options.filter_percentiles[q],
                                                       thresholds[q], options.eval.bucket_edges));

        const auto csv_path = options.out_dir / ("metrics_" + ranker.name + ".csv");
        {
            std::ofstream out(csv_path);
            if (!out) throw DataError(csv_path.string() + ": cannot open for writing");
            write_metrics_csv(out, report);
            for (const auto& section : sections) write_section_csv(out, report.ranker, section);
        }
        if (options.dump_events) {
            const auto events_path = options.out_dir / ("events_" + ranker.name + ".csv");
            std::ofstream out(events_path);
            if (!out) throw DataError(events_path.string() + ": cannot open for writing");
            write_events_csv(out, report);
        }
        result.csv_paths.push_back(csv_path);
        result.reports.push_back(std::move(report));
        result.sections.push_back(std::move(sections));
    }

    std::string ranker_list;
    for (const auto& name : options.rankers) {
        if (!ranker_list.empty()) ranker_list += ',';
        ranker_list += name;
    }
    std::string filters;
    for (double q : options.filter_percentiles) {
        if (!filters.empty()) filters += ',';
        filters += std::to_string(q);
    }
    std::string buckets;
    for (double e : options.eval.bucket_edges) {
        if (!buckets.empty()) buckets += ',';
        buckets += std::to_string(e);
    }
    write_run_config(
        options.out_dir / "run_config.txt",
        {{"command", "evaluate"},
         {"stores", options.stores_dir.string()},
         {"models", models.dir.string()},
         {"out", options.out_dir.string()},
         {"rankers", ranker_list},
         {"k", std::to_string(options.eval.k)},
         {"candidate_samples", std::to_string(options.eval.candidate_samples)},
         {"candidate_sampling",
          options.eval.sampling == CandidateSampling::uniform ? "uniform" : "popularity"},
         {"filter_percentiles", filters},
         {"bucket_edges", buckets},
         {"fc_combine", options.fc_combine == FcCombine::norm_sum ? "norm-sum" : "rss"},
         {"fd_weight", std::to_string(options.fd_weight)},
         {"fc_weight", std::to_string(options.fc_weight)},
         {"threads", std::to_string(options.eval.threads)},
         {"seed", std::to_string(options.eval.seed)}});
    return result;
}

std::vector<Recommendation> recommend(ModelContext& context, const std::string& ranker_name,
                                      ItemIndex item, std::size_t top_n) {
    const Ranker ranker = context.ranker(ranker_name);
    if (ranker.needs_truth) throw DataError("ranker '" + ranker_name + "' is evaluation-only");
    std::vector<ItemIndex> candidates;
    candidates.reserve(context.stats.item_count());
    for (std::size_t i = 0; i < context.stats.item_count(); ++i)
        if (static_cast<ItemIndex>(i) != item) candidates.push_back(static_cast<ItemIndex>(i));
    if (candidates.empty()) throw DataError("no other items to recommend");

    const RankedCandidates ranked = rank_candidates(ranker, item, candidates);
    std::vector<Recommendation> out;
    const std::size_t n = std::min(top_n, ranked.size());
    out.reserve(n);
    for (std::size_t p = 0; p < n; ++p) out.push_back({ranked.items[p], ranked.scores[p]});
    return out;
}

}  // namespace i2i
