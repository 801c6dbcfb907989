#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "i2i/dataset.hpp"
#include "i2i/eir.hpp"
#include "i2i/evaluation.hpp"
#include "i2i/fisher.hpp"
#include "i2i/ranking.hpp"

namespace i2i {

// Canonical file names inside a stores/models directory.
struct StorePaths {
    std::filesystem::path dir;

    std::filesystem::path vocabulary() const { return dir / "vocabulary.fi2i"; }
    std::filesystem::path interactions() const { return dir / "interactions.fi2i"; }
    std::filesystem::path content() const { return dir / "content.fi2i"; }
    std::filesystem::path split() const { return dir / "split.fi2i"; }
    std::filesystem::path fisher() const { return dir / "fisher.fi2i"; }
    std::filesystem::path eir() const { return dir / "eir.fi2i"; }
    std::filesystem::path run_config() const { return dir / "run_config.txt"; }
};

// Flat key=value provenance written next to every command's outputs.
void write_run_config(const std::filesystem::path&,
                      const std::vector<std::pair<std::string, std::string>>& entries);
std::map<std::string, std::string> read_run_config(const std::filesystem::path&);

struct PrepareOptions {
    std::filesystem::path events_path;
    std::optional<std::filesystem::path> content_path;
    std::filesystem::path out_dir;
    double split_ratio = 0.9;
    std::uint64_t seed = 42;
};

struct PrepareSummary {
    std::size_t items = 0;
    std::size_t users = 0;
    std::size_t training_pairs = 0;
    std::size_t testing_pairs = 0;
    bool has_content = false;
    std::uint64_t skipped_unknown_content_items = 0;
};

// ingest -> split -> count training-period statistics -> serialize.
PrepareSummary run_prepare(const PrepareOptions&);

struct ModalitySpec {
    SimilarityKind kind = SimilarityKind::jaccard;
    std::size_t samples = 20;
};

// "jaccard:20" or "content" (default sample counts: 20, content 10).
ModalitySpec parse_modality_spec(const std::string&);

struct TrainOptions {
    std::filesystem::path stores_dir;
    std::filesystem::path out_dir;  // defaults to stores_dir when empty
    std::vector<ModalitySpec> modalities;  // empty -> jaccard:20 (+ content:10 if bags exist)
    std::size_t pair_samples = 100000;
    bool train_eir = false;
    EirConfig eir;
    std::uint64_t seed = 42;
};

struct TrainSummary {
    std::vector<ModalitySpec> fitted;
    std::size_t floored_sigmas = 0;
    bool eir_trained = false;
};

TrainSummary run_train(const TrainOptions&);

// Loaded stores and models plus the lazily built ranker registry. Create
// rankers only once the context sits at its final address and keep it alive
// while any ranker produced from it is in use.
class ModelContext {
public:
    Vocabulary vocab;
    InteractionStore stats;
    std::optional<ContentBags> bags;
    std::optional<PairSplit> split;
    FisherModel fisher;
    std::shared_ptr<EirModel> eir;

    FcCombine fc_combine = FcCombine::norm_sum;
    double fd_weight = 0.5;
    double fc_weight = 0.5;

    // Throws DataError listing the valid names for an unknown ranker.
    Ranker ranker(const std::string& name);
    // Names usable with the loaded artifacts.
    std::vector<std::string> ranker_names() const;

    std::shared_ptr<const FisherEvaluator> fisher_evaluator(const std::string& modality_name);

private:
    Distance bind_distance(SimilarityKind) const;
    std::map<std::string, std::shared_ptr<const FisherEvaluator>> evaluators_;
};

ModelContext load_context(const StorePaths& stores, const StorePaths& models,
                          bool need_split = false);

struct EvaluateRunOptions {
    std::filesystem::path stores_dir;
    std::filesystem::path models_dir;  // defaults to stores_dir when empty
    std::filesystem::path out_dir;
    std::vector<std::string> rankers;
    EvalOptions eval;
    std::vector<double> filter_percentiles;  // e.g. {25, 50, 75}
    bool dump_events = false;
    FcCombine fc_combine = FcCombine::norm_sum;
    double fd_weight = 0.5;
    double fc_weight = 0.5;
};

struct EvaluateRunResult {
    std::vector<MetricsReport> reports;
    std::vector<std::vector<FilteredSection>> sections;  // aligned with reports
    std::vector<std::filesystem::path> csv_paths;
};

EvaluateRunResult run_evaluate(const EvaluateRunOptions&);

struct Recommendation {
    ItemIndex item;
    double score = 0.0;
};

// Scores every other item under the named ranker, no candidate sampling.
std::vector<Recommendation> recommend(ModelContext&, const std::string& ranker_name,
                                      ItemIndex item, std::size_t top_n);

}  // namespace i2i
