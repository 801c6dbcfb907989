#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "i2i/dataset.hpp"
#include "i2i/ranking.hpp"

namespace i2i {

// 1 if the true item is ranked K or higher, else 0.
double recall_at_k(const RankedCandidates& ranked, ItemIndex truth, std::size_t k);

// 1/log2(rank+1) if the true item is in the top K, else 0.
double dcg_at_k(const RankedCandidates& ranked, ItemIndex truth, std::size_t k);

// Tie-aware percentile rank: frequency mass ranked strictly ahead of the
// true item plus half of the mass tied with it, over the total candidate
// mass. 0 means the truth tops the list; lower is better.
double percentile_rank(const RankedCandidates& ranked, ItemIndex truth,
                       std::span<const std::uint32_t> frequencies);

enum class CandidateSampling {
    uniform,
    popularity,  // weight proportional to training frequency
};

struct EvalOptions {
    std::size_t k = 20;
    std::size_t candidate_samples = 200;
    std::uint64_t seed = 0;
    // Keep only events whose conditioning item frequency is at most the
    // q-th percentile of the positive training frequencies.
    std::optional<double> max_frequency_percentile;
    // Support bucket edges (ascending). A final +inf edge is implied.
    std::vector<double> bucket_edges;
    CandidateSampling sampling = CandidateSampling::uniform;
    unsigned threads = 1;
};

struct EventRecord {
    ItemIndex conditional = 0;  // last item of the session
    ItemIndex truth = 0;        // observed next item
    std::uint32_t conditional_frequency = 0;
    std::size_t rank = 0;  // deterministic tie-broken rank of the truth
    double recall = 0.0;
    double dcg = 0.0;
    double pr = 0.0;
};

struct Aggregate {
    std::size_t events = 0;
    double recall = 0.0;
    double dcg = 0.0;
    double mpr = 0.0;
};

struct BucketAggregate {
    std::string label;
    // Empty bucket -> no aggregate (absent, not zero).
    std::optional<Aggregate> aggregate;
};

struct MetricsReport {
    std::string ranker;
    std::size_t k = 20;
    std::uint64_t seed = 0;
    Aggregate overall;
    std::vector<BucketAggregate> buckets;
    std::vector<EventRecord> events;
    std::uint64_t short_candidate_events = 0;  // fewer than the requested samples existed
};

Aggregate aggregate_records(std::span<const EventRecord> records);

// Groups events by conditioning-item frequency into [e0,e1), [e1,e2), ...
// with an implied final +inf edge.
std::vector<BucketAggregate> bucket_by_support(std::span<const EventRecord> records,
                                               std::span<const double> edges);

// Runs the sampled-candidate protocol: for each test pair (i, j), draw
// `candidate_samples` distinct items excluding i and j with a per-event
// seeded RNG, rank {j} + sample, and score all metrics. Deterministic for a
// fixed seed regardless of the thread count.
MetricsReport evaluate(std::span<const ItemPair> test_pairs, const Ranker& ranker,
                       const InteractionStore& stats, const EvalOptions& options);

// `ranker,bucket,events,recall@K,dcg@K,mpr` rows: the overall aggregate, any
// percentile-filter sections, then support buckets.
void write_metrics_csv(std::ostream&, const MetricsReport&);
void write_metrics_table(std::ostream&, const MetricsReport&);
void write_events_csv(std::ostream&, const MetricsReport&);

// Extra filtered sections derived from the same evaluated events (no
// re-sampling): label plus the subset aggregate and its buckets.
struct FilteredSection {
    std::string label;
    Aggregate overall;
    std::vector<BucketAggregate> buckets;
};

FilteredSection filter_by_max_frequency(const MetricsReport&, double percentile_q,
                                        std::uint32_t threshold, std::span<const double> edges);

// Appends `ranker,<label>,...` rows for a filtered section (no header).
void write_section_csv(std::ostream&, const std::string& ranker, const FilteredSection&);
void write_section_table(std::ostream&, const FilteredSection&, std::size_t k);

}  // namespace i2i
