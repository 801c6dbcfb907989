#include "i2i/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "i2i/rng.hpp"

namespace i2i {

double recall_at_k(const RankedCandidates& ranked, ItemIndex truth, std::size_t k) {
    return ranked.rank_of(truth) <= k ? 1.0 : 0.0;
}

double dcg_at_k(const RankedCandidates& ranked, ItemIndex truth, std::size_t k) {
    const std::size_t rank = ranked.rank_of(truth);
    if (rank > k) return 0.0;
    return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

double percentile_rank(const RankedCandidates& ranked, ItemIndex truth,
                       std::span<const std::uint32_t> frequencies) {
    const std::size_t pos = ranked.position_of(truth);
    const auto [group_begin, group_end] = ranked.group_of(pos);

    // Frequency mass of the candidates that beat the true item, plus half
    // of the mass tied with it: the percentile position of the truth from
    // the top of the list, popularity weighted. 0 is a perfect ranking.
    double total = 0.0;
    double before = 0.0;
    double tied = 0.0;
    for (std::size_t p = 0; p < ranked.size(); ++p) {
        const double f = frequencies[static_cast<std::size_t>(ranked.items[p])];
        total += f;
        if (p < group_begin)
            before += f;
        else if (p < group_end && p != pos)
            tied += f;
    }
    if (total <= 0.0) throw DataError("percentile_rank: zero total candidate frequency");
    return (before + 0.5 * tied) / total;
}

Aggregate aggregate_records(std::span<const EventRecord> records) {
    Aggregate agg;
    agg.events = records.size();
    if (records.empty()) return agg;
    for (const auto& r : records) {
        agg.recall += r.recall;
        agg.dcg += r.dcg;
        agg.mpr += r.pr;
    }
    const auto n = static_cast<double>(records.size());
    agg.recall /= n;
    agg.dcg /= n;
    agg.mpr /= n;
    return agg;
}

namespace {

// Comma-free so that the labels stay single CSV fields.
std::string bucket_label(double lo, double hi) {
    std::ostringstream os;
    auto edge = [&os](double v) {
        if (std::isinf(v))
            os << "inf";
        else
            os << static_cast<long long>(v);
    };
    os << '[';
    edge(lo);
    os << "..";
    edge(hi);
    os << ')';
    return os.str();
}

}  // namespace

std::vector<BucketAggregate> bucket_by_support(std::span<const EventRecord> records,
                                               std::span<const double> edges) {
    if (edges.empty()) return {};
    for (std::size_t e = 1; e < edges.size(); ++e)
        if (!(edges[e] > edges[e - 1]))
            throw DataError("bucket edges must be strictly increasing");

    std::vector<double> bounds(edges.begin(), edges.end());
    if (!std::isinf(bounds.back())) bounds.push_back(std::numeric_limits<double>::infinity());

    std::vector<std::vector<EventRecord>> groups(bounds.size() - 1);
    for (const auto& r : records) {
        const double f = r.conditional_frequency;
        for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
            if (f >= bounds[b] && f < bounds[b + 1]) {
                groups[b].push_back(r);
                break;
            }
        }
    }

    std::vector<BucketAggregate> out;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        BucketAggregate bucket;
        bucket.label = bucket_label(bounds[b], bounds[b + 1]);
        if (!groups[b].empty()) bucket.aggregate = aggregate_records(groups[b]);
        out.push_back(std::move(bucket));
    }
    return out;
}

namespace {

struct SampledCandidates {
    std::vector<ItemIndex> items;
    bool short_sample = false;
};

SampledCandidates sample_candidates(std::size_t item_count, ItemIndex cond, ItemIndex truth,
                                    std::size_t wanted, CandidateSampling sampling,
                                    std::span<const std::uint32_t> frequencies, Rng& rng) {
    SampledCandidates out;
    const std::size_t available = item_count - (cond == truth ? 1 : 2);
    std::size_t take = wanted;
    if (available < wanted) {
        take = available;
        out.short_sample = true;
    }

    if (sampling == CandidateSampling::uniform) {
        if (take == available) {
            for (std::size_t i = 0; i < item_count; ++i) {
                const auto idx = static_cast<ItemIndex>(i);
                if (idx != cond && idx != truth) out.items.push_back(idx);
            }
        } else {
            std::unordered_set<ItemIndex> chosen;
            chosen.reserve(take * 2);
            while (chosen.size() < take) {
                const auto idx = static_cast<ItemIndex>(rng.below(item_count));
                if (idx == cond || idx == truth) continue;
                if (chosen.insert(idx).second) out.items.push_back(idx);
            }
        }
    } else {
        // Weighted sampling without replacement (largest key wins); items
        // with zero frequency only fill in when positive-weight candidates
        // run out.
        std::vector<std::pair<double, ItemIndex>> keys;
        std::vector<ItemIndex> zero_weight;
        keys.reserve(item_count);
        for (std::size_t i = 0; i < item_count; ++i) {
            const auto idx = static_cast<ItemIndex>(i);
            if (idx == cond || idx == truth) continue;
            const double w = frequencies[i];
            const double u = rng.uniform();
            if (w > 0.0)
                keys.push_back({std::log(1.0 - u) / w, idx});
            else
                zero_weight.push_back(idx);
        }
        std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (std::size_t i = 0; i < keys.size() && out.items.size() < take; ++i)
            out.items.push_back(keys[i].second);
        // Deterministic fill from zero-weight items if needed.
        for (std::size_t i = 0; i < zero_weight.size() && out.items.size() < take; ++i)
            out.items.push_back(zero_weight[i]);
    }
    // Truth is always a candidate.
    out.items.push_back(truth);
    return out;
}

EventRecord evaluate_event(const ItemPair& pair, std::size_t event_index, const Ranker& ranker,
                           const InteractionStore& stats, const EvalOptions& options,
                           bool& short_sample) {
    const auto [cond, truth] = pair;
    Rng rng(derive_seed(options.seed, event_index));
    const auto sampled =
        sample_candidates(stats.item_count(), cond, truth, options.candidate_samples,
                          options.sampling, stats.frequencies(), rng);
    short_sample = sampled.short_sample;

    const RankedCandidates ranked = rank_candidates(ranker, cond, sampled.items, truth);

    EventRecord record;
    record.conditional = cond;
    record.truth = truth;
    record.conditional_frequency = stats.frequency(cond);
    record.rank = ranked.rank_of(truth);
    record.recall = recall_at_k(ranked, truth, options.k);
    record.dcg = dcg_at_k(ranked, truth, options.k);
    record.pr = percentile_rank(ranked, truth, stats.frequencies());
    return record;
}

}  // namespace

MetricsReport evaluate(std::span<const ItemPair> test_pairs, const Ranker& ranker,
                       const InteractionStore& stats, const EvalOptions& options) {
    if (options.k == 0) throw DataError("evaluate: k must be at least 1");
    if (options.candidate_samples == 0)
        throw DataError("evaluate: candidate sample size must be at least 1");

    MetricsReport report;
    report.ranker = ranker.name;
    report.k = options.k;
    report.seed = options.seed;

    // Optional cold-start filter on the conditioning item.
    std::vector<ItemPair> kept;
    kept.reserve(test_pairs.size());
    if (options.max_frequency_percentile) {
        std::vector<std::uint32_t> positive;
        for (auto f : stats.frequencies())
            if (f > 0) positive.push_back(f);
        const std::uint32_t threshold =
            support_percentile(positive, *options.max_frequency_percentile);
        for (const auto& p : test_pairs)
            if (stats.frequency(p.first) <= threshold) kept.push_back(p);
    } else {
        kept.assign(test_pairs.begin(), test_pairs.end());
    }

    report.events.resize(kept.size());
    std::vector<std::uint8_t> short_flags(kept.size(), 0);

    const unsigned threads = std::max(1u, options.threads);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t e = begin; e < end; ++e) {
            bool short_sample = false;
            report.events[e] =
                evaluate_event(kept[e], e, ranker, stats, options, short_sample);
            short_flags[e] = short_sample ? 1 : 0;
        }
    };
    if (threads == 1 || kept.size() < 2 * threads) {
        run_range(0, kept.size());
    } else {
        std::vector<std::future<void>> futures;
        const std::size_t chunk = (kept.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(kept.size(), begin + chunk);
            if (begin >= end) break;
            futures.push_back(std::async(std::launch::async, run_range, begin, end));
        }
        for (auto& f : futures) f.get();
    }

    for (auto flag : short_flags) report.short_candidate_events += flag;
    report.overall = aggregate_records(report.events);
    if (!options.bucket_edges.empty())
        report.buckets = bucket_by_support(report.events, options.bucket_edges);
    return report;
}

FilteredSection filter_by_max_frequency(const MetricsReport& report, double percentile_q,
                                        std::uint32_t threshold, std::span<const double> edges) {
    FilteredSection section;
    {
        std::ostringstream os;
        os << 'q' << percentile_q << "(f<=" << threshold << ')';
        section.label = os.str();
    }
    std::vector<EventRecord> kept;
    for (const auto& r : report.events)
        if (r.conditional_frequency <= threshold) kept.push_back(r);
    section.overall = aggregate_records(kept);
    if (!edges.empty()) section.buckets = bucket_by_support(kept, edges);
    return section;
}

namespace {

void csv_row(std::ostream& out, const std::string& ranker, const std::string& bucket,
             const std::optional<Aggregate>& agg) {
    out << ranker << ',' << bucket << ',';
    if (agg) {
        out << agg->events << ',' << std::fixed << std::setprecision(6) << agg->recall << ','
            << agg->dcg << ',' << agg->mpr << '\n';
        out.unsetf(std::ios::fixed);
    } else {
        out << 0 << ",,,\n";
    }
}

}  // namespace

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
    out << "ranker,bucket,events,recall@" << report.k << ",dcg@" << report.k << ",mpr\n";
    csv_row(out, report.ranker, "all",
            report.overall.events > 0 ? std::optional(report.overall) : std::nullopt);
    for (const auto& b : report.buckets) csv_row(out, report.ranker, b.label, b.aggregate);
}

void write_section_csv(std::ostream& out, const std::string& ranker,
                       const FilteredSection& section) {
    csv_row(out, ranker, section.label,
            section.overall.events > 0 ? std::optional(section.overall) : std::nullopt);
    for (const auto& b : section.buckets)
        csv_row(out, ranker, section.label + '|' + b.label, b.aggregate);
}

void write_section_table(std::ostream& out, const FilteredSection& section, std::size_t k) {
    auto line = [&out, k](const std::string& label, const std::optional<Aggregate>& agg) {
        out << "  " << std::left << std::setw(18) << label << std::right;
        if (agg) {
            out << std::fixed << std::setprecision(4) << "  recall@" << k << ' ' << agg->recall
                << "  dcg@" << k << ' ' << agg->dcg << "  mpr " << agg->mpr << "  ("
                << agg->events << " events)";
            out.unsetf(std::ios::fixed);
        } else {
            out << "  (no events)";
        }
        out << '\n';
    };
    line(section.label,
         section.overall.events > 0 ? std::optional(section.overall) : std::nullopt);
    for (const auto& b : section.buckets) line(section.label + '|' + b.label, b.aggregate);
}

void write_metrics_table(std::ostream& out, const MetricsReport& report) {
    out << report.ranker << " (k=" << report.k << ", events=" << report.overall.events << ")\n";
    auto line = [&out, &report](const std::string& label, const std::optional<Aggregate>& agg) {
        out << "  " << std::left << std::setw(18) << label << std::right;
        if (agg) {
            out << std::fixed << std::setprecision(4) << "  recall@" << report.k << ' '
                << agg->recall << "  dcg@" << report.k << ' ' << agg->dcg << "  mpr " << agg->mpr
                << "  (" << agg->events << " events)";
            out.unsetf(std::ios::fixed);
        } else {
            out << "  (no events)";
        }
        out << '\n';
    };
    line("all", report.overall.events > 0 ? std::optional(report.overall) : std::nullopt);
    for (const auto& b : report.buckets) line(b.label, b.aggregate);
}

void write_events_csv(std::ostream& out, const MetricsReport& report) {
    out << "event,conditional,conditional_frequency,truth,rank,recall@" << report.k << ",dcg@"
        << report.k << ",pr\n";
    for (std::size_t e = 0; e < report.events.size(); ++e) {
        const auto& r = report.events[e];
        out << e << ',' << r.conditional << ',' << r.conditional_frequency << ',' << r.truth << ','
            << r.rank << ',' << r.recall << ',' << std::fixed << std::setprecision(6) << r.dcg
            << ',' << r.pr << '\n';
        out.unsetf(std::ios::fixed);
    }
}

}  // namespace i2i
