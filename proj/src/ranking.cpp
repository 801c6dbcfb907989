#include "i2i/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace i2i {

std::size_t RankedCandidates::position_of(ItemIndex item) const {
    const auto it = std::find(items.begin(), items.end(), item);
    if (it == items.end()) throw DataError("item not present in ranked candidates");
    return static_cast<std::size_t>(it - items.begin());
}

std::size_t RankedCandidates::rank_of(ItemIndex item) const { return position_of(item) + 1; }

std::pair<std::size_t, std::size_t> RankedCandidates::group_of(std::size_t position) const {
    auto it = std::upper_bound(group_offsets.begin(), group_offsets.end(), position);
    // group_offsets always starts with 0 and ends with items.size().
    const std::size_t end = *it;
    const std::size_t begin = *(it - 1);
    return {begin, end};
}

RankedCandidates rank_candidates(const Ranker& ranker, ItemIndex cond,
                                 std::span<const ItemIndex> candidates, ItemIndex truth) {
    if (candidates.empty()) throw DataError("rank_candidates: empty candidate set");
    for (const auto c : candidates)
        if (c == cond) throw DataError("rank_candidates: candidates must exclude the query item");

    std::vector<double> scores(candidates.size());
    ranker.score(cond, truth, candidates, scores);

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return candidates[a] < candidates[b];
    });

    RankedCandidates ranked;
    ranked.items.resize(candidates.size());
    ranked.scores.resize(candidates.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
        ranked.items[p] = candidates[order[p]];
        ranked.scores[p] = scores[order[p]];
    }
    ranked.group_offsets.push_back(0);
    for (std::size_t p = 1; p < ranked.scores.size(); ++p)
        if (ranked.scores[p] != ranked.scores[p - 1]) ranked.group_offsets.push_back(p);
    ranked.group_offsets.push_back(ranked.items.size());
    return ranked;
}

Ranker make_similarity_ranker(SimilarityKind kind, const InteractionStore* stats,
                              const ContentBags* bags) {
    if (kind == SimilarityKind::eir)
        throw DataError("use make_eir_ranker for the eir baseline");
    if (kind == SimilarityKind::content && bags == nullptr)
        throw DataError("content ranker needs content bags");
    if (kind != SimilarityKind::content && stats == nullptr)
        throw DataError("similarity ranker needs interaction statistics");

    Ranker ranker;
    ranker.name = kind_name(kind);
    ranker.score = [kind, stats, bags](ItemIndex cond, ItemIndex, std::span<const ItemIndex> cands,
                                       std::span<double> out) {
        for (std::size_t c = 0; c < cands.size(); ++c) {
            double sim = 0.0;
            switch (kind) {
                case SimilarityKind::cosine:
                    sim = stats->pair_frequency(cond, cands[c]) == 0 ? 0.0
                                                                     : cosine(*stats, cond, cands[c]);
                    break;
                case SimilarityKind::jaccard:
                    sim = stats->frequency(cond) + stats->frequency(cands[c]) == 0
                              ? 0.0
                              : jaccard(*stats, cond, cands[c]);
                    break;
                case SimilarityKind::ecp:
                    sim = ecp(*stats, cond, cands[c]);
                    break;
                case SimilarityKind::content:
                    sim = content_jaccard(*bags, cond, cands[c]);
                    break;
                case SimilarityKind::eir:
                    break;
            }
            out[c] = -sim;  // descending similarity
        }
    };
    return ranker;
}

Ranker make_eir_ranker(std::shared_ptr<const EirModel> model) {
    Ranker ranker;
    ranker.name = "eir";
    ranker.score = [model](ItemIndex cond, ItemIndex, std::span<const ItemIndex> cands,
                           std::span<double> out) {
        for (std::size_t c = 0; c < cands.size(); ++c) out[c] = -model->score(cond, cands[c]);
    };
    return ranker;
}

Ranker make_fd_ranker(std::string name, std::shared_ptr<const FisherEvaluator> fisher) {
    Ranker ranker;
    ranker.name = std::move(name);
    ranker.score = [fisher](ItemIndex cond, ItemIndex, std::span<const ItemIndex> cands,
                            std::span<double> out) {
        for (std::size_t c = 0; c < cands.size(); ++c) out[c] = fisher->distance(cond, cands[c]);
    };
    return ranker;
}

Ranker make_fc_ranker(std::string name, std::shared_ptr<const FisherEvaluator> fisher) {
    Ranker ranker;
    ranker.name = std::move(name);
    ranker.score = [fisher](ItemIndex cond, ItemIndex, std::span<const ItemIndex> cands,
                            std::span<double> out) {
        for (std::size_t c = 0; c < cands.size(); ++c)
            out[c] = fisher->conditional_score(cond, cands[c]);
    };
    return ranker;
}

namespace {

// z-normalize in place; a constant vector becomes all zeros.
void z_normalize(std::span<double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    for (auto& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
}

}  // namespace

Ranker make_blend_ranker(std::string name, std::shared_ptr<const FisherEvaluator> fisher,
                         double fd_weight, double fc_weight) {
    Ranker ranker;
    ranker.name = std::move(name);
    ranker.score = [fisher, fd_weight, fc_weight](ItemIndex cond, ItemIndex,
                                                  std::span<const ItemIndex> cands,
                                                  std::span<double> out) {
        std::vector<double> fd(cands.size());
        std::vector<double> fc(cands.size());
        for (std::size_t c = 0; c < cands.size(); ++c) {
            fd[c] = fisher->distance(cond, cands[c]);
            fc[c] = fisher->conditional_score(cond, cands[c]);
        }
        z_normalize(fd);
        z_normalize(fc);
        for (std::size_t c = 0; c < cands.size(); ++c)
            out[c] = fd_weight * fd[c] + fc_weight * fc[c];
    };
    return ranker;
}

Ranker make_oracle_ranker() {
    Ranker ranker;
    ranker.name = "oracle";
    ranker.needs_truth = true;
    ranker.score = [](ItemIndex, ItemIndex truth, std::span<const ItemIndex> cands,
                      std::span<double> out) {
        for (std::size_t c = 0; c < cands.size(); ++c) out[c] = cands[c] == truth ? 0.0 : 1.0;
    };
    return ranker;
}

Ranker make_anti_oracle_ranker() {
    Ranker ranker;
    ranker.name = "anti-oracle";
    ranker.needs_truth = true;
    ranker.score = [](ItemIndex, ItemIndex truth, std::span<const ItemIndex> cands,
                      std::span<double> out) {
        for (std::size_t c = 0; c < cands.size(); ++c) out[c] = cands[c] == truth ? 1.0 : 0.0;
    };
    return ranker;
}

}  // namespace i2i
