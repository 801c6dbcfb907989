#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "i2i/eir.hpp"
#include "i2i/fisher.hpp"
#include "i2i/similarity.hpp"

namespace i2i {

// Scored candidates for one query, best first. Scores are canonical
// lower-is-better values; equal scores form tie groups. Within a tie group
// the order is ascending item index, which is the deterministic tie break
// Recall/DCG use.
struct RankedCandidates {
    std::vector<ItemIndex> items;
    std::vector<double> scores;
    std::vector<std::size_t> group_offsets;  // starts of tie groups + final size

    std::size_t size() const { return items.size(); }
    // 1-based position; throws if the item is absent.
    std::size_t rank_of(ItemIndex item) const;
    std::size_t position_of(ItemIndex item) const;
    // [begin, end) of the tie group containing the given position.
    std::pair<std::size_t, std::size_t> group_of(std::size_t position) const;
};

// A named scoring rule. `score` fills lower-is-better values for the
// candidates; `truth` is the held-out answer and is only read by the debug
// oracle rankers.
struct Ranker {
    std::string name;
    bool needs_truth = false;
    std::function<void(ItemIndex cond, ItemIndex truth, std::span<const ItemIndex> candidates,
                       std::span<double> scores)>
        score;
};

// Sorts candidates by (score, item index) and records tie groups.
// Candidates must be nonempty and must not contain the conditioning item.
RankedCandidates rank_candidates(const Ranker& ranker, ItemIndex cond,
                                 std::span<const ItemIndex> candidates, ItemIndex truth = -1);

// Baseline similarity ranker (descending similarity).
Ranker make_similarity_ranker(SimilarityKind kind, const InteractionStore* stats,
                              const ContentBags* bags);
// EIR ranker: descending -||x_i - x_j||^2 + b_j.
Ranker make_eir_ranker(std::shared_ptr<const EirModel> model);
// Fisher distance / conditional score rankers (ascending).
Ranker make_fd_ranker(std::string name, std::shared_ptr<const FisherEvaluator> fisher);
Ranker make_fc_ranker(std::string name, std::shared_ptr<const FisherEvaluator> fisher);
// Linear blend of z-normalized FD and FC scores; normalization statistics
// are computed across each candidate set.
Ranker make_blend_ranker(std::string name, std::shared_ptr<const FisherEvaluator> fisher,
                         double fd_weight = 0.5, double fc_weight = 0.5);
// Debug rankers that place the true item first/last.
Ranker make_oracle_ranker();
Ranker make_anti_oracle_ranker();

}  // namespace i2i
