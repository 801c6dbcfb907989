#include "i2i/similarity.hpp"

#include <algorithm>
#include <string>

namespace i2i {

const char* kind_name(SimilarityKind kind) {
    switch (kind) {
        case SimilarityKind::cosine: return "cosine";
        case SimilarityKind::jaccard: return "jaccard";
        case SimilarityKind::ecp: return "ecp";
        case SimilarityKind::content: return "content";
        case SimilarityKind::eir: return "eir";
    }
    return "?";
}

std::optional<SimilarityKind> kind_from_name(std::string_view name) {
    if (name == "cosine") return SimilarityKind::cosine;
    if (name == "jaccard") return SimilarityKind::jaccard;
    if (name == "ecp") return SimilarityKind::ecp;
    if (name == "content") return SimilarityKind::content;
    if (name == "eir") return SimilarityKind::eir;
    return std::nullopt;
}

bool kind_is_symmetric(SimilarityKind kind) {
    return kind != SimilarityKind::ecp;
}

double cosine(const InteractionStore& stats, ItemIndex i, ItemIndex j) {
    const double fi = stats.frequency(i);
    const double fj = stats.frequency(j);
    if (fi <= 0.0 || fj <= 0.0)
        throw DataError("cosine: zero-frequency item");
    const double fij = i == j ? fi : stats.pair_frequency(i, j);
    return fij / (fi * fj);
}

double jaccard(const InteractionStore& stats, ItemIndex i, ItemIndex j) {
    const double fi = stats.frequency(i);
    const double fj = stats.frequency(j);
    const double fij = i == j ? fi : stats.pair_frequency(i, j);
    const double denom = fi + fj - fij;
    if (denom <= 0.0) throw DataError("jaccard: degenerate denominator");
    return fij / denom;
}

double ecp(const InteractionStore& stats, ItemIndex i, ItemIndex j) {
    const double fi = stats.frequency(i);
    const double fij = i == j ? fi : stats.pair_frequency(i, j);
    return fij / (fi + 1.0);
}

double content_jaccard(const ContentBags& bags, ItemIndex i, ItemIndex j) {
    const auto& a = bags.bags[static_cast<std::size_t>(i)];
    const auto& b = bags.bags[static_cast<std::size_t>(j)];
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    std::size_t ai = 0, bi = 0;
    while (ai < a.size() && bi < b.size()) {
        if (a[ai] < b[bi])
            ++ai;
        else if (b[bi] < a[ai])
            ++bi;
        else {
            ++inter;
            ++ai;
            ++bi;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double sim_to_dist(SimilarityKind kind, double value) {
    if (kind == SimilarityKind::eir) {
        if (value < 0.0) throw DataError("sim_to_dist: negative eir distance");
        return value;  // already a squared Euclidean distance
    }
    if (value < 0.0 || value > 1.0)
        throw DataError("sim_to_dist: similarity " + std::to_string(value) + " outside [0,1]");
    return 1.0 - value;
}

Distance Distance::from_stats(SimilarityKind kind, const InteractionStore& stats) {
    const InteractionStore* s = &stats;
    switch (kind) {
        case SimilarityKind::cosine:
            return Distance(kind, [s](ItemIndex i, ItemIndex j) {
                if (i == j) return 0.0;
                // Never co-occurring pairs are maximally distant; this also
                // covers items unseen in training, where the raw cosine is
                // undefined.
                if (s->pair_frequency(i, j) == 0) return 1.0;
                return sim_to_dist(SimilarityKind::cosine, cosine(*s, i, j));
            });
        case SimilarityKind::jaccard:
            return Distance(kind, [s](ItemIndex i, ItemIndex j) {
                if (i == j) return 0.0;
                if (s->pair_frequency(i, j) == 0) return 1.0;
                return sim_to_dist(SimilarityKind::jaccard, jaccard(*s, i, j));
            });
        case SimilarityKind::ecp:
            return Distance(kind, [s](ItemIndex i, ItemIndex j) {
                return sim_to_dist(SimilarityKind::ecp, ecp(*s, i, j));
            });
        default:
            throw DataError(std::string("distance kind ") + kind_name(kind) +
                            " is not frequency-based");
    }
}

Distance Distance::from_content(const ContentBags& bags) {
    const ContentBags* b = &bags;
    return Distance(SimilarityKind::content, [b](ItemIndex i, ItemIndex j) {
        if (i == j) return 0.0;
        return sim_to_dist(SimilarityKind::content, content_jaccard(*b, i, j));
    });
}

Distance Distance::from_eir(const EirModel& model) {
    const EirModel* m = &model;
    return Distance(SimilarityKind::eir,
                    [m](ItemIndex i, ItemIndex j) { return m->distance(i, j); });
}

Distance Distance::from_fn(SimilarityKind kind, std::function<double(ItemIndex, ItemIndex)> fn) {
    return Distance(kind, std::move(fn));
}

}  // namespace i2i
