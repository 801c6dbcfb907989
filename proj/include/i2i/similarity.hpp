#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "i2i/dataset.hpp"
#include "i2i/eir.hpp"

namespace i2i {

enum class SimilarityKind {
    cosine,
    jaccard,
    ecp,
    content,
    eir,
};

const char* kind_name(SimilarityKind);
std::optional<SimilarityKind> kind_from_name(std::string_view);
bool kind_is_symmetric(SimilarityKind);

// Co-occurrence cosine, taken as f_ij / (f_i * f_j). Note this is not the
// conventional f_ij / sqrt(f_i * f_j); both are monotone in f_ij but scale
// differently with popularity.
double cosine(const InteractionStore&, ItemIndex i, ItemIndex j);

// f_ij / (f_i + f_j - f_ij), in [0,1].
double jaccard(const InteractionStore&, ItemIndex i, ItemIndex j);

// Empirical conditional probability of j following i: f_ij / (f_i + 1).
// Asymmetric; the +1 smoothing keeps it defined for f_i = 0.
double ecp(const InteractionStore&, ItemIndex i, ItemIndex j);

// Jaccard over entity bags; 0 when both bags are empty.
double content_jaccard(const ContentBags&, ItemIndex i, ItemIndex j);

// Distance transform used inside energy functions: 1 - sim for the
// [0,1]-bounded similarities; EIR latent distances pass through unchanged.
double sim_to_dist(SimilarityKind, double value);

// A total distance over all item pairs, usable as the base measure of an
// energy function: dist(i,j) >= 0, finite everywhere, dist(i,i) = 0 for
// symmetric kinds. Frequency-based kinds treat pairs that never co-occur as
// maximally distant even if an item has zero training frequency, so fitting
// over the whole vocabulary stays total.
class Distance {
public:
    Distance() = default;

    double operator()(ItemIndex i, ItemIndex j) const { return fn_(i, j); }
    SimilarityKind kind() const { return kind_; }
    bool valid() const { return static_cast<bool>(fn_); }

    static Distance from_stats(SimilarityKind, const InteractionStore&);
    static Distance from_content(const ContentBags&);
    static Distance from_eir(const EirModel&);
    // Arbitrary distance function under a kind label; synthetic instances
    // and tests plug matrices in through this.
    static Distance from_fn(SimilarityKind, std::function<double(ItemIndex, ItemIndex)>);

private:
    Distance(SimilarityKind kind, std::function<double(ItemIndex, ItemIndex)> fn)
        : kind_(kind), fn_(std::move(fn)) {}

    SimilarityKind kind_ = SimilarityKind::jaccard;
    std::function<double(ItemIndex, ItemIndex)> fn_;
};

}  // namespace i2i
