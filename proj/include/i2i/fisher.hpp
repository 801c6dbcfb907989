#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "i2i/similarity.hpp"

namespace i2i {

// The N anchor items all distances are measured against.
struct SampleSet {
    std::vector<ItemIndex> items;

    std::size_t size() const { return items.size(); }
    friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

// The N most frequent items, ties broken by ascending item index. Only
// items with nonzero frequency qualify.
SampleSet select_samples(const InteractionStore& stats, std::size_t n);

// Fitted statistics of one modality: for each sample item i_k the mean and
// standard deviation of dist(x, i_k) over the fitting population, plus the
// mean distance over random item pairs. sigma is floored, never zero.
struct FisherModality {
    SimilarityKind kind = SimilarityKind::jaccard;
    std::vector<ItemIndex> samples;
    std::vector<double> mu;
    std::vector<double> sigma;
    double mu_pair = 0.0;

    std::size_t sample_count() const { return samples.size(); }
    friend bool operator==(const FisherModality&, const FisherModality&) = default;
};

struct FisherModel {
    std::vector<FisherModality> modalities;

    friend bool operator==(const FisherModel&, const FisherModel&) = default;
};

struct FitOptions {
    // Number of seeded random ordered pairs for mu_pair; when the number of
    // ordered pairs is at most this, the exact mean over all of them is used.
    std::size_t pair_samples = 100000;
    std::uint64_t seed = 0;
    double sigma_floor = 1e-6;
};

struct FitResult {
    FisherModality modality;
    std::size_t floored_sigmas = 0;  // degenerate constant-distance samples
};

// Population statistics over all items [0, item_count).
FitResult fit_modality(const Distance& dist, const SampleSet& samples, std::size_t item_count,
                       const FitOptions& options);

// One modality bound to its distance function. Raw distances to samples and
// normalized Fisher vectors are cached for every item at construction.
class ModalityView {
public:
    ModalityView(FisherModality modality, Distance dist, std::size_t item_count);

    const FisherModality& modality() const { return modality_; }
    const Distance& distance() const { return dist_; }
    std::size_t item_count() const { return item_count_; }
    std::size_t sample_count() const { return modality_.sample_count(); }

    double sample_distance(ItemIndex x, std::size_t k) const {
        return sample_dist_[static_cast<std::size_t>(x) * sample_count() + k];
    }

    // Fisher score component k of item x: mu_k - dist(x, i_k).
    void fisher_score(ItemIndex x, std::span<double> out) const;

    // Fisher vector: score normalized per coordinate by sigma_k.
    std::span<const double> fisher_vector(ItemIndex x) const {
        return {fisher_vec_.data() + static_cast<std::size_t>(x) * sample_count(), sample_count()};
    }

    // Diagonal-information Fisher kernel: dot product of Fisher vectors.
    double kernel(ItemIndex i, ItemIndex j) const;
    double self_kernel(ItemIndex i) const { return self_kernel_[static_cast<std::size_t>(i)]; }

    // l2 norm of the conditional Fisher score G_{j|i}, component k =
    // (mu_k + mu_pair) - (dist(j, i_k) + dist(i, j)). Lower fits better.
    double conditional_norm(ItemIndex i, ItemIndex j) const;

private:
    FisherModality modality_;
    Distance dist_;
    std::size_t item_count_;
    std::vector<double> sample_dist_;  // item-major, item_count x N
    std::vector<double> fisher_vec_;   // item-major, item_count x N
    std::vector<double> self_kernel_;  // ||fisher_vector(i)||^2
};

// How a multimodal conditional score combines per-modality norms.
enum class FcCombine {
    norm_sum,         // sum of per-modality norms (default)
    root_sum_square,  // l2 norm of the concatenated score vector
};

// Evaluates Fisher distance (FD) and Fisher conditional score (FC) over one
// or more modalities. Immutable and safe for concurrent use.
class FisherEvaluator {
public:
    FisherEvaluator(std::vector<ModalityView> views, FcCombine combine = FcCombine::norm_sum);

    std::size_t modality_count() const { return views_.size(); }
    const ModalityView& view(std::size_t r) const { return views_[r]; }

    // Multimodal kernel: sum of per-modality kernels, in modality order.
    double kernel(ItemIndex i, ItemIndex j) const;

    // Fisher distance sqrt(K(i,i) - 2 K(i,j) + K(j,j)); the discriminant is
    // analytically nonnegative and clamped at 0 against roundoff.
    double distance(ItemIndex i, ItemIndex j) const;

    // Fisher conditional score of j following i; i == j is rejected.
    double conditional_score(ItemIndex i, ItemIndex j) const;

private:
    std::vector<ModalityView> views_;
    FcCombine combine_;
};

void save_fisher(const FisherModel&, const std::filesystem::path&);
FisherModel load_fisher(const std::filesystem::path&);

}  // namespace i2i
