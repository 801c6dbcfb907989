#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "i2i/common.hpp"

namespace i2i {

struct EirConfig {
    int dim = 20;
    int epochs = 30;
    double learning_rate = 0.05;  // decays linearly per epoch
    int negative_samples = 20;
    std::uint64_t seed = 0;
};

// Euclidean Item Recommender: latent vector x_i and bias b_i per item with
// p(j|i) proportional to exp(-||x_i - x_j||^2 + b_j).
class EirModel {
public:
    EirModel() = default;
    EirModel(std::size_t item_count, int dim)
        : dim_(dim), vectors_(item_count * static_cast<std::size_t>(dim), 0.0),
          biases_(item_count, 0.0) {}

    int dim() const { return dim_; }
    std::size_t item_count() const { return biases_.size(); }

    std::span<const double> vector(ItemIndex i) const {
        return {vectors_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
    }
    std::span<double> vector(ItemIndex i) {
        return {vectors_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
    }
    double bias(ItemIndex i) const { return biases_[static_cast<std::size_t>(i)]; }
    double& bias(ItemIndex i) { return biases_[static_cast<std::size_t>(i)]; }

    // Unnormalized log score -||x_i - x_j||^2 + b_j. Softmax over any
    // candidate set reproduces p(j|i) restricted to that set.
    double score(ItemIndex i, ItemIndex j) const;

    // Squared Euclidean distance over the latent factors, bias excluded.
    double distance(ItemIndex i, ItemIndex j) const;

    const std::vector<double>& raw_vectors() const { return vectors_; }
    const std::vector<double>& raw_biases() const { return biases_; }
    bool finite() const;

    friend bool operator==(const EirModel&, const EirModel&) = default;

private:
    int dim_ = 0;
    std::vector<double> vectors_;  // item-major
    std::vector<double> biases_;

    void check_item(ItemIndex i) const;
};

// Sampled-softmax loss for one transition (cur -> next) against a fixed
// candidate set {next} + negatives, with gradients accumulated into
// grad_vectors/grad_biases (same layout as the model). Returns the loss.
double sampled_softmax_loss_grad(const EirModel& model, ItemIndex cur, ItemIndex next,
                                 std::span<const ItemIndex> negatives,
                                 std::span<double> grad_vectors, std::span<double> grad_biases);

// SGD with uniformly sampled negatives. Deterministic given the seed.
// Throws NumericError naming the epoch if parameters become non-finite.
EirModel train_eir(std::span<const ItemPair> training_pairs, std::size_t item_count,
                   const EirConfig& config);

void save_eir(const EirModel&, const std::filesystem::path&);
EirModel load_eir(const std::filesystem::path&);

}  // namespace i2i
