#include "i2i/eir.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "i2i/io.hpp"
#include "i2i/rng.hpp"

namespace i2i {

void EirModel::check_item(ItemIndex i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= item_count())
        throw DataError("eir: unknown item index " + std::to_string(i));
}

double EirModel::distance(ItemIndex i, ItemIndex j) const {
    check_item(i);
    check_item(j);
    const auto xi = vector(i);
    const auto xj = vector(j);
    double d = 0.0;
    for (int k = 0; k < dim_; ++k) {
        const double diff = xi[k] - xj[k];
        d += diff * diff;
    }
    return d;
}

double EirModel::score(ItemIndex i, ItemIndex j) const {
    return -distance(i, j) + bias(j);
}

bool EirModel::finite() const {
    auto ok = [](double v) { return std::isfinite(v); };
    return std::all_of(vectors_.begin(), vectors_.end(), ok) &&
           std::all_of(biases_.begin(), biases_.end(), ok);
}

double sampled_softmax_loss_grad(const EirModel& model, ItemIndex cur, ItemIndex next,
                                 std::span<const ItemIndex> negatives,
                                 std::span<double> grad_vectors, std::span<double> grad_biases) {
    const int d = model.dim();
    // Candidate set: true next item first, then the negatives.
    std::vector<ItemIndex> cands;
    cands.reserve(negatives.size() + 1);
    cands.push_back(next);
    cands.insert(cands.end(), negatives.begin(), negatives.end());

    std::vector<double> scores(cands.size());
    for (std::size_t c = 0; c < cands.size(); ++c) scores[c] = model.score(cur, cands[c]);

    const double max_score = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - max_score);
    const double log_z = max_score + std::log(z);
    const double loss = log_z - scores[0];

    const auto xi = model.vector(cur);
    auto grad_xi = grad_vectors.subspan(static_cast<std::size_t>(cur) * d, d);
    for (std::size_t c = 0; c < cands.size(); ++c) {
        const double p = std::exp(scores[c] - log_z);
        const double g = p - (c == 0 ? 1.0 : 0.0);  // dLoss/dscore_c
        grad_biases[static_cast<std::size_t>(cands[c])] += g;
        const auto xc = model.vector(cands[c]);
        auto grad_xc = grad_vectors.subspan(static_cast<std::size_t>(cands[c]) * d, d);
        for (int k = 0; k < d; ++k) {
            // score_c = -||x_i - x_c||^2 + b_c, so dscore_c/dx_i = -2(x_i - x_c)
            // and dscore_c/dx_c = 2(x_i - x_c).
            const double diff2 = 2.0 * (xi[k] - xc[k]);
            grad_xi[k] -= g * diff2;
            grad_xc[k] += g * diff2;
        }
    }
    return loss;
}

EirModel train_eir(std::span<const ItemPair> training_pairs, std::size_t item_count,
                   const EirConfig& config) {
    if (training_pairs.empty()) throw DataError("eir: no training pairs");
    if (config.dim <= 0 || config.epochs <= 0 || config.negative_samples <= 0)
        throw DataError("eir: dim, epochs and negative samples must be positive");
    // Each step needs a negative distinct from both pair items.
    if (item_count < 3) throw DataError("eir: needs at least three items to sample negatives");

    EirModel model(item_count, config.dim);
    {
        Rng init(derive_seed(config.seed, 0));
        for (std::size_t i = 0; i < item_count; ++i) {
            auto x = model.vector(static_cast<ItemIndex>(i));
            for (auto& v : x) v = init.gaussian(0.0, 0.1);
        }
    }

    const int d = config.dim;
    std::vector<std::size_t> order(training_pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<ItemIndex> negatives(static_cast<std::size_t>(config.negative_samples));
    std::vector<double> scores(negatives.size() + 1);
    std::vector<double> xi_update(static_cast<std::size_t>(d));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng rng(derive_seed(config.seed, 1 + static_cast<std::uint64_t>(epoch)));
        shuffle(order, rng);
        const double lr = config.learning_rate *
                          static_cast<double>(config.epochs - epoch) / config.epochs;

        for (const std::size_t idx : order) {
            const auto [cur, next] = training_pairs[idx];
            for (auto& n : negatives) {
                do {
                    n = static_cast<ItemIndex>(rng.below(item_count));
                } while (n == cur || n == next);
            }

            // Inline single-pair SGD step; mirrors sampled_softmax_loss_grad
            // but updates in place without a full-model gradient buffer.
            scores[0] = model.score(cur, next);
            for (std::size_t c = 0; c < negatives.size(); ++c)
                scores[c + 1] = model.score(cur, negatives[c]);
            const double max_score = *std::max_element(scores.begin(), scores.end());
            double z = 0.0;
            for (double s : scores) z += std::exp(s - max_score);
            const double log_z = max_score + std::log(z);

            auto xi = model.vector(cur);
            std::fill(xi_update.begin(), xi_update.end(), 0.0);
            auto apply = [&](ItemIndex cand, double p, double target) {
                const double g = p - target;
                model.bias(cand) -= lr * g;
                auto xc = model.vector(cand);
                for (int k = 0; k < d; ++k) {
                    const double diff2 = 2.0 * (xi[k] - xc[k]);
                    xi_update[static_cast<std::size_t>(k)] += lr * g * diff2;
                    xc[k] -= lr * g * diff2;
                }
            };
            apply(next, std::exp(scores[0] - log_z), 1.0);
            for (std::size_t c = 0; c < negatives.size(); ++c)
                apply(negatives[c], std::exp(scores[c + 1] - log_z), 0.0);
            for (int k = 0; k < d; ++k) xi[k] += xi_update[static_cast<std::size_t>(k)];
        }

        if (!model.finite())
            throw NumericError("eir: training diverged at epoch " + std::to_string(epoch + 1));
    }
    return model;
}

void save_eir(const EirModel& model, const std::filesystem::path& path) {
    BinaryWriter w(path);
    w.header(FileKind::eir);
    w.u32(static_cast<std::uint32_t>(model.dim()));
    w.u64(model.item_count());
    for (std::size_t i = 0; i < model.item_count(); ++i) {
        const auto idx = static_cast<ItemIndex>(i);
        w.i32(idx);
        w.f64(model.bias(idx));
        for (double v : model.vector(idx)) w.f64(v);
    }
}

EirModel load_eir(const std::filesystem::path& path) {
    BinaryReader r(path);
    r.header(FileKind::eir);
    const int d = static_cast<int>(r.u32());
    const std::uint64_t n = r.u64();
    EirModel model(n, d);
    for (std::uint64_t i = 0; i < n; ++i) {
        const ItemIndex idx = r.i32();
        if (idx < 0 || static_cast<std::uint64_t>(idx) >= n)
            throw DataError(path.string() + ": item index out of range");
        model.bias(idx) = r.f64();
        for (auto& v : model.vector(idx)) v = r.f64();
    }
    return model;
}

}  // namespace i2i
