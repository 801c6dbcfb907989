#include "i2i/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "i2i/io.hpp"
#include "i2i/rng.hpp"

namespace i2i {

SampleSet select_samples(const InteractionStore& stats, std::size_t n) {
    if (n == 0) throw DataError("select_samples: sample count must be positive");
    std::vector<ItemIndex> candidates;
    candidates.reserve(stats.item_count());
    for (std::size_t i = 0; i < stats.item_count(); ++i)
        if (stats.frequencies()[i] > 0) candidates.push_back(static_cast<ItemIndex>(i));
    if (candidates.size() < n)
        throw DataError("select_samples: only " + std::to_string(candidates.size()) +
                        " items with nonzero frequency, need " + std::to_string(n));
    std::sort(candidates.begin(), candidates.end(), [&stats](ItemIndex a, ItemIndex b) {
        const auto fa = stats.frequency(a);
        const auto fb = stats.frequency(b);
        return fa != fb ? fa > fb : a < b;
    });
    candidates.resize(n);
    return SampleSet{std::move(candidates)};
}

FitResult fit_modality(const Distance& dist, const SampleSet& samples, std::size_t item_count,
                       const FitOptions& options) {
    if (samples.size() == 0) throw DataError("fit_modality: empty sample set");
    if (item_count == 0) throw DataError("fit_modality: empty population");

    FitResult result;
    auto& m = result.modality;
    m.kind = dist.kind();
    m.samples = samples.items;
    const std::size_t n = samples.size();
    m.mu.assign(n, 0.0);
    m.sigma.assign(n, 0.0);

    // Two-pass population mean/stddev of dist(x, i_k) over all items x.
    std::vector<double> d(item_count);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t x = 0; x < item_count; ++x)
            d[x] = dist(static_cast<ItemIndex>(x), m.samples[k]);
        const double mean = std::accumulate(d.begin(), d.end(), 0.0) / item_count;
        double var = 0.0;
        for (double v : d) var += (v - mean) * (v - mean);
        var /= static_cast<double>(item_count);
        m.mu[k] = mean;
        double sigma = std::sqrt(var);
        if (sigma < options.sigma_floor) {
            sigma = options.sigma_floor;
            ++result.floored_sigmas;
        }
        m.sigma[k] = sigma;
    }

    // Pair mean: exact over all ordered pairs when feasible, otherwise over
    // seeded uniform random ordered pairs (i != j).
    const std::size_t ordered_pairs = item_count * item_count;
    double sum = 0.0;
    if (item_count > 1 && ordered_pairs <= options.pair_samples) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < item_count; ++i)
            for (std::size_t j = 0; j < item_count; ++j)
                if (i != j) {
                    sum += dist(static_cast<ItemIndex>(i), static_cast<ItemIndex>(j));
                    ++count;
                }
        m.mu_pair = sum / static_cast<double>(count);
    } else if (item_count > 1) {
        Rng rng(derive_seed(options.seed, 0x70616972));  // "pair" stream
        for (std::size_t s = 0; s < options.pair_samples; ++s) {
            const auto i = static_cast<ItemIndex>(rng.below(item_count));
            ItemIndex j;
            do {
                j = static_cast<ItemIndex>(rng.below(item_count));
            } while (j == i);
            sum += dist(i, j);
        }
        m.mu_pair = sum / static_cast<double>(options.pair_samples);
    } else {
        m.mu_pair = 0.0;
    }
    return result;
}

ModalityView::ModalityView(FisherModality modality, Distance dist, std::size_t item_count)
    : modality_(std::move(modality)), dist_(std::move(dist)), item_count_(item_count) {
    const std::size_t n = modality_.sample_count();
    if (n == 0) throw DataError("modality has no samples");
    if (modality_.mu.size() != n || modality_.sigma.size() != n)
        throw DataError("modality statistics arrays do not match the sample count");
    for (const auto s : modality_.samples)
        if (s < 0 || static_cast<std::size_t>(s) >= item_count_)
            throw DataError("modality sample item " + std::to_string(s) +
                            " outside the vocabulary; model and stores do not match");
    sample_dist_.resize(item_count_ * n);
    fisher_vec_.resize(item_count_ * n);
    self_kernel_.resize(item_count_);
    for (std::size_t x = 0; x < item_count_; ++x) {
        double self = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = dist_(static_cast<ItemIndex>(x), modality_.samples[k]);
            sample_dist_[x * n + k] = d;
            const double g = (modality_.mu[k] - d) / modality_.sigma[k];
            fisher_vec_[x * n + k] = g;
            self += g * g;
        }
        self_kernel_[x] = self;
    }
}

void ModalityView::fisher_score(ItemIndex x, std::span<double> out) const {
    const std::size_t n = sample_count();
    for (std::size_t k = 0; k < n; ++k)
        out[k] = modality_.mu[k] - sample_distance(x, k);
}

double ModalityView::kernel(ItemIndex i, ItemIndex j) const {
    const auto gi = fisher_vector(i);
    const auto gj = fisher_vector(j);
    double sum = 0.0;
    for (std::size_t k = 0; k < gi.size(); ++k) sum += gi[k] * gj[k];
    return sum;
}

double ModalityView::conditional_norm(ItemIndex i, ItemIndex j) const {
    const double dist_ij = dist_(i, j);
    const std::size_t n = sample_count();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double g = (modality_.mu[k] + modality_.mu_pair) -
                         (sample_distance(j, k) + dist_ij);
        sum += g * g;
    }
    return std::sqrt(sum);
}

FisherEvaluator::FisherEvaluator(std::vector<ModalityView> views, FcCombine combine)
    : views_(std::move(views)), combine_(combine) {
    if (views_.empty()) throw DataError("fisher evaluator needs at least one modality");
}

double FisherEvaluator::kernel(ItemIndex i, ItemIndex j) const {
    double sum = 0.0;
    for (const auto& view : views_) sum += view.kernel(i, j);
    return sum;
}

double FisherEvaluator::distance(ItemIndex i, ItemIndex j) const {
    double disc = 0.0;
    // Accumulate per modality so the self terms reuse the cached norms.
    for (const auto& view : views_)
        disc += view.self_kernel(i) - 2.0 * view.kernel(i, j) + view.self_kernel(j);
    return std::sqrt(std::max(disc, 0.0));
}

double FisherEvaluator::conditional_score(ItemIndex i, ItemIndex j) const {
    if (i == j) throw DataError("fisher conditional score needs two distinct items");
    if (combine_ == FcCombine::norm_sum) {
        double sum = 0.0;
        for (const auto& view : views_) sum += view.conditional_norm(i, j);
        return sum;
    }
    double sq = 0.0;
    for (const auto& view : views_) {
        const double norm = view.conditional_norm(i, j);
        sq += norm * norm;
    }
    return std::sqrt(sq);
}

void save_fisher(const FisherModel& model, const std::filesystem::path& path) {
    BinaryWriter w(path);
    w.header(FileKind::fisher);
    w.u32(static_cast<std::uint32_t>(model.modalities.size()));
    for (const auto& m : model.modalities) {
        w.str(kind_name(m.kind));
        w.u64(m.samples.size());
        for (auto s : m.samples) w.i32(s);
        w.f64_array(m.mu);
        w.f64_array(m.sigma);
        w.f64(m.mu_pair);
    }
}

FisherModel load_fisher(const std::filesystem::path& path) {
    BinaryReader r(path);
    r.header(FileKind::fisher);
    FisherModel model;
    const std::uint32_t count = r.u32();
    model.modalities.resize(count);
    for (auto& m : model.modalities) {
        const std::string kind = r.str();
        const auto parsed = kind_from_name(kind);
        if (!parsed) throw DataError(path.string() + ": unknown distance kind " + kind);
        m.kind = *parsed;
        m.samples.resize(r.u64());
        for (auto& s : m.samples) s = r.i32();
        m.mu = r.f64_array();
        m.sigma = r.f64_array();
        m.mu_pair = r.f64();
        if (m.mu.size() != m.samples.size() || m.sigma.size() != m.samples.size())
            throw DataError(path.string() + ": malformed modality arrays");
    }
    return model;
}

}  // namespace i2i
