#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "i2i/common.hpp"

namespace i2i {

// Bijective external id <-> dense index map. Indices are assigned in first
// appearance order, contiguous from 0.
class Vocabulary {
public:
    ItemIndex intern(const std::string& external_id);
    std::optional<ItemIndex> find(const std::string& external_id) const;
    const std::string& name(ItemIndex idx) const;
    std::size_t size() const { return names_.size(); }

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, ItemIndex> index_;
};

// Co-occurrence statistics: f_i = number of distinct users who interacted
// with item i, f_ij = number of distinct users who interacted with both.
// Always f_ij <= min(f_i, f_j) and f_ij = f_ji; the self pair f_ii is never
// stored or queried. Immutable after construction, safe to share.
class InteractionStore {
public:
    InteractionStore() = default;

    // user_items: one list of distinct item indices per user.
    static InteractionStore from_user_items(const std::vector<std::vector<ItemIndex>>& user_items,
                                            std::size_t item_count);

    std::uint32_t frequency(ItemIndex i) const { return freq_[static_cast<std::size_t>(i)]; }
    std::uint32_t pair_frequency(ItemIndex i, ItemIndex j) const;
    const std::vector<std::uint32_t>& frequencies() const { return freq_; }
    const std::vector<std::vector<ItemIndex>>& user_items() const { return user_items_; }
    std::size_t user_count() const { return user_items_.size(); }
    std::size_t item_count() const { return freq_.size(); }
    std::size_t stored_pair_count() const;

    // Pairs with nonzero count, ordered by (i, j), i < j.
    std::vector<std::pair<ItemPair, std::uint32_t>> sorted_pairs() const;

private:
    std::vector<std::uint32_t> freq_;
    std::vector<std::vector<ItemIndex>> user_items_;
    // Pair counts live in a dense lower triangle for small vocabularies and
    // in a hash map otherwise.
    bool dense_ = false;
    std::vector<std::uint32_t> dense_pairs_;
    std::unordered_map<std::uint64_t, std::uint32_t> sparse_pairs_;

    void add_pair(ItemIndex i, ItemIndex j);
    std::size_t tri_offset(ItemIndex i, ItemIndex j) const;
};

// Raw ingested events: per-user ordered lists of distinct item indices.
struct EventLog {
    Vocabulary vocab;
    std::vector<std::vector<ItemIndex>> user_items;

    std::size_t user_count() const { return user_items.size(); }
};

// Per-user train/test item pairs plus the RNG seed that produced them.
struct PairSplit {
    std::vector<ItemPair> training;
    std::vector<ItemPair> testing;
    std::uint64_t seed = 0;
    double ratio = 0.9;
    // The per-user training segments the pairs were cut from; used to count
    // training-period frequencies.
    std::vector<std::vector<ItemIndex>> training_segments;

    friend bool operator==(const PairSplit&, const PairSplit&) = default;
};

// item index -> deduplicated entity token ids; absent items have empty bags.
struct ContentBags {
    std::vector<std::string> token_names;           // token id -> token string
    std::vector<std::vector<std::int32_t>> bags;    // per item, sorted unique token ids
    std::uint64_t skipped_unknown_items = 0;

    std::size_t item_count() const { return bags.size(); }
    friend bool operator==(const ContentBags&, const ContentBags&) = default;
};

// Reads `user_id<TAB>item_id[<TAB>...]` records; blank lines and lines
// starting with '#' are skipped. `source_name` is used in error messages.
EventLog ingest_events(std::istream& in, const std::string& source_name);
EventLog ingest_events_file(const std::filesystem::path& path);

// Reads `item_id<TAB>entity_token` records against an existing vocabulary.
// Unknown item ids are skipped and counted.
ContentBags ingest_content(std::istream& in, const std::string& source_name, const Vocabulary& vocab);
ContentBags ingest_content_file(const std::filesystem::path& path, const Vocabulary& vocab);

// Permutes each user's items with a per-user seeded RNG, cuts the list at
// `ratio`, and emits consecutive pairs inside each segment. Deterministic
// function of (user_items, ratio, seed).
PairSplit split_pairs(const std::vector<std::vector<ItemIndex>>& user_items, double ratio,
                      std::uint64_t seed);

// Consecutive pairs of one segment: [a,b,c] -> (a,b),(b,c).
std::vector<ItemPair> consecutive_pairs(std::span<const ItemIndex> segment);

// Nearest-rank percentile of a frequency vector, q in (0,100).
std::uint32_t support_percentile(std::span<const std::uint32_t> freq, double q);

void save_vocabulary(const Vocabulary&, const std::filesystem::path&);
Vocabulary load_vocabulary(const std::filesystem::path&);
void save_interactions(const InteractionStore&, const std::filesystem::path&);
InteractionStore load_interactions(const std::filesystem::path&);
void save_split(const PairSplit&, const std::filesystem::path&);
PairSplit load_split(const std::filesystem::path&);
void save_content(const ContentBags&, const std::filesystem::path&);
ContentBags load_content(const std::filesystem::path&);

}  // namespace i2i
