#include "i2i/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "i2i/io.hpp"
#include "i2i/rng.hpp"

namespace i2i {

namespace {

// Vocabularies up to this size keep pair counts in a dense lower triangle
// (MovieLens-sized data); larger ones fall back to a hash map.
constexpr std::size_t kDensePairLimit = 6000;

struct Line {
    std::string text;
    std::size_t number = 0;
};

bool next_record(std::istream& in, Line& line) {
    while (std::getline(in, line.text)) {
        ++line.number;
        if (!line.text.empty() && line.text.back() == '\r') line.text.pop_back();
        if (line.text.empty() || line.text[0] == '#') continue;
        return true;
    }
    return false;
}

// Splits at the first two tabs; the second field may be followed by ignored
// columns.
bool split_two_fields(const std::string& text, std::string& a, std::string& b) {
    const auto tab = text.find('\t');
    if (tab == std::string::npos || tab == 0) return false;
    auto end = text.find('\t', tab + 1);
    if (end == std::string::npos) end = text.size();
    if (end == tab + 1) return false;
    a = text.substr(0, tab);
    b = text.substr(tab + 1, end - tab - 1);
    return true;
}

}  // namespace

ItemIndex Vocabulary::intern(const std::string& external_id) {
    auto it = index_.find(external_id);
    if (it != index_.end()) return it->second;
    const auto idx = static_cast<ItemIndex>(names_.size());
    names_.push_back(external_id);
    index_.emplace(external_id, idx);
    return idx;
}

std::optional<ItemIndex> Vocabulary::find(const std::string& external_id) const {
    auto it = index_.find(external_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& Vocabulary::name(ItemIndex idx) const {
    return names_.at(static_cast<std::size_t>(idx));
}

std::size_t InteractionStore::tri_offset(ItemIndex i, ItemIndex j) const {
    // Lower triangle, row > col.
    const auto row = static_cast<std::size_t>(std::max(i, j));
    const auto col = static_cast<std::size_t>(std::min(i, j));
    return row * (row - 1) / 2 + col;
}

void InteractionStore::add_pair(ItemIndex i, ItemIndex j) {
    if (dense_)
        ++dense_pairs_[tri_offset(i, j)];
    else
        ++sparse_pairs_[pack_pair(i, j)];
}

std::uint32_t InteractionStore::pair_frequency(ItemIndex i, ItemIndex j) const {
    if (i == j) throw DataError("pair_frequency: self pair is undefined");
    if (dense_) return dense_pairs_[tri_offset(i, j)];
    auto it = sparse_pairs_.find(pack_pair(i, j));
    return it == sparse_pairs_.end() ? 0u : it->second;
}

std::size_t InteractionStore::stored_pair_count() const {
    if (!dense_) return sparse_pairs_.size();
    return static_cast<std::size_t>(std::count_if(dense_pairs_.begin(), dense_pairs_.end(),
                                                  [](std::uint32_t c) { return c > 0; }));
}

InteractionStore InteractionStore::from_user_items(
    const std::vector<std::vector<ItemIndex>>& user_items, std::size_t item_count) {
    InteractionStore store;
    store.freq_.assign(item_count, 0);
    store.user_items_ = user_items;
    store.dense_ = item_count <= kDensePairLimit;
    if (store.dense_) store.dense_pairs_.assign(item_count * (item_count - 1) / 2, 0);

    for (const auto& items : user_items) {
        for (std::size_t a = 0; a < items.size(); ++a) {
            ++store.freq_[static_cast<std::size_t>(items[a])];
            for (std::size_t b = a + 1; b < items.size(); ++b)
                store.add_pair(items[a], items[b]);
        }
    }
    return store;
}

std::vector<std::pair<ItemPair, std::uint32_t>> InteractionStore::sorted_pairs() const {
    std::vector<std::pair<ItemPair, std::uint32_t>> out;
    if (dense_) {
        for (ItemIndex row = 1; static_cast<std::size_t>(row) < freq_.size(); ++row)
            for (ItemIndex col = 0; col < row; ++col) {
                const auto c = dense_pairs_[tri_offset(row, col)];
                if (c > 0) out.push_back({{col, row}, c});
            }
    } else {
        out.reserve(sparse_pairs_.size());
        for (const auto& [key, count] : sparse_pairs_)
            out.push_back({{static_cast<ItemIndex>(key >> 32),
                            static_cast<ItemIndex>(key & 0xffffffffu)},
                           count});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.first.first != b.first.first ? a.first.first < b.first.first
                                              : a.first.second < b.first.second;
    });
    return out;
}

EventLog ingest_events(std::istream& in, const std::string& source_name) {
    EventLog log;
    std::unordered_map<std::string, std::size_t> user_index;
    std::vector<std::unordered_set<ItemIndex>> seen;

    Line line;
    std::size_t records = 0;
    while (next_record(in, line)) {
        std::string user, item;
        if (!split_two_fields(line.text, user, item))
            throw DataError(source_name + ":" + std::to_string(line.number) +
                            ": expected user_id<TAB>item_id");
        ++records;
        auto [it, inserted] = user_index.emplace(user, log.user_items.size());
        if (inserted) {
            log.user_items.emplace_back();
            seen.emplace_back();
        }
        const std::size_t u = it->second;
        const ItemIndex idx = log.vocab.intern(item);
        // Repeated (user, item) events count once.
        if (seen[u].insert(idx).second) log.user_items[u].push_back(idx);
    }
    if (records == 0) throw DataError(source_name + ": no event records");
    return log;
}

EventLog ingest_events_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open");
    return ingest_events(in, path.string());
}

ContentBags ingest_content(std::istream& in, const std::string& source_name,
                           const Vocabulary& vocab) {
    ContentBags bags;
    bags.bags.resize(vocab.size());
    std::unordered_map<std::string, std::int32_t> token_index;

    Line line;
    while (next_record(in, line)) {
        std::string item, token;
        if (!split_two_fields(line.text, item, token))
            throw DataError(source_name + ":" + std::to_string(line.number) +
                            ": expected item_id<TAB>entity_token");
        const auto idx = vocab.find(item);
        if (!idx) {
            ++bags.skipped_unknown_items;
            continue;
        }
        auto [it, inserted] = token_index.emplace(token, static_cast<std::int32_t>(bags.token_names.size()));
        if (inserted) bags.token_names.push_back(token);
        bags.bags[static_cast<std::size_t>(*idx)].push_back(it->second);
    }
    for (auto& bag : bags.bags) {
        std::sort(bag.begin(), bag.end());
        bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
    }
    return bags;
}

ContentBags ingest_content_file(const std::filesystem::path& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) throw DataError(path.string() + ": cannot open");
    return ingest_content(in, path.string(), vocab);
}

std::vector<ItemPair> consecutive_pairs(std::span<const ItemIndex> segment) {
    std::vector<ItemPair> pairs;
    if (segment.size() < 2) return pairs;
    pairs.reserve(segment.size() - 1);
    for (std::size_t i = 0; i + 1 < segment.size(); ++i)
        pairs.push_back({segment[i], segment[i + 1]});
    return pairs;
}

PairSplit split_pairs(const std::vector<std::vector<ItemIndex>>& user_items, double ratio,
                      std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw DataError("split ratio must be in (0,1)");

    PairSplit split;
    split.seed = seed;
    split.ratio = ratio;
    split.training_segments.reserve(user_items.size());

    for (std::size_t u = 0; u < user_items.size(); ++u) {
        std::vector<ItemIndex> items = user_items[u];
        Rng rng(derive_seed(seed, u));
        shuffle(items, rng);

        const auto cut = static_cast<std::size_t>(
            std::floor(ratio * static_cast<double>(items.size())));
        const std::span<const ItemIndex> train(items.data(), cut);
        const std::span<const ItemIndex> test(items.data() + cut, items.size() - cut);

        for (const auto& p : consecutive_pairs(train)) split.training.push_back(p);
        for (const auto& p : consecutive_pairs(test)) split.testing.push_back(p);
        split.training_segments.emplace_back(train.begin(), train.end());
    }
    return split;
}

std::uint32_t support_percentile(std::span<const std::uint32_t> freq, double q) {
    if (freq.empty()) throw DataError("support_percentile: empty frequency vector");
    if (!(q > 0.0 && q < 100.0)) throw DataError("support_percentile: q must be in (0,100)");
    std::vector<std::uint32_t> sorted(freq.begin(), freq.end());
    std::sort(sorted.begin(), sorted.end());
    // Nearest-rank: smallest value with at least q per cent of mass at or below it.
    auto rank = static_cast<std::size_t>(
        std::ceil(q / 100.0 * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
    BinaryWriter w(path);
    w.header(FileKind::vocabulary);
    w.u64(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) w.str(vocab.name(static_cast<ItemIndex>(i)));
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
    BinaryReader r(path);
    r.header(FileKind::vocabulary);
    const std::uint64_t n = r.u64();
    Vocabulary vocab;
    for (std::uint64_t i = 0; i < n; ++i) vocab.intern(r.str());
    if (vocab.size() != n) throw DataError(path.string() + ": duplicate vocabulary entries");
    return vocab;
}

void save_interactions(const InteractionStore& store, const std::filesystem::path& path) {
    BinaryWriter w(path);
    w.header(FileKind::interactions);
    w.u64(store.item_count());
    for (auto f : store.frequencies()) w.u32(f);
    const auto pairs = store.sorted_pairs();
    w.u64(pairs.size());
    for (const auto& [pair, count] : pairs) {
        w.i32(pair.first);
        w.i32(pair.second);
        w.u32(count);
    }
    w.u64(store.user_count());
    for (const auto& items : store.user_items()) {
        w.u64(items.size());
        for (auto idx : items) w.i32(idx);
    }
}

InteractionStore load_interactions(const std::filesystem::path& path) {
    BinaryReader r(path);
    r.header(FileKind::interactions);
    const std::uint64_t item_count = r.u64();
    std::vector<std::uint32_t> freq(item_count);
    for (auto& f : freq) f = r.u32();
    const std::uint64_t pair_count = r.u64();
    std::vector<std::pair<ItemPair, std::uint32_t>> pairs(pair_count);
    for (auto& [pair, count] : pairs) {
        pair.first = r.i32();
        pair.second = r.i32();
        count = r.u32();
    }
    const std::uint64_t user_count = r.u64();
    std::vector<std::vector<ItemIndex>> user_items(user_count);
    for (auto& items : user_items) {
        items.resize(r.u64());
        for (auto& idx : items) idx = r.i32();
    }
    // Rebuilding from the user lists reproduces the counts; the serialized
    // freq/pair sections double as a consistency check.
    InteractionStore store = InteractionStore::from_user_items(user_items, item_count);
    if (store.frequencies() != freq || store.sorted_pairs() != pairs)
        throw DataError(path.string() + ": inconsistent interaction statistics");
    return store;
}

void save_split(const PairSplit& split, const std::filesystem::path& path) {
    BinaryWriter w(path);
    w.header(FileKind::split);
    w.u64(split.seed);
    w.f64(split.ratio);
    auto write_pairs = [&w](const std::vector<ItemPair>& pairs) {
        w.u64(pairs.size());
        for (const auto& p : pairs) {
            w.i32(p.first);
            w.i32(p.second);
        }
    };
    write_pairs(split.training);
    write_pairs(split.testing);
    w.u64(split.training_segments.size());
    for (const auto& seg : split.training_segments) {
        w.u64(seg.size());
        for (auto idx : seg) w.i32(idx);
    }
}

PairSplit load_split(const std::filesystem::path& path) {
    BinaryReader r(path);
    r.header(FileKind::split);
    PairSplit split;
    split.seed = r.u64();
    split.ratio = r.f64();
    auto read_pairs = [&r](std::vector<ItemPair>& pairs) {
        pairs.resize(r.u64());
        for (auto& p : pairs) {
            p.first = r.i32();
            p.second = r.i32();
        }
    };
    read_pairs(split.training);
    read_pairs(split.testing);
    split.training_segments.resize(r.u64());
    for (auto& seg : split.training_segments) {
        seg.resize(r.u64());
        for (auto& idx : seg) idx = r.i32();
    }
    return split;
}

void save_content(const ContentBags& bags, const std::filesystem::path& path) {
    BinaryWriter w(path);
    w.header(FileKind::content);
    w.u64(bags.token_names.size());
    for (const auto& t : bags.token_names) w.str(t);
    w.u64(bags.bags.size());
    for (const auto& bag : bags.bags) {
        w.u64(bag.size());
        for (auto t : bag) w.i32(t);
    }
    w.u64(bags.skipped_unknown_items);
}

ContentBags load_content(const std::filesystem::path& path) {
    BinaryReader r(path);
    r.header(FileKind::content);
    ContentBags bags;
    bags.token_names.resize(r.u64());
    for (auto& t : bags.token_names) t = r.str();
    bags.bags.resize(r.u64());
    for (auto& bag : bags.bags) {
        bag.resize(r.u64());
        for (auto& t : bag) t = r.i32();
    }
    bags.skipped_unknown_items = r.u64();
    return bags;
}

}  // namespace i2i
