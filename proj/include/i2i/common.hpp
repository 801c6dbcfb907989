#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace i2i {

// Dense item index, 0..M-1. External string ids map to these via Vocabulary.
using ItemIndex = std::int32_t;

struct ItemPair {
    ItemIndex first = 0;
    ItemIndex second = 0;

    friend bool operator==(const ItemPair&, const ItemPair&) = default;
};

// Bad or inconsistent input data (unparseable files, unknown items, ...).
// CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure (diverged training, non-finite values). Exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Symmetric pair key: smaller index in the high word.
inline std::uint64_t pack_pair(ItemIndex i, ItemIndex j) {
    const std::uint64_t a = static_cast<std::uint32_t>(i < j ? i : j);
    const std::uint64_t b = static_cast<std::uint32_t>(i < j ? j : i);
    return (a << 32) | b;
}

}  // namespace i2i
