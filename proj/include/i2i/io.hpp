#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "i2i/common.hpp"

namespace i2i {

// All serialized artifacts share a 5-byte magic, a format version and a
// section kind, then little-endian fixed-width payload. Doubles are stored
// as raw IEEE-754 bits so files round-trip bit-exactly.
inline constexpr char kMagic[5] = {'F', 'I', '2', 'I', '1'};
inline constexpr std::uint8_t kFormatVersion = 1;

enum class FileKind : std::uint8_t {
    vocabulary = 1,
    interactions = 2,
    content = 3,
    split = 4,
    fisher = 5,
    eir = 6,
};

class BinaryWriter {
public:
    explicit BinaryWriter(const std::filesystem::path& path);

    void header(FileKind kind);
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v);
    void str(const std::string& s);

    template <typename T>
    void f64_array(const std::vector<T>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }

private:
    std::ofstream out_;
    std::string path_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::filesystem::path& path);

    // Validates magic/version and that the file holds the expected kind.
    void header(FileKind expected);
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64();
    std::string str();
    std::vector<double> f64_array();

private:
    std::ifstream in_;
    std::string path_;
};

}  // namespace i2i
