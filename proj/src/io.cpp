#include "i2i/io.hpp"

#include <bit>
#include <cstring>

namespace i2i {

namespace {

void put_le(std::ofstream& out, std::uint64_t v, int bytes) {
    char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, bytes);
}

std::uint64_t get_le(std::ifstream& in, int bytes, const std::string& path) {
    unsigned char buf[8] = {0};
    in.read(reinterpret_cast<char*>(buf), bytes);
    if (!in) throw DataError(path + ": truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary), path_(path.string()) {
    if (!out_) throw DataError(path_ + ": cannot open for writing");
}

void BinaryWriter::header(FileKind kind) {
    out_.write(kMagic, sizeof(kMagic));
    u8(kFormatVersion);
    u8(static_cast<std::uint8_t>(kind));
}

void BinaryWriter::u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
void BinaryWriter::u32(std::uint32_t v) { put_le(out_, v, 4); }
void BinaryWriter::u64(std::uint64_t v) { put_le(out_, v, 8); }

void BinaryWriter::f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u64(bits);
}

void BinaryWriter::str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary), path_(path.string()) {
    if (!in_) throw DataError(path_ + ": cannot open");
}

void BinaryReader::header(FileKind expected) {
    char magic[5];
    in_.read(magic, sizeof(magic));
    if (!in_ || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError(path_ + ": not a FI2I1 file");
    const std::uint8_t version = u8();
    if (version != kFormatVersion)
        throw DataError(path_ + ": unsupported format version " + std::to_string(version));
    const std::uint8_t kind = u8();
    if (kind != static_cast<std::uint8_t>(expected))
        throw DataError(path_ + ": unexpected file kind " + std::to_string(kind));
}

std::uint8_t BinaryReader::u8() { return static_cast<std::uint8_t>(get_le(in_, 1, path_)); }
std::uint32_t BinaryReader::u32() { return static_cast<std::uint32_t>(get_le(in_, 4, path_)); }
std::uint64_t BinaryReader::u64() { return get_le(in_, 8, path_); }

double BinaryReader::f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

std::string BinaryReader::str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (!in_) throw DataError(path_ + ": truncated string");
    return s;
}

std::vector<double> BinaryReader::f64_array() {
    const std::uint64_t n = u64();
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
}

}  // namespace i2i
