#include "tqn/binary_io.hpp"

#include <bit>
#include <cstring>

namespace tqn {

namespace {

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

}  // namespace

void LeWriter::bytes(const unsigned char* p, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw IoError("write failed");
}

void LeWriter::magic(std::string_view tag) {
    bytes(reinterpret_cast<const unsigned char*>(tag.data()), tag.size());
}

void LeWriter::u32(std::uint32_t v) {
    v = to_little(v);
    bytes(reinterpret_cast<const unsigned char*>(&v), sizeof v);
}

void LeWriter::u64(std::uint64_t v) {
    v = to_little(v);
    bytes(reinterpret_cast<const unsigned char*>(&v), sizeof v);
}

void LeWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
void LeWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void LeReader::bytes(unsigned char* p, std::size_t n) {
    in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
        throw FormatError(what_ + ": truncated at byte offset " + std::to_string(offset_));
    }
    offset_ += n;
}

void LeReader::expect_magic(std::string_view tag) {
    std::string got(tag.size(), '\0');
    bytes(reinterpret_cast<unsigned char*>(got.data()), got.size());
    if (got != tag) {
        throw FormatError(what_ + ": bad magic at byte offset 0 (expected '" + std::string(tag) + "')");
    }
}

std::uint32_t LeReader::u32() {
    std::uint32_t v;
    bytes(reinterpret_cast<unsigned char*>(&v), sizeof v);
    return to_little(v);
}

std::uint64_t LeReader::u64() {
    std::uint64_t v;
    bytes(reinterpret_cast<unsigned char*>(&v), sizeof v);
    return to_little(v);
}

float LeReader::f32() { return std::bit_cast<float>(u32()); }
double LeReader::f64() { return std::bit_cast<double>(u64()); }

void LeReader::expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
        throw FormatError(what_ + ": trailing bytes at offset " + std::to_string(offset_));
    }
}

}  // namespace tqn
