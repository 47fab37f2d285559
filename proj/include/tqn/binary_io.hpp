#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tqn {

/// Malformed file contents. The message names the offending line or byte offset.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Little-endian primitive writer.
class LeWriter {
public:
    explicit LeWriter(std::ostream& out) : out_(out) {}
    void magic(std::string_view tag);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);

private:
    void bytes(const unsigned char* p, std::size_t n);
    std::ostream& out_;
};

/// Little-endian primitive reader; short reads raise FormatError with the offset.
class LeReader {
public:
    LeReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}
    void expect_magic(std::string_view tag);
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    double f64();
    std::uint64_t offset() const { return offset_; }
    /// Throws unless the stream is exhausted.
    void expect_end();

private:
    void bytes(unsigned char* p, std::size_t n);
    std::istream& in_;
    std::string what_;
    std::uint64_t offset_ = 0;
};

}  // namespace tqn
