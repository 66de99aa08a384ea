#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "elmkit/errors.hpp"

namespace elmkit {

// Little-endian binary primitives shared by every file format in the
// project. Floats round-trip bit-exactly via their IEEE-754 bit patterns.

class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw DataError("cannot open for writing: " + path);
    }

    void write_bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), std::streamsize(n));
    }

    void write_magic(std::string_view magic) { write_bytes(magic.data(), magic.size()); }

    void write_u32(std::uint32_t v) {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
        write_bytes(b, 4);
    }

    void write_u64(std::uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
        write_bytes(b, 8);
    }

    void write_f64(double v) { write_u64(std::bit_cast<std::uint64_t>(v)); }
    void write_f32(float v) { write_u32(std::bit_cast<std::uint32_t>(v)); }

    void write_f64_array(const double* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) write_f64(data[i]);
    }
    void write_f32_array(const float* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) write_f32(data[i]);
    }

    void close() {
        out_.close();
        if (!out_) throw DataError("write failed: " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path)
        : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw DataError("cannot open for reading: " + path);
    }

    void read_bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), std::streamsize(n));
        if (std::size_t(in_.gcount()) != n)
            throw FormatError("truncated file: " + path_);
    }

    /// Reads and checks a 4-byte magic; throws FormatError on mismatch.
    void expect_magic(std::string_view magic) {
        char got[8] = {};
        read_bytes(got, magic.size());
        if (std::string_view(got, magic.size()) != magic)
            throw FormatError("bad magic in " + path_ + " (expected " + std::string(magic) + ")");
    }

    std::uint32_t read_u32() {
        unsigned char b[4];
        read_bytes(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
        return v;
    }

    std::uint64_t read_u64() {
        unsigned char b[8];
        read_bytes(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
        return v;
    }

    double read_f64() { return std::bit_cast<double>(read_u64()); }
    float read_f32() { return std::bit_cast<float>(read_u32()); }

    void read_f64_array(double* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) data[i] = read_f64();
    }
    void read_f32_array(float* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) data[i] = read_f32();
    }

    /// True when every byte has been consumed.
    bool at_eof() {
        return in_.peek() == std::char_traits<char>::eof();
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
};

}  // namespace elmkit
