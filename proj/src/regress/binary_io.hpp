#pragma once

// Little-endian primitives for the model artifact.

#include "tafs/error.hpp"
#include "tafs/linalg.hpp"

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace tafs::regress::io {

inline void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    }
    out.write(bytes, 8);
}

inline std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
        throw IoError("truncated model artifact");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    }
    return v;
}

inline void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

inline std::uint8_t get_u8(std::istream& in) {
    char c = 0;
    if (!in.get(c)) {
        throw IoError("truncated model artifact");
    }
    return static_cast<std::uint8_t>(c);
}

inline void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

inline std::size_t get_size(std::istream& in, std::size_t limit = std::size_t{1} << 34) {
    const auto v = get_u64(in);
    if (v > limit) {
        throw IoError("corrupt model artifact (size field too large)");
    }
    return static_cast<std::size_t>(v);
}

inline void put_doubles(std::ostream& out, const double* data, std::size_t n) {
    put_u64(out, n);
    for (std::size_t i = 0; i < n; ++i) {
        put_f64(out, data[i]);
    }
}

inline std::vector<double> get_doubles(std::istream& in) {
    std::vector<double> v(get_size(in));
    for (auto& x : v) {
        x = get_f64(in);
    }
    return v;
}

inline void put_vector(std::ostream& out, const Vector& v) {
    put_doubles(out, v.data(), static_cast<std::size_t>(v.size()));
}

inline Vector get_vector(std::istream& in) {
    const auto values = get_doubles(in);
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline void put_matrix(std::ostream& out, const Matrix& m) {
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            put_f64(out, m(r, c));
        }
    }
}

inline Matrix get_matrix(std::istream& in) {
    const auto rows = static_cast<Eigen::Index>(get_size(in));
    const auto cols = static_cast<Eigen::Index>(get_size(in));
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = get_f64(in);
        }
    }
    return m;
}

}  // namespace tafs::regress::io
