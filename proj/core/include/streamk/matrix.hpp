#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "streamk/types.hpp"

namespace streamk {

/// Dense row-major matrix.
template <typename T>
struct Matrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(index_t r, index_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c)) {}

  T& at(index_t r, index_t c) { return data[static_cast<std::size_t>(r * cols + c)]; }
  const T& at(index_t r, index_t c) const {
    return data[static_cast<std::size_t>(r * cols + c)];
  }
};

template <typename T>
constexpr DType dtype_of() {
  if constexpr (std::is_same_v<T, std::int64_t>) return DType::Int64;
  else if constexpr (std::is_same_v<T, float>) return DType::Float32;
  else return DType::Float64;
}

/// splitmix64: the generator behind deterministic matrix fill. Fully
/// specified, so golden results reproduce across implementations.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 bits of entropy.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Seeded fill: int64 values uniform in [-64, 63], floats uniform in [-1, 1).
template <typename T>
Matrix<T> random_matrix(index_t rows, index_t cols, std::uint64_t seed) {
  Matrix<T> m(rows, cols);
  SplitMix64 rng(seed);
  for (auto& v : m.data) {
    if constexpr (std::is_same_v<T, std::int64_t>) {
      v = static_cast<std::int64_t>(rng.next() & 0x7f) - 64;
    } else {
      v = static_cast<T>(rng.next_double() * 2.0 - 1.0);
    }
  }
  return m;
}

namespace detail {
void write_matrix_header(std::ostream& out, DType dtype, index_t rows, index_t cols);
void read_matrix_header(std::istream& in, DType expect, index_t* rows, index_t* cols);
void write_le_bytes(std::ostream& out, const void* data, std::size_t count,
                    std::size_t elem_size);
void read_le_bytes(std::istream& in, void* data, std::size_t count, std::size_t elem_size);
}  // namespace detail

/// Raw little-endian binary with a 16-byte header: magic "SKMX", u32 dtype
/// tag, u32 rows, u32 cols.
template <typename T>
void save_matrix(const Matrix<T>& m, std::ostream& out) {
  detail::write_matrix_header(out, dtype_of<T>(), m.rows, m.cols);
  detail::write_le_bytes(out, m.data.data(), m.data.size(), sizeof(T));
}

template <typename T>
Matrix<T> load_matrix(std::istream& in) {
  index_t rows = 0, cols = 0;
  detail::read_matrix_header(in, dtype_of<T>(), &rows, &cols);
  Matrix<T> m(rows, cols);
  detail::read_le_bytes(in, m.data.data(), m.data.size(), sizeof(T));
  return m;
}

}  // namespace streamk
