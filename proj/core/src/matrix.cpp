#include "streamk/matrix.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace streamk::detail {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'K', 'M', 'X'};

void write_u32_le(std::ostream& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_matrix_header(std::ostream& out, DType dtype, index_t rows, index_t cols) {
  out.write(kMagic.data(), kMagic.size());
  write_u32_le(out, static_cast<std::uint32_t>(dtype));
  write_u32_le(out, static_cast<std::uint32_t>(rows));
  write_u32_le(out, static_cast<std::uint32_t>(cols));
}

void read_matrix_header(std::istream& in, DType expect, index_t* rows, index_t* cols) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("matrix file: bad magic");
  const auto tag = static_cast<DType>(read_u32_le(in));
  if (tag != expect) {
    throw std::runtime_error(std::string("matrix file: dtype is ") + dtype_name(tag) +
                             ", expected " + dtype_name(expect));
  }
  *rows = read_u32_le(in);
  *cols = read_u32_le(in);
  if (!in) throw std::runtime_error("matrix file: truncated header");
}

void write_le_bytes(std::ostream& out, const void* data, std::size_t count,
                    std::size_t elem_size) {
  static_assert(std::endian::native == std::endian::little,
                "big-endian hosts need byte swapping here");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(count * elem_size));
}

void read_le_bytes(std::istream& in, void* data, std::size_t count, std::size_t elem_size) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(count * elem_size));
  if (!in) throw std::runtime_error("matrix file: truncated payload");
}

}  // namespace streamk::detail
