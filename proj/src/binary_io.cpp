#include "roughcalib/binary_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <istream>
#include <ostream>
#include <string_view>

#include "roughcalib/error.hpp"

namespace roughcalib::io {

namespace {

std::array<char, 8> to_le(std::uint64_t bits) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffU);
  return bytes;
}

std::uint64_t from_le(const std::array<char, 8>& bytes) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  }
  return bits;
}

}  // namespace

void write_f64(std::ostream& out, std::span<const double> values) {
  for (double v : values) {
    const auto bytes = to_le(std::bit_cast<std::uint64_t>(v));
    out.write(bytes.data(), bytes.size());
  }
}

void write_u64(std::ostream& out, std::uint64_t value) {
  const auto bytes = to_le(value);
  out.write(bytes.data(), bytes.size());
}

void read_f64(std::istream& in, std::span<double> values) {
  std::array<char, 8> bytes{};
  for (double& v : values) {
    if (!in.read(bytes.data(), bytes.size())) throw LoadError("unexpected end of binary data");
    v = std::bit_cast<double>(from_le(bytes));
  }
}

std::uint64_t read_u64(std::istream& in) {
  std::array<char, 8> bytes{};
  if (!in.read(bytes.data(), bytes.size())) throw LoadError("unexpected end of binary data");
  return from_le(bytes);
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw std::invalid_argument("not a number: '" + text + "'");
  return value;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace roughcalib::io
