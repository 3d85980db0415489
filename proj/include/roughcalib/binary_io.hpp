#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace roughcalib::io {

// Little-endian IEEE-754 / two's-complement encoding regardless of host order.
void write_f64(std::ostream& out, std::span<const double> values);
void write_u64(std::ostream& out, std::uint64_t value);

// Throw LoadError on short reads.
void read_f64(std::istream& in, std::span<double> values);
std::uint64_t read_u64(std::istream& in);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

// FNV-1a, used for configuration digests.
std::uint64_t fnv1a(std::string_view text);

}  // namespace roughcalib::io
