#include "rhstrng/bitstream_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace rhstrng {

namespace {

constexpr std::size_t kAsciiLineWidth = 64;

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool looks_ascii(const std::vector<std::uint8_t>& data) {
  if (data.empty()) return false;
  return std::all_of(data.begin(), data.end(), [](std::uint8_t c) { return c == '0' || c == '1' || std::isspace(c); });
}

}  // namespace

BitFormat parse_bit_format(const std::string& name) {
  if (name == "packed" || name == "bin") return BitFormat::Packed;
  if (name == "ascii" || name == "txt") return BitFormat::Ascii;
  if (name == "auto") return BitFormat::Auto;
  throw std::invalid_argument("unknown bit format '" + name + "' (expected packed, ascii or auto)");
}

std::vector<std::uint8_t> pack_bits(const std::vector<std::uint8_t>& bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return bytes;
}

std::vector<std::uint8_t> unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n_bits) {
  n_bits = std::min(n_bits, bytes.size() * 8);
  std::vector<std::uint8_t> bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) bits[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  return bits;
}

void write_bits(const std::filesystem::path& path, const std::vector<std::uint8_t>& bits, BitFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  if (format == BitFormat::Ascii) {
    std::string line;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      line.push_back(bits[i] ? '1' : '0');
      if (line.size() == kAsciiLineWidth || i + 1 == bits.size()) {
        out << line << '\n';
        line.clear();
      }
    }
  } else {
    const auto bytes = pack_bits(bits);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<std::uint8_t> read_bits(const std::filesystem::path& path, BitFormat format,
                                    std::optional<std::size_t> max_bits) {
  const auto data = slurp(path);
  if (format == BitFormat::Auto) format = looks_ascii(data) ? BitFormat::Ascii : BitFormat::Packed;
  std::vector<std::uint8_t> bits;
  if (format == BitFormat::Ascii) {
    bits.reserve(data.size());
    for (std::uint8_t c : data) {
      if (c == '0' || c == '1') {
        bits.push_back(c - '0');
      } else if (!std::isspace(c)) {
        throw std::runtime_error("'" + path.string() + "' is not an ASCII 0/1 stream");
      }
    }
  } else {
    bits = unpack_bits(data, data.size() * 8);
  }
  if (max_bits && bits.size() > *max_bits) bits.resize(*max_bits);
  return bits;
}

}  // namespace rhstrng
