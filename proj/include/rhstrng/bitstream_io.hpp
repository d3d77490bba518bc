#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rhstrng {

enum class BitFormat { Packed, Ascii, Auto };

BitFormat parse_bit_format(const std::string& name);

/// Packs 8 bits per byte, first bit in the least significant position.
std::vector<std::uint8_t> pack_bits(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n_bits);

void write_bits(const std::filesystem::path& path, const std::vector<std::uint8_t>& bits, BitFormat format);

/// Reads a packed or ASCII ('0'/'1', whitespace ignored) stream. Auto treats
/// the file as ASCII when it holds only 0/1 characters and whitespace.
/// `max_bits` truncates. Throws std::runtime_error on I/O or format errors.
std::vector<std::uint8_t> read_bits(const std::filesystem::path& path, BitFormat format,
                                    std::optional<std::size_t> max_bits = std::nullopt);

}  // namespace rhstrng
