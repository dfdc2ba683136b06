#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "translum/bitstream.hpp"
#include "translum/errors.hpp"

namespace translum {

inline constexpr std::size_t kPrefixBits = 32;        // four repeats of the 8-bit pattern
inline constexpr std::size_t kDefaultPayloadBits = 1520;  // 190 bytes

/// Transmit frame: 32-bit prefix (pattern repeated four times) then payload.
struct Frame {
    std::uint8_t pattern = 0xA5;
    std::vector<std::uint8_t> payload;

    /// Frame bits in transmit order, MSB-first within each byte.
    BitStream bits() const {
        std::vector<std::uint8_t> bytes;
        bytes.reserve(4 + payload.size());
        for (int i = 0; i < 4; ++i) bytes.push_back(pattern);
        bytes.insert(bytes.end(), payload.begin(), payload.end());
        return BitStream::from_bytes(bytes);
    }

    std::size_t bit_length() const { return kPrefixBits + 8 * payload.size(); }
};

inline Frame build_frame(std::span<const std::uint8_t> payload, std::uint8_t pattern) {
    if (payload.empty()) throw std::invalid_argument("build_frame: payload must be non-empty");
    return Frame{pattern, std::vector<std::uint8_t>(payload.begin(), payload.end())};
}

/**
 * Earliest bit offset at which the full 32-bit prefix occurs. The payload
 * starts 32 bits after the returned offset.
 *
 * Throws sync_failure_error when no full match exists; callers count that
 * frame as lost.
 */
inline std::size_t locate_prefix(const BitStream& bits, std::uint8_t pattern) {
    if (bits.size() < kPrefixBits) throw sync_failure_error("locate_prefix: stream shorter than prefix");
    const std::uint32_t target = 0x01010101u * pattern;
    std::uint32_t window = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        window = (window << 1) | bits[i];
        if (i + 1 >= kPrefixBits && window == target) return i + 1 - kPrefixBits;
    }
    throw sync_failure_error("locate_prefix: prefix pattern not found");
}

/// The n payload bits that follow the prefix located at `offset`.
inline BitStream extract_payload(const BitStream& bits, std::size_t offset,
                                 std::size_t n = kDefaultPayloadBits) {
    if (offset + kPrefixBits + n > bits.size())
        throw truncated_frame_error("extract_payload: fewer than " + std::to_string(n) +
                                    " bits after prefix");
    return bits.slice(offset + kPrefixBits, n);
}

}  // namespace translum
