#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace translum {

/**
 * Ordered sequence of bits. Transmit order is index order; bytes expand
 * MSB-first so byte 0xA5 becomes bits 1,0,1,0,0,1,0,1.
 */
class BitStream {
public:
    BitStream() = default;
    explicit BitStream(std::size_t n, int fill = 0) : bits_(n, static_cast<std::uint8_t>(fill != 0)) {}

    static BitStream from_bytes(std::span<const std::uint8_t> bytes) {
        BitStream out;
        out.bits_.reserve(bytes.size() * 8);
        for (std::uint8_t b : bytes)
            for (int i = 7; i >= 0; --i) out.bits_.push_back((b >> i) & 1u);
        return out;
    }

    std::vector<std::uint8_t> to_bytes() const {
        if (bits_.size() % 8 != 0) throw std::invalid_argument("BitStream::to_bytes: size not a multiple of 8");
        std::vector<std::uint8_t> out(bits_.size() / 8, 0);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            out[i / 8] = static_cast<std::uint8_t>((out[i / 8] << 1) | bits_[i]);
        return out;
    }

    void push_back(int bit) { bits_.push_back(static_cast<std::uint8_t>(bit != 0)); }

    void append(const BitStream& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }

    BitStream slice(std::size_t pos, std::size_t n) const {
        if (pos + n > bits_.size()) throw std::out_of_range("BitStream::slice: range past end");
        BitStream out;
        out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                         bits_.begin() + static_cast<std::ptrdiff_t>(pos + n));
        return out;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    void set(std::size_t i, int bit) { bits_[i] = static_cast<std::uint8_t>(bit != 0); }
    void flip(std::size_t i) { bits_[i] ^= 1u; }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (std::uint8_t b : bits_) n += b;
        return n;
    }

    /// Number of differing positions; streams must be equal length.
    std::size_t hamming_distance(const BitStream& other) const {
        if (size() != other.size()) throw std::invalid_argument("hamming_distance: length mismatch");
        std::size_t n = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i) n += bits_[i] ^ other.bits_[i];
        return n;
    }

    bool operator==(const BitStream&) const = default;

    auto begin() const { return bits_.begin(); }
    auto end() const { return bits_.end(); }

private:
    std::vector<std::uint8_t> bits_;
};

}  // namespace translum
