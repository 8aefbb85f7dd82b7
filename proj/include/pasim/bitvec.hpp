#ifndef PASIM_BITVEC_HPP
#define PASIM_BITVEC_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace pasim {

// Fixed-width bit vector (register / accumulator state). Width is set at
// construction; the top word is kept masked.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(unsigned width) : width_(width), words_((width + 63) / 64, 0) {}

    static BitVec fromU64(unsigned width, std::uint64_t v) {
        BitVec b(width);
        if (!b.words_.empty()) {
            b.words_[0] = v;
            b.maskTop();
        }
        return b;
    }

    // XOR-fold a 64-bit value into `width` bits (zero-extends when
    // width >= 64).
    static BitVec fold(unsigned width, std::uint64_t v) {
        if (width >= 64)
            return fromU64(width, v);
        std::uint64_t mask = (std::uint64_t(1) << width) - 1;
        std::uint64_t acc = 0;
        while (v) {
            acc ^= v & mask;
            v >>= width;
        }
        return fromU64(width, acc);
    }

    unsigned width() const { return width_; }

    bool get(unsigned i) const { return (words_[i / 64] >> (i % 64)) & 1; }
    void set(unsigned i) { words_[i / 64] |= std::uint64_t(1) << (i % 64); }

    bool isZero() const {
        for (auto w : words_)
            if (w)
                return false;
        return true;
    }

    BitVec &operator^=(const BitVec &o) {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] ^= o.words_[i];
        return *this;
    }

    BitVec operator&(const BitVec &o) const {
        BitVec r = *this;
        for (std::size_t i = 0; i < r.words_.size(); ++i)
            r.words_[i] &= o.words_[i];
        return r;
    }

    bool operator==(const BitVec &o) const {
        return width_ == o.width_ && words_ == o.words_;
    }
    bool operator!=(const BitVec &o) const { return !(*this == o); }

    // Rotate left by one within the width.
    void rotl1() {
        bool top = get(width_ - 1);
        std::uint64_t carry = 0;
        for (auto &w : words_) {
            std::uint64_t next = w >> 63;
            w = (w << 1) | carry;
            carry = next;
        }
        maskTop();
        if (top)
            words_[0] |= 1;
    }

    // Shift right by one, returning the bit shifted out.
    bool shr1() {
        bool out = get(0);
        for (std::size_t i = 0; i + 1 < words_.size(); ++i)
            words_[i] = (words_[i] >> 1) | (words_[i + 1] << 63);
        words_.back() >>= 1;
        return out;
    }

    unsigned popcount() const {
        unsigned n = 0;
        for (auto w : words_)
            n += static_cast<unsigned>(std::popcount(w));
        return n;
    }

    // Little-endian bytes, width/8 bytes (width must be a multiple of 8).
    std::vector<std::uint8_t> toBytes() const {
        std::vector<std::uint8_t> out(width_ / 8);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = static_cast<std::uint8_t>(words_[i / 8] >> ((i % 8) * 8));
        return out;
    }

    static BitVec fromBytes(const std::uint8_t *data, std::size_t len) {
        BitVec b(static_cast<unsigned>(len * 8));
        for (std::size_t i = 0; i < len; ++i)
            b.words_[i / 8] |= static_cast<std::uint64_t>(data[i]) << ((i % 8) * 8);
        return b;
    }

  private:
    void maskTop() {
        unsigned rem = width_ % 64;
        if (rem && !words_.empty())
            words_.back() &= (std::uint64_t(1) << rem) - 1;
    }

    unsigned width_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace pasim

#endif
