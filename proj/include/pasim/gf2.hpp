#ifndef PASIM_GF2_HPP
#define PASIM_GF2_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pasim/bigint.hpp"
#include "pasim/rng.hpp"

namespace pasim::gf2 {

// Polynomial over GF(2). Bit i of the backing words is the coefficient of
// x^i (LSB = constant term). The zero polynomial has no degree; degree()
// reports -1 for it.
class Poly {
  public:
    Poly() = default;
    explicit Poly(std::uint64_t bits) {
        if (bits)
            words_.push_back(bits);
    }

    static Poly zero() { return Poly(); }
    static Poly one() { return Poly(1); }
    static Poly x() { return Poly(2); }

    bool isZero() const { return words_.empty(); }
    int degree() const;

    bool bit(unsigned i) const {
        std::size_t w = i / 64;
        return w < words_.size() && ((words_[w] >> (i % 64)) & 1);
    }
    void setBit(unsigned i) {
        std::size_t w = i / 64;
        if (w >= words_.size())
            words_.resize(w + 1, 0);
        words_[w] |= std::uint64_t(1) << (i % 64);
    }

    Poly &operator^=(const Poly &o);
    Poly operator^(const Poly &o) const {
        Poly r = *this;
        r ^= o;
        return r;
    }
    bool operator==(const Poly &o) const { return words_ == o.words_; }
    bool operator!=(const Poly &o) const { return !(*this == o); }

    Poly shiftedLeft(unsigned n) const;

    // Carry-free product, no reduction.
    Poly times(const Poly &o) const;
    // Remainder of division by p (deg p >= 0 required).
    Poly mod(const Poly &p) const;

    // Value as an integer when degree < 64.
    std::uint64_t lowBits() const { return words_.empty() ? 0 : words_[0]; }

    // ceil((d+1)/8) bytes, bit i of the stream = coefficient of x^i.
    std::vector<std::uint8_t> toBytes(unsigned degreeHint) const;
    static Poly fromBytes(const std::uint8_t *data, std::size_t len);

    std::string toHex() const;

  private:
    void trim();
    std::vector<std::uint64_t> words_;
};

// (a*b) mod p. Throws InvalidInput unless deg(p) >= 1.
Poly polyMulMod(const Poly &a, const Poly &b, const Poly &p);

// x^(2^i) mod p via i successive squarings.
Poly frobeniusPower(const Poly &p, unsigned i);

// Euclidean gcd; throws InvalidInput if both arguments are zero.
Poly polyGcd(Poly a, Poly b);

// Ben-Or irreducibility test. Throws InvalidInput for constant polynomials.
bool isIrreducible(const Poly &p);

// Random irreducible polynomial of degree exactly d, deterministic in the
// seed carried by rng.
Poly randomIrreducible(unsigned d, RandomSource &rng);

// Number of monic irreducible degree-d polynomials over GF(2):
// (1/d) * sum over k|d of mu(k) * 2^(d/k).
BigUint countIrreducible(unsigned d);

} // namespace pasim::gf2

#endif
