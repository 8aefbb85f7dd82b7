#include "pasim/gf2.hpp"

#include <bit>

#include "pasim/errors.hpp"

namespace pasim::gf2 {

void Poly::trim() {
    while (!words_.empty() && words_.back() == 0)
        words_.pop_back();
}

int Poly::degree() const {
    if (words_.empty())
        return -1;
    unsigned top = 63 - std::countl_zero(words_.back());
    return static_cast<int>((words_.size() - 1) * 64 + top);
}

Poly &Poly::operator^=(const Poly &o) {
    if (words_.size() < o.words_.size())
        words_.resize(o.words_.size(), 0);
    for (std::size_t i = 0; i < o.words_.size(); ++i)
        words_[i] ^= o.words_[i];
    trim();
    return *this;
}

Poly Poly::shiftedLeft(unsigned n) const {
    if (isZero() || n == 0)
        return *this;
    Poly r;
    unsigned wordShift = n / 64;
    unsigned bitShift = n % 64;
    r.words_.assign(words_.size() + wordShift + 1, 0);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        r.words_[i + wordShift] |= words_[i] << bitShift;
        if (bitShift)
            r.words_[i + wordShift + 1] |= words_[i] >> (64 - bitShift);
    }
    r.trim();
    return r;
}

Poly Poly::times(const Poly &o) const {
    if (isZero() || o.isZero())
        return Poly();
    Poly r;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
            unsigned b = std::countr_zero(bits);
            bits &= bits - 1;
            r ^= o.shiftedLeft(static_cast<unsigned>(w * 64 + b));
        }
    }
    return r;
}

Poly Poly::mod(const Poly &p) const {
    if (p.isZero())
        throw InvalidInput("gf2: reduction modulo zero polynomial");
    Poly r = *this;
    int dp = p.degree();
    int dr = r.degree();
    while (dr >= dp) {
        r ^= p.shiftedLeft(static_cast<unsigned>(dr - dp));
        dr = r.degree();
    }
    return r;
}

std::vector<std::uint8_t> Poly::toBytes(unsigned degreeHint) const {
    std::size_t n = (degreeHint + 1 + 7) / 8;
    std::vector<std::uint8_t> out(n, 0);
    for (unsigned i = 0; i <= degreeHint; ++i)
        if (bit(i))
            out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    return out;
}

Poly Poly::fromBytes(const std::uint8_t *data, std::size_t len) {
    Poly p;
    for (std::size_t i = 0; i < len; ++i) {
        std::uint8_t b = data[i];
        while (b) {
            unsigned j = std::countr_zero(static_cast<unsigned>(b));
            b = static_cast<std::uint8_t>(b & (b - 1));
            p.setBit(static_cast<unsigned>(i * 8 + j));
        }
    }
    return p;
}

std::string Poly::toHex() const {
    if (isZero())
        return "0x0";
    static const char *digits = "0123456789abcdef";
    std::string out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t v = words_[w];
        for (int nib = 0; nib < 16; ++nib) {
            out.push_back(digits[v & 0xF]);
            v >>= 4;
        }
    }
    while (out.size() > 1 && out.back() == '0')
        out.pop_back();
    out += "x0";
    return std::string(out.rbegin(), out.rend());
}

Poly polyMulMod(const Poly &a, const Poly &b, const Poly &p) {
    if (p.degree() < 1)
        throw InvalidInput("gf2: modulus must have degree >= 1");
    return a.times(b).mod(p);
}

Poly frobeniusPower(const Poly &p, unsigned i) {
    if (p.degree() < 1)
        throw InvalidInput("gf2: modulus must have degree >= 1");
    Poly r = Poly::x().mod(p);
    for (unsigned s = 0; s < i; ++s)
        r = polyMulMod(r, r, p);
    return r;
}

Poly polyGcd(Poly a, Poly b) {
    if (a.isZero() && b.isZero())
        throw InvalidInput("gf2: gcd(0, 0) is undefined");
    while (!b.isZero()) {
        Poly r = a.mod(b);
        a = b;
        b = r;
    }
    return a;
}

bool isIrreducible(const Poly &p) {
    int n = p.degree();
    if (n < 1)
        throw InvalidInput("gf2: irreducibility needs degree >= 1");
    Poly xr = Poly::x().mod(p);
    Poly r = xr;
    for (int i = 1; i <= n / 2; ++i) {
        r = polyMulMod(r, r, p); // r = x^(2^i) mod p
        Poly g = polyGcd(p, r ^ xr);
        if (g != Poly::one())
            return false;
    }
    return true;
}

Poly randomIrreducible(unsigned d, RandomSource &rng) {
    if (d < 1)
        throw InvalidInput("gf2: degree must be >= 1");
    if (d == 1)
        return rng.below(2) ? Poly(3) : Poly(2); // x+1 or x
    while (true) {
        Poly p;
        p.setBit(d);
        p.setBit(0); // irreducible with d >= 2 needs a constant term
        for (unsigned i = 1; i < d; ++i)
            if (rng.u64() & 1)
                p.setBit(i);
        if (isIrreducible(p))
            return p;
    }
}

namespace {

// Mobius function of k from its factorization.
int mobius(unsigned k) {
    int m = 1;
    for (unsigned f = 2; f * f <= k; ++f) {
        if (k % f == 0) {
            k /= f;
            if (k % f == 0)
                return 0;
            m = -m;
        }
    }
    if (k > 1)
        m = -m;
    return m;
}

} // namespace

BigUint countIrreducible(unsigned d) {
    if (d < 1)
        throw InvalidInput("gf2: degree must be >= 1");
    BigUint pos, neg;
    for (unsigned k = 1; k <= d; ++k) {
        if (d % k)
            continue;
        int m = mobius(k);
        if (m == 1)
            pos += BigUint::pow2(d / k);
        else if (m == -1)
            neg += BigUint::pow2(d / k);
    }
    BigUint num = pos - neg;
    std::uint32_t rem = num.divSmall(d);
    if (rem != 0)
        throw std::logic_error("gf2: necklace sum not divisible by degree");
    return num;
}

} // namespace pasim::gf2
