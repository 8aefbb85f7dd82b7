#ifndef PASIM_BIGINT_HPP
#define PASIM_BIGINT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pasim {

// Unsigned arbitrary-precision integer, enough for exact program-space
// counting. Little-endian 32-bit limbs, no sign, trimmed representation.
class BigUint {
  public:
    BigUint() = default;
    BigUint(std::uint64_t v);

    static BigUint pow2(unsigned n);

    bool isZero() const { return limbs_.empty(); }

    BigUint &operator+=(const BigUint &o);
    // Requires *this >= o.
    BigUint &operator-=(const BigUint &o);
    BigUint operator+(const BigUint &o) const;
    BigUint operator-(const BigUint &o) const;
    BigUint operator*(const BigUint &o) const;

    BigUint &mulSmall(std::uint32_t m);
    // Exact or truncating division by a small divisor; returns remainder.
    std::uint32_t divSmall(std::uint32_t d);

    int compare(const BigUint &o) const;
    bool operator==(const BigUint &o) const { return compare(o) == 0; }
    bool operator!=(const BigUint &o) const { return compare(o) != 0; }
    bool operator<(const BigUint &o) const { return compare(o) < 0; }
    bool operator<=(const BigUint &o) const { return compare(o) <= 0; }
    bool operator>(const BigUint &o) const { return compare(o) > 0; }
    bool operator>=(const BigUint &o) const { return compare(o) >= 0; }

    std::string toString() const;
    // "m.mmmme+NN" style approximation for readable logs.
    std::string toScientific(int digits = 4) const;
    // Lossy; +inf when out of double range.
    double toDouble() const;

  private:
    void trim();
    std::vector<std::uint32_t> limbs_;
};

} // namespace pasim

#endif
