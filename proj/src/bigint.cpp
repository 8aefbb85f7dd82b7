#include "pasim/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pasim {

BigUint::BigUint(std::uint64_t v) {
    if (v) {
        limbs_.push_back(static_cast<std::uint32_t>(v));
        if (v >> 32)
            limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
    }
}

BigUint BigUint::pow2(unsigned n) {
    BigUint r;
    r.limbs_.assign(n / 32 + 1, 0);
    r.limbs_.back() = 1u << (n % 32);
    return r;
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0)
        limbs_.pop_back();
}

BigUint &BigUint::operator+=(const BigUint &o) {
    if (limbs_.size() < o.limbs_.size())
        limbs_.resize(o.limbs_.size(), 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t s = carry + limbs_[i];
        if (i < o.limbs_.size())
            s += o.limbs_[i];
        limbs_[i] = static_cast<std::uint32_t>(s);
        carry = s >> 32;
    }
    if (carry)
        limbs_.push_back(static_cast<std::uint32_t>(carry));
    return *this;
}

BigUint &BigUint::operator-=(const BigUint &o) {
    if (compare(o) < 0)
        throw std::underflow_error("BigUint subtraction underflow");
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(limbs_[i]) - borrow;
        if (i < o.limbs_.size())
            d -= o.limbs_[i];
        if (d < 0) {
            d += (std::int64_t(1) << 32);
            borrow = 1;
        } else {
            borrow = 0;
        }
        limbs_[i] = static_cast<std::uint32_t>(d);
    }
    trim();
    return *this;
}

BigUint BigUint::operator+(const BigUint &o) const {
    BigUint r = *this;
    r += o;
    return r;
}

BigUint BigUint::operator-(const BigUint &o) const {
    BigUint r = *this;
    r -= o;
    return r;
}

BigUint BigUint::operator*(const BigUint &o) const {
    if (isZero() || o.isZero())
        return BigUint();
    BigUint r;
    r.limbs_.assign(limbs_.size() + o.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t carry = 0;
        std::uint64_t a = limbs_[i];
        for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
            std::uint64_t cur = r.limbs_[i + j] + a * o.limbs_[j] + carry;
            r.limbs_[i + j] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        std::size_t k = i + o.limbs_.size();
        while (carry) {
            std::uint64_t cur = r.limbs_[k] + carry;
            r.limbs_[k] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
            ++k;
        }
    }
    r.trim();
    return r;
}

BigUint &BigUint::mulSmall(std::uint32_t m) {
    if (m == 0) {
        limbs_.clear();
        return *this;
    }
    std::uint64_t carry = 0;
    for (auto &l : limbs_) {
        std::uint64_t cur = static_cast<std::uint64_t>(l) * m + carry;
        l = static_cast<std::uint32_t>(cur);
        carry = cur >> 32;
    }
    while (carry) {
        limbs_.push_back(static_cast<std::uint32_t>(carry));
        carry >>= 32;
    }
    return *this;
}

std::uint32_t BigUint::divSmall(std::uint32_t d) {
    if (d == 0)
        throw std::domain_error("BigUint division by zero");
    std::uint64_t rem = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        std::uint64_t cur = (rem << 32) | limbs_[i];
        limbs_[i] = static_cast<std::uint32_t>(cur / d);
        rem = cur % d;
    }
    trim();
    return static_cast<std::uint32_t>(rem);
}

int BigUint::compare(const BigUint &o) const {
    if (limbs_.size() != o.limbs_.size())
        return limbs_.size() < o.limbs_.size() ? -1 : 1;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != o.limbs_[i])
            return limbs_[i] < o.limbs_[i] ? -1 : 1;
    }
    return 0;
}

std::string BigUint::toString() const {
    if (isZero())
        return "0";
    BigUint t = *this;
    std::string out;
    while (!t.isZero()) {
        std::uint32_t r = t.divSmall(1000000000u);
        std::string chunk = std::to_string(r);
        if (!t.isZero())
            chunk.insert(0, 9 - chunk.size(), '0');
        out.insert(0, chunk);
    }
    return out;
}

std::string BigUint::toScientific(int digits) const {
    std::string dec = toString();
    if (dec == "0")
        return "0";
    int exp = static_cast<int>(dec.size()) - 1;
    std::string mant = dec.substr(0, 1);
    if (digits > 1 && dec.size() > 1)
        mant += "." + dec.substr(1, static_cast<std::size_t>(digits - 1));
    return mant + "e+" + std::to_string(exp);
}

double BigUint::toDouble() const {
    double r = 0.0;
    for (std::size_t i = limbs_.size(); i-- > 0;)
        r = r * 4294967296.0 + limbs_[i];
    return r;
}

} // namespace pasim
