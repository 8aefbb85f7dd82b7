#ifndef PASIM_TEXT_HPP
#define PASIM_TEXT_HPP

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pasim {

// Shortest decimal form that round-trips the exact double.
inline std::string formatDouble(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parseDouble(const std::string &s, bool *ok = nullptr) {
    const char *begin = s.c_str();
    char *end = nullptr;
    double v = std::strtod(begin, &end);
    bool good = end != begin && end == begin + s.size();
    if (ok)
        *ok = good;
    else if (!good)
        throw std::invalid_argument("not a number: " + s);
    return v;
}

} // namespace pasim

#endif
