#ifndef PASIM_WIRE_HPP
#define PASIM_WIRE_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "pasim/errors.hpp"

namespace pasim {

// CRC-32, IEEE 802.3 polynomial (reflected 0xEDB88320).
inline std::uint32_t crc32(const std::uint8_t *data, std::size_t len,
                           std::uint32_t crc = 0) {
    crc = ~crc;
    for (std::size_t i = 0; i < len; ++i) {
        crc ^= data[i];
        for (int b = 0; b < 8; ++b)
            crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1)));
    }
    return ~crc;
}

inline std::uint32_t crc32(const std::vector<std::uint8_t> &data) {
    return crc32(data.data(), data.size());
}

// Little-endian byte writer.
class ByteWriter {
  public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v));
        u8(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v));
        u16(static_cast<std::uint16_t>(v >> 16));
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v));
        u32(static_cast<std::uint32_t>(v >> 32));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void bytes(const std::uint8_t *p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
    void bytes(const std::vector<std::uint8_t> &v) { bytes(v.data(), v.size()); }
    void magic(const char m[4]) { bytes(reinterpret_cast<const std::uint8_t *>(m), 4); }

    // Appends the CRC of everything written so far.
    void appendCrc() { u32(crc32(buf_)); }

    const std::vector<std::uint8_t> &data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

  private:
    std::vector<std::uint8_t> buf_;
};

// Little-endian byte reader; throws FormatError with the failing offset.
class ByteReader {
  public:
    ByteReader(const std::uint8_t *data, std::size_t len) : data_(data), len_(len) {}
    explicit ByteReader(const std::vector<std::uint8_t> &v) : data_(v.data()), len_(v.size()) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return len_ - pos_; }

    void need(std::size_t n, const char *what) const {
        if (pos_ + n > len_)
            throw FormatError(WireError::Truncated, len_,
                              std::string("truncated before ") + what);
    }

    std::uint8_t u8(const char *what = "u8") {
        need(1, what);
        return data_[pos_++];
    }
    std::uint16_t u16(const char *what = "u16") {
        need(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32(const char *what = "u32") {
        std::uint32_t lo = u16(what);
        std::uint32_t hi = u16(what);
        return lo | (hi << 16);
    }
    std::uint64_t u64(const char *what = "u64") {
        std::uint64_t lo = u32(what);
        std::uint64_t hi = u32(what);
        return lo | (hi << 32);
    }
    double f64(const char *what = "f64") {
        std::uint64_t bits = u64(what);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    const std::uint8_t *bytes(std::size_t n, const char *what = "bytes") {
        need(n, what);
        const std::uint8_t *p = data_ + pos_;
        pos_ += n;
        return p;
    }

    void expectMagic(const char m[4], const char *what) {
        if (len_ - pos_ < 4 || std::memcmp(data_ + pos_, m, 4) != 0)
            throw FormatError(WireError::BadMagic, pos_,
                              std::string("missing magic for ") + what);
        pos_ += 4;
    }

    // Reads the trailing CRC and checks it against bytes [start, crcPos).
    void checkCrc(std::size_t start, const char *what) {
        std::size_t body = pos_;
        std::uint32_t stored = u32("crc");
        std::uint32_t actual = crc32(data_ + start, body - start);
        if (stored != actual)
            throw FormatError(WireError::BadCrc, body,
                              std::string("crc mismatch in ") + what);
    }

  private:
    const std::uint8_t *data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

} // namespace pasim

#endif
