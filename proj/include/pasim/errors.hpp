#ifndef PASIM_ERRORS_HPP
#define PASIM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pasim {

// Invalid arguments / unusable preconditions (maps to CLI exit code 2).
class InvalidInput : public std::runtime_error {
  public:
    explicit InvalidInput(const std::string &msg) : std::runtime_error(msg) {}
};

enum class WireError {
    BadMagic,
    BadVersion,
    Truncated,
    BadCrc,
    NotIrreducible,
    Malformed,
};

inline const char *wireErrorName(WireError e) {
    switch (e) {
    case WireError::BadMagic: return "bad-magic";
    case WireError::BadVersion: return "bad-version";
    case WireError::Truncated: return "truncated";
    case WireError::BadCrc: return "bad-crc";
    case WireError::NotIrreducible: return "not-irreducible";
    case WireError::Malformed: return "malformed";
    }
    return "unknown";
}

// Malformed serialized input; carries the byte offset at which decoding
// failed (maps to CLI exit code 3).
class FormatError : public std::runtime_error {
  public:
    FormatError(WireError code, std::size_t offset, const std::string &msg)
        : std::runtime_error(msg + " (" + wireErrorName(code) + " at byte " +
                             std::to_string(offset) + ")"),
          code_(code), offset_(offset) {}

    WireError code() const { return code_; }
    std::size_t offset() const { return offset_; }

  private:
    WireError code_;
    std::size_t offset_;
};

// Constrained search had no solution; names the violated constraint
// (maps to CLI exit code 4).
class Infeasible : public std::runtime_error {
  public:
    Infeasible(const std::string &constraint, const std::string &msg)
        : std::runtime_error(msg), constraint_(constraint) {}

    const std::string &constraint() const { return constraint_; }

  private:
    std::string constraint_;
};

// Model learning could not identify the required structure
// (maps to CLI exit code 4).
class LearningFailure : public std::runtime_error {
  public:
    explicit LearningFailure(const std::string &msg) : std::runtime_error(msg) {}
};

// Interpreter fault (out-of-bounds load), distinct from a wrong hash.
class ExecutionFault : public std::runtime_error {
  public:
    explicit ExecutionFault(const std::string &msg) : std::runtime_error(msg) {}
};

// Protocol-level failure (malformed challenge, no trace produced).
class ProtocolError : public std::runtime_error {
  public:
    explicit ProtocolError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace pasim

#endif
