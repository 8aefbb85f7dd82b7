#ifndef PASIM_ICGEN_HPP
#define PASIM_ICGEN_HPP

#include <cstdint>
#include <vector>

#include "pasim/bigint.hpp"
#include "pasim/bitvec.hpp"
#include "pasim/gf2.hpp"
#include "pasim/rng.hpp"

namespace pasim::icgen {

// Galois-configured LFSR. Tapped bits are XORed with the output bit during
// the shift; the state never stays all-zero.
class Lfsr {
  public:
    Lfsr(const gf2::Poly &taps, unsigned width);

    unsigned width() const { return width_; }

    // Seeds from the low `width` bits of v; a zero seed becomes 1.
    void seed(std::uint64_t v);

    // One Galois step: shift right, XOR taps when the output bit is 1.
    bool step();

    // Clocks `bits` times and returns the output bits (bit t = output of
    // clock t).
    BitVec run(unsigned bits);

    // XORs a folded value into the state; a zeroed state becomes 1.
    void absorb(std::uint64_t v);

    const BitVec &state() const { return reg_; }
    void setState(const BitVec &s);

  private:
    unsigned width_;
    BitVec tapMask_; // taps >> 1, truncated to width bits
    BitVec reg_;
};

struct TreeNode {
    std::uint8_t lfsrIndex = 0;
    std::uint8_t addrBit = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool operator==(const TreeNode &) const = default;
};

// Binary control tree; node 0 is the root, nodes stored in preorder.
struct ControlTree {
    std::vector<TreeNode> nodes;

    unsigned depth() const;
    bool operator==(const ControlTree &) const = default;
};

struct AddressTuple {
    std::uint64_t base = 0;
    std::uint32_t words = 0;

    bool operator==(const AddressTuple &) const = default;
};

// Ordered list of address tuples covering totalBytes within [lo, hi).
struct AddressList {
    std::vector<AddressTuple> tuples;
    std::uint64_t totalBytes = 0;
    std::uint32_t wordSize = 4;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    double coverage() const {
        return static_cast<double>(totalBytes) / static_cast<double>(hi - lo);
    }

    std::uint64_t wordCount() const { return totalBytes / wordSize; }

    template <typename Fn> void forEachWord(Fn &&fn) const {
        for (const auto &t : tuples)
            for (std::uint32_t w = 0; w < t.words; ++w)
                fn(t.base + std::uint64_t(w) * wordSize);
    }

    bool operator==(const AddressList &) const = default;
};

struct CostParams {
    int nodeVisit = 2;
    int lfsrEnable = 3;
    int loopOverhead = 5;
    int prologue = 10;

    bool operator==(const CostParams &) const = default;
};

// Diversified integrity-checking program: LFSR bank + control tree +
// accumulator configuration.
struct ICProgram {
    unsigned degree = 0;
    std::vector<gf2::Poly> lfsrs;
    ControlTree tree;
    unsigned accumulatorWidth = 64; // bits, multiple of 8
    unsigned wordSize = 4;          // bytes per load, 4 or 8
    std::uint8_t combinerId = 1;
    CostParams cost;

    bool operator==(const ICProgram &) const = default;
};

// Byte content of an address range [lo, lo+bytes.size()).
struct MemoryImage {
    std::uint64_t lo = 0;
    std::vector<std::uint8_t> bytes;

    std::uint64_t hi() const { return lo + bytes.size(); }
    bool contains(std::uint64_t addr, std::uint64_t n) const {
        return addr >= lo && addr + n <= hi();
    }
    // Little-endian word read, n in {1..8}.
    std::uint64_t readWord(std::uint64_t addr, unsigned n) const;
    void write(std::uint64_t addr, const std::uint8_t *data, std::size_t n);
};

struct ExecResult {
    BitVec hash;
    std::uint64_t instructionCount = 0;
};

// Random tree of depth <= n referencing LFSR indices in [0, m); each level
// branches on a distinct address bit. Deterministic in the rng seed.
ControlTree genControlTree(unsigned n, unsigned m, RandomSource &rng);

// Random tuple list drawn from a dedicated selection LFSR. Word counts are
// uniform in [1, 8]; bases are word-aligned within [lo, hi). The total is
// nBytes rounded up to a whole number of words. Throws Infeasible when the
// request exceeds the region.
AddressList genAddressList(std::uint64_t nBytes, std::uint64_t lo, std::uint64_t hi,
                           std::uint32_t wordSize, RandomSource &rng);

// Fresh program: m irreducible degree-d polynomials plus a random control
// tree of depth <= n.
ICProgram assembleProgram(unsigned d, unsigned n, unsigned m, unsigned k,
                          RandomSource &rng, unsigned wordSize = 4);

// Fresh program whose instructionsPerIteration equals targetCost exactly
// (throws Infeasible when the cost model cannot realize the target).
ICProgram assembleProgramWithCost(unsigned d, int targetCost, unsigned k,
                                  RandomSource &rng, unsigned wordSize = 4);

// Deterministic per-iteration instruction cost:
// round(2*E[path length] + 3*E[distinct enabled LFSRs] + 5) over uniformly
// random address bits.
int instructionsPerIteration(const ICProgram &p);

// Deterministic interpreter. The hash depends on the nonce, every covered
// word's value and every covered word's address. Throws ExecutionFault for
// out-of-bounds addresses.
ExecResult execute(const ICProgram &p, const MemoryImage &mem,
                   const AddressList &addrs, std::uint64_t nonce);

std::vector<std::uint8_t> serialize(const ICProgram &p);
ICProgram deserialize(const std::vector<std::uint8_t> &data, bool strict = false);
// Reads one program blob starting at *offset inside a larger buffer and
// advances *offset past it.
ICProgram deserializeFrom(const std::uint8_t *data, std::size_t len,
                          std::size_t *offset, bool strict = false);

// Sum of Catalan numbers C_0..C_nodeCap (binary tree shape count).
BigUint treeShapeCount(std::uint64_t nodeCap);

// Program-space size: countIrreducible(d) * treeShapeCount(min(2^n, cap)).
// cap = 0 means the full 2^n node bound.
BigUint countPrograms(unsigned d, unsigned n, std::uint64_t cap = 0);

} // namespace pasim::icgen

#endif
