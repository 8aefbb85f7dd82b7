#include "pasim/icgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pasim/errors.hpp"
#include "pasim/wire.hpp"

namespace pasim::icgen {

namespace {
constexpr std::uint64_t kSeedMix = 0x9E3779B97F4A7C15ULL;
constexpr char kMagic[4] = {'I', 'C', 'P', 'G'};
constexpr std::uint8_t kVersion = 1;
} // namespace

Lfsr::Lfsr(const gf2::Poly &taps, unsigned width)
    : width_(width), tapMask_(width), reg_(width) {
    // Galois form: feedback mask is the polynomial without its constant
    // term, shifted down one (bit d-1 of the mask reinjects x^d).
    for (unsigned i = 1; i <= width; ++i)
        if (taps.bit(i))
            tapMask_.set(i - 1);
    reg_.set(0);
}

void Lfsr::seed(std::uint64_t v) {
    reg_ = BitVec::fromU64(width_, v);
    if (reg_.isZero())
        reg_.set(0);
}

bool Lfsr::step() {
    bool out = reg_.shr1();
    if (out)
        reg_ ^= tapMask_;
    return out;
}

BitVec Lfsr::run(unsigned bits) {
    BitVec out(bits);
    for (unsigned t = 0; t < bits; ++t)
        if (step())
            out.set(t);
    return out;
}

void Lfsr::absorb(std::uint64_t v) {
    reg_ ^= BitVec::fold(width_, v);
    if (reg_.isZero())
        reg_.set(0);
}

void Lfsr::setState(const BitVec &s) { reg_ = s; }

unsigned ControlTree::depth() const {
    if (nodes.empty())
        return 0;
    // nodes are in preorder; walk recursively
    struct Walker {
        const std::vector<TreeNode> &n;
        unsigned go(std::int32_t i) const {
            if (i < 0)
                return 0;
            return 1 + std::max(go(n[i].left), go(n[i].right));
        }
    } w{nodes};
    return w.go(0);
}

std::uint64_t MemoryImage::readWord(std::uint64_t addr, unsigned n) const {
    std::uint64_t v = 0;
    std::size_t off = static_cast<std::size_t>(addr - lo);
    for (unsigned i = 0; i < n; ++i)
        v |= static_cast<std::uint64_t>(bytes[off + i]) << (8 * i);
    return v;
}

void MemoryImage::write(std::uint64_t addr, const std::uint8_t *data, std::size_t n) {
    std::copy(data, data + n, bytes.begin() + static_cast<std::ptrdiff_t>(addr - lo));
}

ControlTree genControlTree(unsigned n, unsigned m, RandomSource &rng) {
    if (n < 1 || m < 1 || m > 255)
        throw InvalidInput("icgen: tree depth and lfsr count must be in range");
    if (n > 64)
        throw InvalidInput("icgen: tree depth limited to 64 address bits");

    // One distinct address bit per level keeps bits unique along any
    // root-to-leaf path.
    std::uint8_t perm[64];
    std::iota(perm, perm + 64, 0);
    for (unsigned i = 63; i > 0; --i)
        std::swap(perm[i], perm[rng.below(i + 1)]);

    ControlTree tree;
    struct Builder {
        ControlTree &t;
        RandomSource &rng;
        unsigned maxDepth;
        unsigned m;
        const std::uint8_t *perm;

        std::int32_t build(unsigned depth) {
            std::int32_t idx = static_cast<std::int32_t>(t.nodes.size());
            t.nodes.push_back(TreeNode{static_cast<std::uint8_t>(rng.below(m)),
                                       perm[depth - 1], -1, -1});
            if (depth < maxDepth) {
                std::uint64_t shape = rng.below(100);
                bool left = shape < 60;    // both: 45%, left-only: 15%
                bool right = shape < 45 || (shape >= 60 && shape < 75);
                if (left)
                    t.nodes[idx].left = build(depth + 1);
                if (right)
                    t.nodes[idx].right = build(depth + 1);
            }
            return idx;
        }
    } b{tree, rng, n, m, perm};
    b.build(1);
    return tree;
}

namespace {

std::uint64_t drawFromLfsr(Lfsr &sel) {
    std::uint64_t v = 0;
    for (unsigned t = 0; t < 64; ++t)
        if (sel.step())
            v |= std::uint64_t(1) << t;
    return v;
}

} // namespace

AddressList genAddressList(std::uint64_t nBytes, std::uint64_t lo, std::uint64_t hi,
                           std::uint32_t wordSize, RandomSource &rng) {
    if (wordSize != 4 && wordSize != 8)
        throw InvalidInput("icgen: word size must be 4 or 8");
    if (hi <= lo)
        throw InvalidInput("icgen: empty address region");
    if (nBytes < wordSize)
        throw InvalidInput("icgen: need at least one word of coverage");
    std::uint64_t nWords = (nBytes + wordSize - 1) / wordSize;
    std::uint64_t total = nWords * wordSize;
    if (total > hi - lo)
        throw Infeasible("coverage", "icgen: requested bytes exceed the region size");

    // Dedicated selection LFSR; its taps and seed derive from the caller's
    // random source.
    Lfsr sel(gf2::randomIrreducible(64, rng), 64);
    sel.seed(rng.u64());

    std::uint64_t regionWords = (hi - lo) / wordSize;
    AddressList list;
    list.wordSize = wordSize;
    list.lo = lo;
    list.hi = hi;
    list.totalBytes = total;

    std::uint64_t remaining = nWords;
    while (remaining > 0) {
        std::uint32_t w = static_cast<std::uint32_t>(1 + (drawFromLfsr(sel) & 7));
        if (w > remaining)
            w = static_cast<std::uint32_t>(remaining);
        std::uint64_t slots = regionWords - w + 1;
        std::uint64_t base = lo + (drawFromLfsr(sel) % slots) * wordSize;
        list.tuples.push_back(AddressTuple{base, w});
        remaining -= w;
    }
    return list;
}

ICProgram assembleProgram(unsigned d, unsigned n, unsigned m, unsigned k,
                          RandomSource &rng, unsigned wordSize) {
    if (d < 1 || n < 1 || m < 1 || m > 255)
        throw InvalidInput("icgen: bad program parameters");
    if (k < 8 || k % 8 != 0 || k > 248)
        throw InvalidInput("icgen: accumulator width must be a multiple of 8 in [8,248]");
    if (wordSize != 4 && wordSize != 8)
        throw InvalidInput("icgen: word size must be 4 or 8");

    ICProgram p;
    p.degree = d;
    p.accumulatorWidth = k;
    p.wordSize = wordSize;
    p.lfsrs.reserve(m);
    for (unsigned j = 0; j < m; ++j)
        p.lfsrs.push_back(gf2::randomIrreducible(d, rng));
    p.tree = genControlTree(n, m, rng);
    return p;
}

ICProgram assembleProgramWithCost(unsigned d, int targetCost, unsigned k,
                                  RandomSource &rng, unsigned wordSize) {
    // A single-child chain of L nodes with u distinct LFSR indices costs
    // exactly 2L + 3u + 5 for every address.
    int want = targetCost - 5;
    int bestU = -1, bestL = -1;
    for (int u = want / 3; u >= 1; --u) {
        int rest = want - 3 * u;
        if (rest >= 0 && rest % 2 == 0 && rest / 2 >= u && rest / 2 <= 255 && u <= 255) {
            bestU = u;
            bestL = rest / 2;
            break;
        }
    }
    if (bestU < 0)
        throw Infeasible("cost-target",
                         "icgen: no chain realizes the requested per-iteration cost");

    unsigned u = static_cast<unsigned>(bestU);
    unsigned L = static_cast<unsigned>(bestL);

    ICProgram p;
    p.degree = d;
    p.accumulatorWidth = k;
    p.wordSize = wordSize;
    for (unsigned j = 0; j < u; ++j)
        p.lfsrs.push_back(gf2::randomIrreducible(d, rng));

    std::vector<std::uint8_t> indices(L);
    for (unsigned i = 0; i < L; ++i)
        indices[i] = static_cast<std::uint8_t>(i < u ? i : rng.below(u));
    for (unsigned i = L; i-- > 1;)
        std::swap(indices[i], indices[rng.below(i + 1)]);

    std::uint8_t perm[64];
    std::iota(perm, perm + 64, 0);
    for (unsigned i = 63; i > 0; --i)
        std::swap(perm[i], perm[rng.below(i + 1)]);

    p.tree.nodes.resize(L);
    for (unsigned i = 0; i < L; ++i) {
        p.tree.nodes[i].lfsrIndex = indices[i];
        p.tree.nodes[i].addrBit = perm[i % 64];
        p.tree.nodes[i].left = (i + 1 < L) ? static_cast<std::int32_t>(i + 1) : -1;
        p.tree.nodes[i].right = -1;
    }
    return p;
}

namespace {

struct CostWalk {
    const std::vector<TreeNode> &nodes;
    double pathSum = 0;
    double distinctSum = 0;
    std::vector<std::uint8_t> seen;

    void go(std::int32_t idx, double prob, unsigned depth, unsigned distinct) {
        const TreeNode &nd = nodes[static_cast<std::size_t>(idx)];
        bool isNew = std::find(seen.begin(), seen.end(), nd.lfsrIndex) == seen.end();
        if (isNew)
            seen.push_back(nd.lfsrIndex);
        unsigned dist = distinct + (isNew ? 1 : 0);
        if (nd.left >= 0 && nd.right >= 0) {
            go(nd.left, prob / 2, depth + 1, dist);
            go(nd.right, prob / 2, depth + 1, dist);
        } else if (nd.left >= 0) {
            go(nd.left, prob, depth + 1, dist);
        } else if (nd.right >= 0) {
            go(nd.right, prob, depth + 1, dist);
        } else {
            pathSum += prob * depth;
            distinctSum += prob * dist;
        }
        if (isNew)
            seen.pop_back();
    }
};

} // namespace

int instructionsPerIteration(const ICProgram &p) {
    CostWalk w{p.tree.nodes, 0, 0, {}};
    w.go(0, 1.0, 1, 0);
    double c = p.cost.nodeVisit * w.pathSum + p.cost.lfsrEnable * w.distinctSum +
               p.cost.loopOverhead;
    return static_cast<int>(std::lround(c));
}

namespace {

struct Interpreter {
    const ICProgram &prog;
    std::vector<Lfsr> regs;
    BitVec h;
    std::vector<std::uint8_t> enabled; // scratch, ascending LFSR indices

    explicit Interpreter(const ICProgram &p, std::uint64_t nonce) : prog(p) {
        regs.reserve(p.lfsrs.size());
        for (std::size_t j = 0; j < p.lfsrs.size(); ++j) {
            regs.emplace_back(p.lfsrs[j], p.degree);
            regs.back().seed(nonce ^ ((j + 1) * kSeedMix));
        }
        h = BitVec::fromU64(p.accumulatorWidth, nonce);
        update(nonce, nonce);
    }

    void walk(std::uint64_t addr) {
        enabled.clear();
        std::int32_t cur = 0;
        while (cur >= 0) {
            const TreeNode &nd = prog.tree.nodes[static_cast<std::size_t>(cur)];
            if (std::find(enabled.begin(), enabled.end(), nd.lfsrIndex) == enabled.end())
                enabled.push_back(nd.lfsrIndex);
            if (nd.left >= 0 && nd.right >= 0)
                cur = ((addr >> nd.addrBit) & 1) ? nd.left : nd.right;
            else if (nd.left >= 0)
                cur = nd.left;
            else if (nd.right >= 0)
                cur = nd.right;
            else
                break;
        }
        std::sort(enabled.begin(), enabled.end());
    }

    void update(std::uint64_t x, std::uint64_t addr) {
        walk(addr);
        unsigned k = prog.accumulatorWidth;

        BitVec z(k);
        if (enabled.size() == 1) {
            z = regs[enabled[0]].run(k);
        } else {
            std::vector<BitVec> outs;
            outs.reserve(enabled.size());
            for (auto j : enabled)
                outs.push_back(regs[j].run(k));
            for (std::size_t i = 0; i < outs.size(); ++i)
                z ^= outs[i] & outs[(i + 1) % outs.size()];
        }

        h.rotl1();
        h ^= z;
        h ^= BitVec::fold(k, x);
        h ^= BitVec::fold(k, addr);

        for (auto j : enabled)
            regs[j].absorb(x);
    }
};

} // namespace

ExecResult execute(const ICProgram &p, const MemoryImage &mem,
                   const AddressList &addrs, std::uint64_t nonce) {
    if (p.tree.nodes.empty() || p.lfsrs.empty())
        throw InvalidInput("icgen: empty program");
    for (const auto &t : addrs.tuples)
        if (!mem.contains(t.base, std::uint64_t(t.words) * addrs.wordSize))
            throw ExecutionFault("icgen: address tuple outside memory bounds");

    Interpreter interp(p, nonce);
    addrs.forEachWord([&](std::uint64_t addr) {
        interp.update(mem.readWord(addr, addrs.wordSize), addr);
    });

    ExecResult r;
    r.hash = interp.h;
    r.instructionCount = addrs.wordCount() *
                             static_cast<std::uint64_t>(instructionsPerIteration(p)) +
                         static_cast<std::uint64_t>(p.cost.prologue);
    return r;
}

std::vector<std::uint8_t> serialize(const ICProgram &p) {
    ByteWriter w;
    w.magic(kMagic);
    w.u8(kVersion);
    w.u16(static_cast<std::uint16_t>(p.degree));
    w.u8(static_cast<std::uint8_t>(p.lfsrs.size()));
    w.u8(static_cast<std::uint8_t>(p.accumulatorWidth));
    w.u8(static_cast<std::uint8_t>(p.wordSize));
    w.u8(p.combinerId);
    for (const auto &poly : p.lfsrs)
        w.bytes(poly.toBytes(p.degree));
    w.u16(static_cast<std::uint16_t>(p.tree.nodes.size()));

    // Preorder records; child presence travels in flag bits.
    struct Emit {
        const std::vector<TreeNode> &nodes;
        ByteWriter &w;
        void go(std::int32_t idx) {
            const TreeNode &nd = nodes[static_cast<std::size_t>(idx)];
            std::uint8_t flags = 0;
            if (nd.left >= 0)
                flags |= 1;
            if (nd.right >= 0)
                flags |= 2;
            w.u8(nd.lfsrIndex);
            w.u8(nd.addrBit);
            w.u8(flags);
            if (nd.left >= 0)
                go(nd.left);
            if (nd.right >= 0)
                go(nd.right);
        }
    };
    if (!p.tree.nodes.empty())
        Emit{p.tree.nodes, w}.go(0);
    w.appendCrc();
    return w.take();
}

namespace {

struct TreeParser {
    ByteReader &r;
    ControlTree &tree;
    unsigned lfsrCount;
    unsigned budget;
    unsigned consumed = 0;

    std::int32_t parse() {
        if (consumed >= budget)
            throw FormatError(WireError::Malformed, r.offset(),
                              "ic-program: tree node count inconsistent");
        ++consumed;
        std::uint8_t lfsr = r.u8("tree node");
        std::uint8_t addrBit = r.u8("tree node");
        std::uint8_t flags = r.u8("tree node");
        if (lfsr >= lfsrCount)
            throw FormatError(WireError::Malformed, r.offset() - 3,
                              "ic-program: node references missing LFSR");
        if (flags & ~3u)
            throw FormatError(WireError::Malformed, r.offset() - 1,
                              "ic-program: unknown node flags");
        std::int32_t idx = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{lfsr, addrBit, -1, -1});
        if (flags & 1)
            tree.nodes[static_cast<std::size_t>(idx)].left = parse();
        if (flags & 2)
            tree.nodes[static_cast<std::size_t>(idx)].right = parse();
        return idx;
    }
};

} // namespace

ICProgram deserializeFrom(const std::uint8_t *data, std::size_t len,
                          std::size_t *offset, bool strict) {
    ByteReader r(data + *offset, len - *offset);
    std::size_t start = 0;
    r.expectMagic(kMagic, "ic-program");
    std::uint8_t ver = r.u8("version");
    if (ver != kVersion)
        throw FormatError(WireError::BadVersion, r.offset() - 1,
                          "ic-program: unsupported version");
    ICProgram p;
    p.degree = r.u16("degree");
    unsigned lfsrCount = r.u8("lfsr count");
    p.accumulatorWidth = r.u8("accumulator width");
    p.wordSize = r.u8("word size");
    p.combinerId = r.u8("combiner id");
    if (p.degree < 1 || lfsrCount < 1 || p.accumulatorWidth < 8 ||
        p.accumulatorWidth % 8 != 0 || (p.wordSize != 4 && p.wordSize != 8) ||
        p.combinerId != 1)
        throw FormatError(WireError::Malformed, r.offset(), "ic-program: bad header");

    std::size_t polyBytes = (p.degree + 1 + 7) / 8;
    for (unsigned j = 0; j < lfsrCount; ++j) {
        const std::uint8_t *pb = r.bytes(polyBytes, "polynomial");
        gf2::Poly poly = gf2::Poly::fromBytes(pb, polyBytes);
        if (poly.degree() != static_cast<int>(p.degree))
            throw FormatError(WireError::Malformed, r.offset() - polyBytes,
                              "ic-program: polynomial degree mismatch");
        if (strict && !gf2::isIrreducible(poly))
            throw FormatError(WireError::NotIrreducible, r.offset() - polyBytes,
                              "ic-program: reducible polynomial rejected");
        p.lfsrs.push_back(std::move(poly));
    }

    unsigned nodeCount = r.u16("tree node count");
    if (nodeCount == 0)
        throw FormatError(WireError::Malformed, r.offset() - 2,
                          "ic-program: empty control tree");
    TreeParser tp{r, p.tree, lfsrCount, nodeCount};
    tp.parse();
    if (tp.consumed != nodeCount)
        throw FormatError(WireError::Malformed, r.offset(),
                          "ic-program: tree node count inconsistent");
    r.checkCrc(start, "ic-program");
    *offset += r.offset();
    return p;
}

ICProgram deserialize(const std::vector<std::uint8_t> &data, bool strict) {
    std::size_t off = 0;
    ICProgram p = deserializeFrom(data.data(), data.size(), &off, strict);
    if (off != data.size())
        throw FormatError(WireError::Malformed, off, "ic-program: trailing bytes");
    return p;
}

BigUint treeShapeCount(std::uint64_t nodeCap) {
    if (nodeCap > (1u << 18))
        throw InvalidInput("icgen: node cap too large for exact counting");
    BigUint total;
    BigUint catalan(1); // C_0
    for (std::uint64_t i = 0;; ++i) {
        total += catalan;
        if (i == nodeCap)
            break;
        // C_{i+1} = C_i * 2(2i+1) / (i+2)
        catalan.mulSmall(static_cast<std::uint32_t>(4 * i + 2));
        std::uint32_t rem = catalan.divSmall(static_cast<std::uint32_t>(i + 2));
        if (rem != 0)
            throw std::logic_error("icgen: Catalan recurrence must divide exactly");
    }
    return total;
}

BigUint countPrograms(unsigned d, unsigned n, std::uint64_t cap) {
    if (d < 1 || n < 1)
        throw InvalidInput("icgen: degree and depth must be >= 1");
    std::uint64_t maxNodes = (n >= 63) ? ~std::uint64_t(0) : (std::uint64_t(1) << n);
    std::uint64_t nodeCap = (cap == 0) ? maxNodes : std::min(cap, maxNodes);
    return gf2::countIrreducible(d) * treeShapeCount(nodeCap);
}

} // namespace pasim::icgen
