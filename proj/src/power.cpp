#include "pasim/power.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pasim/errors.hpp"
#include "pasim/wire.hpp"

namespace pasim::power {

const char *stateName(StateLabel s) {
    switch (s) {
    case StateLabel::S0: return "S0";
    case StateLabel::S1: return "S1";
    case StateLabel::S2: return "S2";
    case StateLabel::S3: return "S3";
    case StateLabel::Unknown: return "UNKNOWN";
    }
    return "?";
}

double PfsmParams::level(StateLabel s) const {
    switch (s) {
    case StateLabel::S0: return idle;
    case StateLabel::S1: return network;
    case StateLabel::S2: return load;
    case StateLabel::S3: return hash;
    default: return 0;
    }
}

PowerTrace synthesizeTrace(const std::vector<Phase> &phases, const PfsmParams &params,
                           double sampleRate, RandomSource &rng) {
    if (sampleRate <= 0)
        throw InvalidInput("power: sample rate must be positive");

    // Expand long-network phases into (S0, S1) alternation. The S1 portions
    // sum to the requested transfer time; S0 gaps are half a period each.
    std::vector<std::pair<double, double>> pieces; // (level, duration)
    for (const auto &ph : phases) {
        if (ph.duration <= 0)
            throw InvalidInput("power: phase durations must be positive");
        if (ph.longNetwork) {
            double halfPeriod = params.networkPeriod / 2;
            unsigned reps = static_cast<unsigned>(
                std::max(1.0, std::ceil(ph.duration / halfPeriod)));
            double active = ph.duration / reps;
            for (unsigned i = 0; i < reps; ++i) {
                pieces.emplace_back(params.idle, halfPeriod);
                pieces.emplace_back(params.network, active);
            }
        } else {
            pieces.emplace_back(params.level(ph.state), ph.duration);
        }
    }

    PowerTrace trace;
    trace.sampleRate = sampleRate;
    double cum = 0;
    std::size_t written = 0;
    for (const auto &[level, dur] : pieces) {
        cum += dur;
        std::size_t until = static_cast<std::size_t>(std::llround(cum * sampleRate));
        for (; written < until; ++written)
            trace.samples.push_back(level + params.noiseSigma * rng.gaussian());
    }
    return trace;
}

namespace {

// Centered moving average; windows shrink at the trace edges. Windows are
// summed directly so constant stretches stay bit-for-bit constant.
std::vector<double> movingAverage(const std::vector<double> &x, unsigned window) {
    if (window <= 1)
        return x;
    std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    std::ptrdiff_t rl = (window - 1) / 2;
    std::ptrdiff_t rr = window / 2;
    std::vector<double> out(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, i - rl);
        std::ptrdiff_t b = std::min<std::ptrdiff_t>(n - 1, i + rr);
        double s = 0;
        for (std::ptrdiff_t j = a; j <= b; ++j)
            s += x[j];
        out[i] = s / static_cast<double>(b - a + 1);
    }
    return out;
}

} // namespace

std::vector<PowerStateSegment> extractPowerStates(const PowerTrace &trace,
                                                  const ExtractionConfig &cfg) {
    std::size_t n = trace.samples.size();
    if (n <= cfg.lowpass1Window + cfg.lowpass2Window)
        return {};

    std::vector<double> lowpassed = movingAverage(trace.samples, cfg.lowpass1Window);
    std::vector<double> deriv(n, 0.0);
    for (std::size_t t = 1; t < n; ++t)
        deriv[t] = (lowpassed[t] - lowpassed[t - 1]) * trace.sampleRate;
    std::vector<double> derivF = movingAverage(deriv, cfg.lowpass2Window);

    double lambda = cfg.threshold;
    if (lambda <= 0) {
        std::vector<double> mag(n);
        for (std::size_t t = 0; t < n; ++t)
            mag[t] = std::fabs(derivF[t]);
        std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(n / 2),
                         mag.end());
        double peak = 0;
        for (double v : trace.samples)
            peak = std::max(peak, std::fabs(v));
        // floor keeps float rounding on constant stretches below threshold
        lambda = std::max(4.0 * mag[n / 2], 1e-9 * trace.sampleRate * peak);
    }

    // Maximal quiet runs.
    struct Run {
        std::size_t a, b; // inclusive
        double mean;
    };
    std::vector<Run> runs;
    std::size_t start = 0;
    bool inRun = false;
    for (std::size_t t = 0; t <= n; ++t) {
        bool quiet = t < n && std::fabs(derivF[t]) <= lambda;
        if (quiet && !inRun) {
            start = t;
            inRun = true;
        } else if (!quiet && inRun) {
            inRun = false;
            runs.push_back(Run{start, t - 1, 0.0});
        }
    }
    for (auto &r : runs) {
        double s = 0;
        for (std::size_t t = r.a; t <= r.b; ++t)
            s += lowpassed[t];
        r.mean = s / static_cast<double>(r.b - r.a + 1);
    }

    // Adjacent runs at the same level are noise splits or filter-edge
    // stubs; merge them before the size filter so they do not truncate the
    // segment they belong to.
    std::vector<Run> merged;
    for (const auto &r : runs) {
        if (!merged.empty() && std::fabs(merged.back().mean - r.mean) < cfg.mergeTolerance) {
            Run &m = merged.back();
            m.b = r.b;
            double s = 0;
            for (std::size_t t = m.a; t <= m.b; ++t)
                s += lowpassed[t];
            m.mean = s / static_cast<double>(m.b - m.a + 1);
        } else {
            merged.push_back(r);
        }
    }

    std::vector<PowerStateSegment> out;
    out.reserve(merged.size());
    for (const auto &r : merged) {
        if (r.b - r.a + 1 < cfg.minSegment)
            continue;
        PowerStateSegment seg;
        seg.meanCurrent = r.mean;
        seg.tA = static_cast<double>(r.a) / trace.sampleRate;
        seg.tB = static_cast<double>(r.b + 1) / trace.sampleRate;
        out.push_back(seg);
    }
    return out;
}

std::vector<StateLabel> classifyStates(const std::vector<PowerStateSegment> &segments,
                                       const PfsmParams &params, double levelTolerance) {
    static const StateLabel order[4] = {StateLabel::S0, StateLabel::S1, StateLabel::S2,
                                        StateLabel::S3};
    std::vector<StateLabel> out;
    out.reserve(segments.size());
    for (const auto &seg : segments) {
        StateLabel best = StateLabel::Unknown;
        double bestDist = 0;
        for (StateLabel s : order) {
            double d = std::fabs(seg.meanCurrent - params.level(s));
            if (best == StateLabel::Unknown || d < bestDist) {
                best = s;
                bestDist = d;
            }
        }
        if (bestDist > levelTolerance * params.level(best))
            best = StateLabel::Unknown;
        out.push_back(best);
    }
    return out;
}

bool validateLanguage(const std::vector<StateLabel> &states) {
    // DFA for (S0 S1)+ (S0 S2 S3 S0) (S0 S1).
    enum State {
        Start,
        AfterInitS0,   // saw the S0 opening an init pair
        AfterPair,     // one or more (S0 S1) pairs read
        AfterBranchS0, // S0 that either starts a new pair or the hash phase
        AfterS2,
        AfterS3,
        AfterHashS0,   // S0 closing the hash phase
        AfterOutS0,    // S0 opening the output pair
        Accept,
    };
    State st = Start;
    for (StateLabel sym : states) {
        switch (st) {
        case Start:
            if (sym != StateLabel::S0)
                return false;
            st = AfterInitS0;
            break;
        case AfterInitS0:
            if (sym != StateLabel::S1)
                return false;
            st = AfterPair;
            break;
        case AfterPair:
            if (sym != StateLabel::S0)
                return false;
            st = AfterBranchS0;
            break;
        case AfterBranchS0:
            if (sym == StateLabel::S1)
                st = AfterPair;
            else if (sym == StateLabel::S2)
                st = AfterS2;
            else
                return false;
            break;
        case AfterS2:
            if (sym != StateLabel::S3)
                return false;
            st = AfterS3;
            break;
        case AfterS3:
            if (sym != StateLabel::S0)
                return false;
            st = AfterHashS0;
            break;
        case AfterHashS0:
            if (sym != StateLabel::S0)
                return false;
            st = AfterOutS0;
            break;
        case AfterOutS0:
            if (sym != StateLabel::S1)
                return false;
            st = Accept;
            break;
        case Accept:
            return false; // trailing symbols
        }
    }
    return st == Accept;
}

PfsmParams learnPfsm(const std::vector<PowerTrace> &protocolTraces,
                     const PowerTrace &idleTrace, const ExtractionConfig &cfg) {
    if (protocolTraces.empty())
        throw InvalidInput("power: need at least one training trace");
    if (idleTrace.samples.empty())
        throw InvalidInput("power: idle trace is empty");

    double idleSum = 0;
    for (double v : idleTrace.samples)
        idleSum += v;
    double idle = idleSum / static_cast<double>(idleTrace.samples.size());
    double var = 0;
    for (double v : idleTrace.samples)
        var += (v - idle) * (v - idle);
    double sigma = std::sqrt(var / static_cast<double>(idleTrace.samples.size()));

    std::vector<double> means;
    for (const auto &trace : protocolTraces)
        for (const auto &seg : extractPowerStates(trace, cfg))
            means.push_back(seg.meanCurrent);

    // Drop idle-level segments, then split the rest into level clusters at
    // gaps wider than the merge tolerance allows.
    double idleBand = std::max(0.1, 4 * sigma);
    std::vector<double> active;
    for (double m : means)
        if (std::fabs(m - idle) > idleBand)
            active.push_back(m);
    std::sort(active.begin(), active.end());

    std::vector<std::pair<double, unsigned>> clusters; // (mean, count)
    const double gap = 0.1;
    for (double m : active) {
        if (clusters.empty() ||
            m - (clusters.back().first / clusters.back().second) > gap)
            clusters.emplace_back(m, 1);
        else {
            clusters.back().first += m;
            clusters.back().second += 1;
        }
    }
    if (clusters.size() != 3)
        throw LearningFailure("power: expected idle plus three distinguishable levels, got " +
                              std::to_string(clusters.size() + 1));

    PfsmParams learned;
    learned.idle = idle;
    learned.noiseSigma = sigma;
    learned.network = clusters[0].first / clusters[0].second;
    learned.hash = clusters[1].first / clusters[1].second;
    learned.load = clusters[2].first / clusters[2].second;
    return learned;
}

std::vector<std::uint8_t> encodeTrace(const PowerTrace &trace) {
    ByteWriter w;
    w.magic("PWTR");
    w.u8(1);
    w.f64(trace.sampleRate);
    w.u64(trace.samples.size());
    for (double s : trace.samples) {
        float f = static_cast<float>(s);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        w.u32(bits);
    }
    return w.take();
}

PowerTrace decodeTrace(const std::vector<std::uint8_t> &data) {
    ByteReader r(data);
    r.expectMagic("PWTR", "trace");
    std::uint8_t ver = r.u8("version");
    if (ver != 1)
        throw FormatError(WireError::BadVersion, r.offset() - 1,
                          "trace: unsupported version");
    PowerTrace trace;
    trace.sampleRate = r.f64("sample rate");
    if (!(trace.sampleRate > 0))
        throw FormatError(WireError::Malformed, r.offset() - 8,
                          "trace: sample rate must be positive");
    std::uint64_t count = r.u64("sample count");
    if (r.remaining() != count * 4)
        throw FormatError(WireError::Truncated, r.offset(),
                          "trace: sample payload size mismatch");
    trace.samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint32_t bits = r.u32("sample");
        float f;
        std::memcpy(&f, &bits, 4);
        trace.samples.push_back(f);
    }
    return trace;
}

void writeTraceFile(const std::string &path, const PowerTrace &trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("power: cannot open " + path + " for writing");
    auto bytes = encodeTrace(trace);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

PowerTrace readTraceFile(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("power: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decodeTrace(bytes);
}

} // namespace pasim::power
