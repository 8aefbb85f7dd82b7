#include "pasim/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "pasim/errors.hpp"
#include "pasim/wire.hpp"

namespace pasim::protocol {

namespace {
constexpr char kChallengeMagic[4] = {'P', 'A', 'C', 'H'};
constexpr char kResponseMagic[4] = {'P', 'A', 'R', 'S'};
constexpr std::uint8_t kVersion = 1;
} // namespace

std::vector<std::uint8_t> encodeChallenge(const Challenge &ch) {
    ByteWriter w;
    w.magic(kChallengeMagic);
    w.u8(kVersion);
    w.u64(ch.nonce);
    w.u16(static_cast<std::uint16_t>(ch.addresses.tuples.size()));
    for (const auto &t : ch.addresses.tuples) {
        w.u64(t.base);
        w.u16(static_cast<std::uint16_t>(t.words));
    }
    w.bytes(icgen::serialize(ch.program));
    w.appendCrc();
    return w.take();
}

Challenge decodeChallenge(const std::vector<std::uint8_t> &wire, bool strict) {
    ByteReader r(wire);
    r.expectMagic(kChallengeMagic, "challenge");
    std::uint8_t ver = r.u8("version");
    if (ver != kVersion)
        throw FormatError(WireError::BadVersion, r.offset() - 1,
                          "challenge: unsupported version");
    Challenge ch;
    ch.nonce = r.u64("nonce");
    std::uint16_t count = r.u16("tuple count");
    if (count == 0)
        throw FormatError(WireError::Malformed, r.offset() - 2,
                          "challenge: empty address list");
    ch.addresses.tuples.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        icgen::AddressTuple t;
        t.base = r.u64("tuple base");
        t.words = r.u16("tuple words");
        if (t.words == 0)
            throw FormatError(WireError::Malformed, r.offset() - 2,
                              "challenge: zero-word tuple");
        ch.addresses.tuples.push_back(t);
    }
    std::size_t progOffset = r.offset();
    std::size_t after = progOffset;
    ch.program = icgen::deserializeFrom(wire.data(), wire.size() - 4, &after, strict);
    // Re-anchor the reader past the program blob, then check the frame CRC.
    ByteReader tail(wire.data() + after, wire.size() - after);
    if (tail.remaining() != 4)
        throw FormatError(WireError::Malformed, after, "challenge: trailing bytes");
    std::uint32_t stored = tail.u32("crc");
    std::uint32_t actual = crc32(wire.data(), after);
    if (stored != actual)
        throw FormatError(WireError::BadCrc, after, "challenge: crc mismatch");

    ch.addresses.wordSize = ch.program.wordSize;
    std::uint64_t words = 0;
    for (const auto &t : ch.addresses.tuples)
        words += t.words;
    ch.addresses.totalBytes = words * ch.addresses.wordSize;
    return ch;
}

std::vector<std::uint8_t> encodeResponse(const Response &resp) {
    ByteWriter w;
    w.magic(kResponseMagic);
    w.u8(kVersion);
    w.u8(static_cast<std::uint8_t>(resp.hash.size()));
    w.bytes(resp.hash);
    w.appendCrc();
    return w.take();
}

Response decodeResponse(const std::vector<std::uint8_t> &wire) {
    ByteReader r(wire);
    r.expectMagic(kResponseMagic, "response");
    std::uint8_t ver = r.u8("version");
    if (ver != kVersion)
        throw FormatError(WireError::BadVersion, r.offset() - 1,
                          "response: unsupported version");
    std::uint8_t len = r.u8("hash length");
    if (len == 0)
        throw FormatError(WireError::Malformed, r.offset() - 1,
                          "response: empty hash");
    const std::uint8_t *h = r.bytes(len, "hash");
    Response resp;
    resp.hash.assign(h, h + len);
    r.checkCrc(0, "response");
    if (r.remaining() != 0)
        throw FormatError(WireError::Malformed, r.offset(), "response: trailing bytes");
    return resp;
}

SimMachine::SimMachine(SimMachineConfig cfg)
    : cfg_(std::move(cfg)), real_(cfg_.golden), effective_(cfg_.golden),
      rng_(cfg_.seed) {
    for (const auto &patch : cfg_.compromise) {
        if (!real_.contains(patch.addr, patch.data.size()))
            throw InvalidInput("protocol: compromise patch outside memory");
        real_.write(patch.addr, patch.data.data(), patch.data.size());
    }
    // Redirect serves loads from a pristine shadow; Hidden restores the
    // bytes for the round. Either way the hash loop reads golden content.
    if (cfg_.behavior == Behavior::Honest || cfg_.behavior == Behavior::Proxy)
        effective_ = real_;
}

RespondResult SimMachine::respond(const std::vector<std::uint8_t> &challengeWire) {
    Challenge ch;
    try {
        ch = decodeChallenge(challengeWire);
    } catch (const FormatError &e) {
        throw ProtocolError(std::string("prover: rejected challenge: ") + e.what());
    }

    icgen::ExecResult exec = icgen::execute(ch.program, effective_, ch.addresses, ch.nonce);
    int ipi = icgen::instructionsPerIteration(ch.program);
    int effectiveIpi = ipi;
    std::uint64_t instructions = exec.instructionCount;
    if (cfg_.behavior == Behavior::Redirect) {
        effectiveIpi += cfg_.redirectK;
        instructions += ch.addresses.wordCount() *
                        static_cast<std::uint64_t>(cfg_.redirectK);
    }

    double nBytes = static_cast<double>(ch.addresses.totalBytes);
    double hashUs = cfg_.timing.hash.predict(nBytes, effectiveIpi) +
                    rng_.gaussian(0, cfg_.timing.sigmaTrueUs);
    hashUs = std::max(hashUs, 1.0);

    double initUs = cfg_.timing.net.predict(static_cast<double>(challengeWire.size())) +
                    rng_.gaussian(0, cfg_.timing.sigmaNetTrueUs);
    if (cfg_.behavior == Behavior::Proxy)
        initUs += cfg_.timing.net.predict(static_cast<double>(cfg_.proxyExtraBytes)) +
                  rng_.gaussian(0, cfg_.timing.sigmaNetTrueUs);
    initUs = std::max(initUs, 1.0);

    RespondResult out;
    out.response.hash = exec.hash.toBytes();
    out.responseWire = encodeResponse(out.response);
    out.instructionCount = instructions;

    double outUs = cfg_.timing.net.predict(static_cast<double>(out.responseWire.size())) +
                   rng_.gaussian(0, cfg_.timing.sigmaNetTrueUs);
    outUs = std::max(outUs, 1.0);

    using power::Phase;
    using power::StateLabel;
    double halfPeriod = cfg_.pfsm.networkPeriod / 2;
    std::vector<Phase> phases;
    phases.push_back(Phase{StateLabel::S1, initUs * 1e-6, true});
    phases.push_back(Phase{StateLabel::S0, halfPeriod, false});
    phases.push_back(Phase{StateLabel::S2, cfg_.loadPhaseUs * 1e-6, false});
    phases.push_back(Phase{StateLabel::S3, hashUs * 1e-6, false});
    phases.push_back(Phase{StateLabel::S0, halfPeriod, false});
    phases.push_back(Phase{StateLabel::S1, outUs * 1e-6, false});
    out.trace = power::synthesizeTrace(phases, cfg_.pfsm, cfg_.sampleRateHz, rng_);
    return out;
}

power::ExtractionConfig roundExtractionConfig() {
    power::ExtractionConfig cfg;
    cfg.lowpass1Window = 3;
    cfg.lowpass2Window = 1;
    cfg.minSegment = 2;
    cfg.mergeTolerance = 0.05;
    return cfg;
}

Verifier::Verifier(icgen::MemoryImage golden, VerifierModels models,
                   timing::DetectionConfig detection, ChallengeParameters params)
    : golden_(std::move(golden)), models_(std::move(models)),
      detection_(detection), params_(params) {}

Challenge Verifier::initiate(RandomSource &rng) {
    Challenge ch;
    ch.program = icgen::assembleProgramWithCost(params_.degree, params_.targetCost,
                                                params_.accumulatorBits, rng,
                                                params_.wordSize);
    ch.addresses = icgen::genAddressList(params_.nBytes, golden_.lo, golden_.hi(),
                                         params_.wordSize, rng);
    if (ch.addresses.coverage() < detection_.coverageMin)
        throw Infeasible("coverage", "verifier: coverage below the configured floor");
    do {
        ch.nonce = rng.u64();
    } while (!usedNonces_.insert(ch.nonce).second);
    return ch;
}

std::vector<power::StateLabel> canonicalizeLabels(std::vector<power::StateLabel> labels) {
    using power::StateLabel;
    for (std::size_t i = 0; i + 2 < labels.size(); ++i) {
        if (labels[i] == StateLabel::S3 && labels[i + 1] == StateLabel::S0 &&
            labels[i + 2] == StateLabel::S1) {
            labels.insert(labels.begin() + static_cast<std::ptrdiff_t>(i + 1),
                          StateLabel::S0);
            break;
        }
    }
    return labels;
}

Verdict Verifier::verify(const Challenge &ch, const Response &resp,
                         const power::PowerTrace &trace) const {
    Verdict v;

    icgen::ExecResult expected = icgen::execute(ch.program, golden_, ch.addresses, ch.nonce);
    v.outputOk = (resp.hash == expected.hash.toBytes());

    auto segments = power::extractPowerStates(trace, models_.extraction);
    auto labels = power::classifyStates(segments, models_.pfsm, models_.levelTolerance);
    v.languageOk = power::validateLanguage(canonicalizeLabels(labels));

    // Phase attribution: S1 before the load phase is the challenge
    // transfer, the S3 plateau is the hash and S1 after it is the response
    // transfer.
    using power::StateLabel;
    std::ptrdiff_t s2 = -1, s3 = -1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == StateLabel::S2 && s2 < 0)
            s2 = static_cast<std::ptrdiff_t>(i);
        else if (labels[i] == StateLabel::S3 && s2 >= 0 && s3 < 0)
            s3 = static_cast<std::ptrdiff_t>(i);
    }

    // Quiet runs lose the filter transition band at both ends; the true
    // state boundary sits mid-gap between adjacent runs. Rebuild phase
    // durations from those midpoints.
    auto refinedDuration = [&](std::size_t i) {
        double start = (i == 0) ? segments[i].tA
                                : 0.5 * (segments[i - 1].tB + segments[i].tA);
        double end = (i + 1 == segments.size())
                         ? segments[i].tB
                         : 0.5 * (segments[i].tB + segments[i + 1].tA);
        return (end - start) * 1e6;
    };

    VerdictDetail &d = v.detail;
    if (s2 >= 0 && s3 == s2 + 1) {
        d.phasesParsed = true;
        for (std::ptrdiff_t i = 0; i < s2; ++i)
            if (labels[static_cast<std::size_t>(i)] == StateLabel::S1)
                d.measuredInitUs += refinedDuration(static_cast<std::size_t>(i));
        d.measuredHashUs = refinedDuration(static_cast<std::size_t>(s3));
        for (std::size_t i = static_cast<std::size_t>(s3) + 1; i < labels.size(); ++i)
            if (labels[i] == StateLabel::S1)
                d.measuredOutUs += refinedDuration(i);
    }

    int ipi = icgen::instructionsPerIteration(ch.program);
    double nBytes = static_cast<double>(ch.addresses.totalBytes);
    d.predictedHashUs = models_.timing.predict(nBytes, ipi);
    std::size_t wireSize = encodeChallenge(ch).size();
    d.predictedInitUs = models_.net.predict(static_cast<double>(wireSize));
    d.predictedOutUs =
        models_.net.predict(static_cast<double>(encodeResponse(resp).size()));

    if (d.phasesParsed) {
        d.deltaHashUs = std::fabs(d.predictedHashUs - d.measuredHashUs);
        d.deltaInitUs = std::fabs(d.predictedInitUs - d.measuredInitUs);
        d.deltaOutUs = std::fabs(d.predictedOutUs - d.measuredOutUs);
        d.hashAlarm = timing::detectHashPhase(d.measuredHashUs, d.predictedHashUs,
                                              models_.timing, detection_);
        d.netAlarm = timing::detectNetworkPhase(d.measuredInitUs, d.predictedInitUs,
                                                models_.net, detection_) ||
                     timing::detectNetworkPhase(d.measuredOutUs, d.predictedOutUs,
                                                models_.net, detection_);

        double halfPeriodUs = models_.pfsm.networkPeriod * 1e6 / 2;
        double reps = std::max(1.0, std::ceil(d.predictedInitUs / halfPeriodUs));
        double predictedTotal = d.predictedInitUs + models_.loadPhaseUs +
                                d.predictedHashUs + d.predictedOutUs +
                                (reps + 1) * halfPeriodUs;
        d.totalUs = trace.duration() * 1e6;
        d.rttBoundUs = rttFactor * predictedTotal;
        d.rttExceeded = d.totalUs > d.rttBoundUs;
        v.timingOk = !d.hashAlarm && !d.netAlarm && !d.rttExceeded;
    } else {
        v.timingOk = false;
    }
    return v;
}

RoundArtifacts runRound(Verifier &verifier, SimMachine &machine, RandomSource &rng) {
    RoundArtifacts art;
    art.challenge = verifier.initiate(rng);
    art.challengeWire = encodeChallenge(art.challenge);
    RespondResult r = machine.respond(art.challengeWire);
    art.response = decodeResponse(r.responseWire);
    art.trace = std::move(r.trace);
    art.instructionCount = r.instructionCount;
    art.verdict = verifier.verify(art.challenge, art.response, art.trace);
    return art;
}

} // namespace pasim::protocol
