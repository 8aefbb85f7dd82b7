#ifndef PASIM_PROTOCOL_HPP
#define PASIM_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "pasim/icgen.hpp"
#include "pasim/power.hpp"
#include "pasim/rng.hpp"
#include "pasim/timing.hpp"

namespace pasim::protocol {

// Round challenge: the program f, address list L and nonce.
struct Challenge {
    icgen::ICProgram program;
    icgen::AddressList addresses;
    std::uint64_t nonce = 0;
};

struct Response {
    std::vector<std::uint8_t> hash; // little-endian, accumulatorWidth/8 bytes
};

// Challenge wire: "PACH" ver=1 nonce u64, tuple count u16,
// tuples {base u64, words u16}, embedded IC-program blob, CRC-32.
std::vector<std::uint8_t> encodeChallenge(const Challenge &ch);
Challenge decodeChallenge(const std::vector<std::uint8_t> &wire, bool strict = false);

// Response wire: "PARS" ver=1, hash_len u8 (bytes), hash bytes, CRC-32.
std::vector<std::uint8_t> encodeResponse(const Response &r);
Response decodeResponse(const std::vector<std::uint8_t> &wire);

enum class Behavior {
    Honest,
    Redirect, // shadow-copy loads, k extra instructions per iteration
    Proxy,    // forwards the round to a remote machine
    Hidden,   // compromised bytes restored for the round
};

// Ground-truth machine laws; the verifier's learned models approximate
// these.
struct MachineTiming {
    timing::TimingModel hash;
    double sigmaTrueUs = 0; // per-round execution time jitter
    timing::NetworkModel net;
    double sigmaNetTrueUs = 0;
};

struct CompromisePatch {
    std::uint64_t addr = 0;
    std::vector<std::uint8_t> data;
};

struct SimMachineConfig {
    icgen::MemoryImage golden;
    std::vector<CompromisePatch> compromise;
    Behavior behavior = Behavior::Honest;
    int redirectK = 4;
    std::uint64_t proxyExtraBytes = 160;
    MachineTiming timing;
    power::PfsmParams pfsm;
    double loadPhaseUs = 50;
    double sampleRateHz = 500e3;
    std::uint64_t seed = 1;
};

struct RespondResult {
    Response response;
    std::vector<std::uint8_t> responseWire;
    power::PowerTrace trace;
    std::uint64_t instructionCount = 0;
};

// The untrusted machine. Owns its RNG; one round at a time.
class SimMachine {
  public:
    explicit SimMachine(SimMachineConfig cfg);

    // Runs one round: deserializes the challenge, executes the program over
    // the behavior's effective memory and synthesizes the current trace.
    // Throws ProtocolError on a malformed challenge (no trace emitted).
    RespondResult respond(const std::vector<std::uint8_t> &challengeWire);

    const icgen::MemoryImage &realMemory() const { return real_; }
    Behavior behavior() const { return cfg_.behavior; }

  private:
    SimMachineConfig cfg_;
    icgen::MemoryImage real_;      // possibly compromised state
    icgen::MemoryImage effective_; // what the hash loop actually reads
    RandomSource rng_;
};

struct VerdictDetail {
    bool phasesParsed = false;
    double measuredHashUs = 0;
    double predictedHashUs = 0;
    double deltaHashUs = 0;
    double measuredInitUs = 0;
    double predictedInitUs = 0;
    double deltaInitUs = 0;
    double measuredOutUs = 0;
    double predictedOutUs = 0;
    double deltaOutUs = 0;
    double totalUs = 0;
    double rttBoundUs = 0;
    bool hashAlarm = false;
    bool netAlarm = false;
    bool rttExceeded = false;
};

struct Verdict {
    bool outputOk = false;
    bool timingOk = false;
    bool languageOk = false;
    VerdictDetail detail;

    bool pass() const { return outputOk && timingOk && languageOk; }
};

struct VerifierModels {
    timing::TimingModel timing;
    timing::NetworkModel net;
    power::PfsmParams pfsm;
    power::ExtractionConfig extraction;
    double levelTolerance = 0.10;
    double loadPhaseUs = 50;
};

// Extraction settings suited to round traces (short plateaus at the
// response transfer).
power::ExtractionConfig roundExtractionConfig();

struct ChallengeParameters {
    unsigned degree = 16;
    unsigned accumulatorBits = 64;
    int targetCost = 40;       // per-iteration instruction count
    std::uint64_t nBytes = 2332; // requested coverage per round
    unsigned wordSize = 4;
};

// Verifier state: golden image, learned models and detection settings.
class Verifier {
  public:
    Verifier(icgen::MemoryImage golden, VerifierModels models,
             timing::DetectionConfig detection, ChallengeParameters params);

    // Fresh (program, addresses, nonce); deterministic in rng.
    Challenge initiate(RandomSource &rng);

    Verdict verify(const Challenge &ch, const Response &resp,
                   const power::PowerTrace &trace) const;

    const icgen::MemoryImage &golden() const { return golden_; }
    const ChallengeParameters &params() const { return params_; }
    const timing::DetectionConfig &detection() const { return detection_; }
    double rttFactor = 2.0;

  private:
    icgen::MemoryImage golden_;
    VerifierModels models_;
    timing::DetectionConfig detection_;
    ChallengeParameters params_;
    std::unordered_set<std::uint64_t> usedNonces_;
};

struct RoundArtifacts {
    Challenge challenge;
    std::vector<std::uint8_t> challengeWire;
    Response response;
    power::PowerTrace trace;
    Verdict verdict;
    std::uint64_t instructionCount = 0;
};

// initiate -> respond -> verify.
RoundArtifacts runRound(Verifier &verifier, SimMachine &machine, RandomSource &rng);

// Adjacent idle plateaus merge in the physical signal; re-expands the
// single idle between the hash phase and the output transfer so the label
// string matches the protocol language.
std::vector<power::StateLabel> canonicalizeLabels(std::vector<power::StateLabel> labels);

} // namespace pasim::protocol

#endif
