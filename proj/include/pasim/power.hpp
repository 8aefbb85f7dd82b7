#ifndef PASIM_POWER_HPP
#define PASIM_POWER_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pasim/rng.hpp"

namespace pasim::power {

enum class StateLabel : std::uint8_t { S0, S1, S2, S3, Unknown };

const char *stateName(StateLabel s);

// Uniformly sampled current signal (amperes).
struct PowerTrace {
    std::vector<double> samples;
    double sampleRate = 0; // Hz

    double duration() const {
        return static_cast<double>(samples.size()) / sampleRate;
    }
};

// Per-machine power state machine parameters (amperes / seconds).
struct PfsmParams {
    double idle = 0.870;    // S0
    double network = 1.36;  // S1
    double load = 2.34;     // S2
    double hash = 1.58;     // S3
    double networkPeriod = 200e-6; // S0/S1 alternation period for long transfers
    double noiseSigma = 0.02;

    double level(StateLabel s) const;
};

// Maximal near-constant stretch of the filtered signal.
struct PowerStateSegment {
    double meanCurrent = 0; // amperes
    double tA = 0;          // seconds
    double tB = 0;

    double duration() const { return tB - tA; }
};

struct ExtractionConfig {
    unsigned lowpass1Window = 5; // samples
    unsigned lowpass2Window = 5;
    double threshold = 0;       // A/s; <= 0 means 4 * median(|filtered derivative|)
    unsigned minSegment = 8;    // samples
    double mergeTolerance = 0.05; // amperes
};

// One synthesis step: hold `state` for `duration` seconds. A phase marked
// longNetwork expands into S0/S1 alternation with the machine's network
// period; its duration is the total S1 (transfer-active) time.
struct Phase {
    StateLabel state = StateLabel::S0;
    double duration = 0; // seconds
    bool longNetwork = false;
};

// Constant-level plateaus plus i.i.d. Gaussian noise. Total sample count is
// round(total duration * sampleRate).
PowerTrace synthesizeTrace(const std::vector<Phase> &phases, const PfsmParams &params,
                           double sampleRate, RandomSource &rng);

// Filter -> derivative -> threshold pipeline; returns the quiet stretches.
std::vector<PowerStateSegment> extractPowerStates(const PowerTrace &trace,
                                                  const ExtractionConfig &cfg);

// Nearest PFSM level within +-levelTolerance (fraction), else Unknown.
std::vector<StateLabel> classifyStates(const std::vector<PowerStateSegment> &segments,
                                       const PfsmParams &params,
                                       double levelTolerance = 0.10);

// True iff the sequence is exactly (S0 S1)+ (S0 S2 S3 S0) (S0 S1).
bool validateLanguage(const std::vector<StateLabel> &states);

// Learns the four current levels from honest protocol traces plus a
// dedicated idle trace. Throws LearningFailure when fewer than four
// distinguishable levels are present.
PfsmParams learnPfsm(const std::vector<PowerTrace> &protocolTraces,
                     const PowerTrace &idleTrace, const ExtractionConfig &cfg);

// Trace file format: "PWTR", version u8, sample rate f64, count u64,
// samples f32, all little-endian.
std::vector<std::uint8_t> encodeTrace(const PowerTrace &trace);
PowerTrace decodeTrace(const std::vector<std::uint8_t> &data);
void writeTraceFile(const std::string &path, const PowerTrace &trace);
PowerTrace readTraceFile(const std::string &path);

} // namespace pasim::power

#endif
