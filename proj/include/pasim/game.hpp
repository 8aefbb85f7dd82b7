#ifndef PASIM_GAME_HPP
#define PASIM_GAME_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pasim/rng.hpp"

namespace pasim::game {

// Exponential-renewal verifier vs. periodic hiding attacker.
struct GameConfig {
    double lambda0 = 1.0 / 60;  // verifier rate, 1/s
    double t1 = 120;            // attacker period, s (lambda1 = 1/t1)
    double alpha0 = 903e-6;     // attestation duration, s
    double alpha1 = -1;         // hide duration, s; negative means t1/2
    double pe = 0.99998;        // per-attestation evasion probability
    double horizon = 864000;    // 10 days, s
    std::uint64_t runs = 1000;
    std::uint64_t seed = 1;

    double hideDuration() const { return alpha1 < 0 ? t1 / 2 : alpha1; }
    void validate() const;
};

struct Attestation {
    double t = 0;
    bool fullyHidden = false;
    bool detected = false;
};

// Full record of one run; the attacker's activity function is recoverable
// from (phase, t1, alpha1).
struct GameTrace {
    std::vector<Attestation> attestations;
    double phase = 0;  // hide intervals are [phase + m*t1, phase + m*t1 + alpha1)
    double t1 = 0;
    double alpha1 = 0;
    double endTime = 0; // detection time or horizon
    bool detected = false;
};

struct GameMetrics {
    double pDetect = 0;
    double fracInactive = 0;
    double hitRatio = 0;
};

// Hidden time accumulated in [0, upTo) for a cyclic hide schedule.
double hiddenMeasure(double phase, double t1, double alpha1, double upTo);

// True when [t, t+alpha0) lies entirely inside a hide interval.
bool fullyHidden(double t, double phase, double t1, double alpha1, double alpha0);

// One event-driven run. RNG draw order: phase, then per attestation one
// exponential gap and one detection uniform.
GameTrace simulateRun(const GameConfig &cfg, RandomSource &rng);

GameMetrics computeMetrics(const std::vector<GameTrace> &traces, double horizon);

struct SweepRow {
    double t0 = 0;
    double t1 = 0;
    double lambda0 = 0;
    double lambda1 = 0;
    GameMetrics metrics;
    std::uint64_t runs = 0;
    double horizon = 0;
    // diagnostics, not part of the CSV schema
    std::uint64_t attestations = 0;
    double pDetectSe = 0;      // binomial standard error over runs
    double fracInactiveSe = 0; // standard error of the per-run mean
    double hitRatioSe = 0;     // binomial standard error over pooled attestations
};

struct SweepGrid {
    std::vector<double> t0Values; // verifier mean inter-arrival times, s
    std::vector<double> t1Values; // attacker periods, s
};

// Inclusive [lo, hi] with the given step.
std::vector<double> gridRange(double lo, double hi, double step);

// Runs*|grid| independent simulations with per-cell derived seeds; rows are
// ordered by (t0 index, t1 index) and bit-reproducible for a fixed master
// seed regardless of thread count.
std::vector<SweepRow> sweep(const SweepGrid &grid, const GameConfig &tmpl,
                            unsigned threads = 0);

std::string sweepCsv(const std::vector<SweepRow> &rows);
std::string sweepJson(const std::vector<SweepRow> &rows);

struct StrategyStats {
    double pDetect = 0;
    double ciHalfWidth = 0; // 95% normal-approximation interval
    std::uint64_t runs = 0;
};

struct ProbeReport {
    StrategyStats periodic;
    StrategyStats jittered;
    double jitterFraction = 0;
    // True when the intervals overlap or periodic detection is lower.
    bool periodicNoWorse = false;
};

// Compares the periodic attacker against a jittered-periodic attacker of
// equal expected rate (hide-start gaps uniform in t1*(1 +- jitter)).
// A consistency probe, not a proof.
ProbeReport bestResponseProbe(const GameConfig &cfg, double jitterFraction);

// Same engine as the probe's jittered branch; exposed for tests.
GameTrace simulateRunJittered(const GameConfig &cfg, double jitterFraction,
                              std::uint64_t runSeed);
// Periodic run with the probe's stream layout (phase/jitter/event streams
// derived from runSeed); identical to simulateRunJittered at jitter 0.
GameTrace simulateRunProbePeriodic(const GameConfig &cfg, std::uint64_t runSeed);

} // namespace pasim::game

#endif
