#ifndef PASIM_TIMING_HPP
#define PASIM_TIMING_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pasim::timing {

// Hash-phase execution time y = b0 + b1*N + b2*c + b3*N*c, in microseconds,
// with N the covered byte count and c the per-iteration instruction count.
struct TimingModel {
    double beta0 = 0;
    double beta1 = 0;
    double beta2 = 0;
    double beta3 = 0;
    double sigmaM = 0; // mean absolute residual, us

    double predict(double nBytes, double instructions) const {
        return beta0 + beta1 * nBytes + beta2 * instructions +
               beta3 * nBytes * instructions;
    }
    // Exact analytic gradient (d/dN, d/dc).
    std::pair<double, double> gradient(double nBytes, double instructions) const {
        return {beta1 + beta3 * instructions, beta2 + beta3 * nBytes};
    }
};

// Network transfer time y = slope * bytes + intercept, in microseconds.
struct NetworkModel {
    double slope = 0;
    double intercept = 0;
    double sigmaN = 0; // mean absolute residual, us

    double predict(double bytes) const { return slope * bytes + intercept; }
};

struct TimingSample {
    double nBytes;
    double instructions;
    double timeUs;
};

struct NetworkSample {
    double bytes;
    double timeUs;
};

struct DetectionConfig {
    double gamma = 10;      // tolerance factor
    double sigmaS = 2;      // sampling error, us (= 1e6 / sample rate)
    int injectedK = 4;      // attacker instructions per loop to provision for
    int maxInstructions = 300;
    double coverageMin = 1e-6;
    std::uint64_t nTotal = 200ull * 1024 * 1024; // protected region size, bytes
    int minInstructions = 40; // configured floor for the program size
    unsigned wordSize = 4;
};

// Least squares with the interaction column. Throws LearningFailure for
// fewer than 4 samples or a singular design.
TimingModel fitTimingModel(const std::vector<TimingSample> &samples);

// Ordinary least squares line. Throws LearningFailure for fewer than 2
// distinct byte counts.
NetworkModel fitNetworkModel(const std::vector<NetworkSample> &samples);

// Hash-phase alarm: |predicted - measured| >= gamma * max(sigma_m, sigma_s).
bool detectHashPhase(double measuredUs, double predictedUs, const TimingModel &model,
                     const DetectionConfig &cfg);

// Network-phase alarm: |predicted - measured| >= gamma * max(sigma_n, sigma_s).
bool detectNetworkPhase(double measuredUs, double predictedUs, const NetworkModel &model,
                        const DetectionConfig &cfg);

struct ProgramParameters {
    std::uint64_t nBytes = 0;  // coverage per round
    int instructions = 0;      // per-iteration instruction count
    double toleranceUs = 0;    // designed rate gap gamma*(sigma_m + sigma_s)
};

// Minimizes predicted runtime subject to: a k-instruction injection must
// shift the hash phase by more than the designed tolerance, the program
// transfer must be visible in the network phase, the instruction budget,
// and the coverage floor. Throws Infeasible naming the violated constraint.
ProgramParameters optimizeParameters(const TimingModel &model, const NetworkModel &net,
                                     const DetectionConfig &cfg);

// key=value model files.
std::string encodeTimingModel(const TimingModel &m);
TimingModel decodeTimingModel(const std::string &text);
std::string encodeNetworkModel(const NetworkModel &m);
NetworkModel decodeNetworkModel(const std::string &text);
void writeTimingModel(const std::string &path, const TimingModel &m);
TimingModel readTimingModel(const std::string &path);
void writeNetworkModel(const std::string &path, const NetworkModel &m);
NetworkModel readNetworkModel(const std::string &path);

} // namespace pasim::timing

#endif
