#include "pasim/timing.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pasim/errors.hpp"
#include "pasim/text.hpp"

namespace pasim::timing {

namespace {

// Solves A x = b for a small dense symmetric system via Gaussian
// elimination with partial pivoting. Throws on a singular matrix.
template <std::size_t N>
std::array<double, N> solveLinear(std::array<std::array<double, N>, N> a,
                                  std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col]))
                pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-12)
            throw LearningFailure("regression: singular design matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < N; ++r) {
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < N; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t row = N; row-- > 0;) {
        double s = b[row];
        for (std::size_t c = row + 1; c < N; ++c)
            s -= a[row][c] * x[c];
        x[row] = s / a[row][row];
    }
    return x;
}

} // namespace

TimingModel fitTimingModel(const std::vector<TimingSample> &samples) {
    if (samples.size() < 4)
        throw LearningFailure("timing fit: need at least 4 samples");
    std::set<double> ns, cs;
    for (const auto &s : samples) {
        ns.insert(s.nBytes);
        cs.insert(s.instructions);
    }
    if (ns.size() < 2 || cs.size() < 2)
        throw LearningFailure("timing fit: design must span two sizes and two costs");

    std::array<std::array<double, 4>, 4> ata{};
    std::array<double, 4> aty{};
    for (const auto &s : samples) {
        std::array<double, 4> f = {1.0, s.nBytes, s.instructions,
                                   s.nBytes * s.instructions};
        for (std::size_t i = 0; i < 4; ++i) {
            aty[i] += f[i] * s.timeUs;
            for (std::size_t j = 0; j < 4; ++j)
                ata[i][j] += f[i] * f[j];
        }
    }
    auto beta = solveLinear<4>(ata, aty);

    TimingModel m;
    m.beta0 = beta[0];
    m.beta1 = beta[1];
    m.beta2 = beta[2];
    m.beta3 = beta[3];
    double absSum = 0;
    for (const auto &s : samples)
        absSum += std::fabs(s.timeUs - m.predict(s.nBytes, s.instructions));
    m.sigmaM = absSum / static_cast<double>(samples.size());
    return m;
}

NetworkModel fitNetworkModel(const std::vector<NetworkSample> &samples) {
    if (samples.size() < 2)
        throw LearningFailure("network fit: need at least 2 samples");
    std::set<double> xs;
    for (const auto &s : samples)
        xs.insert(s.bytes);
    if (xs.size() < 2)
        throw LearningFailure("network fit: need at least 2 distinct byte counts");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(samples.size());
    for (const auto &s : samples) {
        sx += s.bytes;
        sy += s.timeUs;
        sxx += s.bytes * s.bytes;
        sxy += s.bytes * s.timeUs;
    }
    double denom = n * sxx - sx * sx;
    NetworkModel m;
    m.slope = (n * sxy - sx * sy) / denom;
    m.intercept = (sy - m.slope * sx) / n;
    double absSum = 0;
    for (const auto &s : samples)
        absSum += std::fabs(s.timeUs - m.predict(s.bytes));
    m.sigmaN = absSum / n;
    return m;
}

bool detectHashPhase(double measuredUs, double predictedUs, const TimingModel &model,
                     const DetectionConfig &cfg) {
    double delta = std::fabs(predictedUs - measuredUs);
    return delta >= cfg.gamma * std::max(model.sigmaM, cfg.sigmaS);
}

bool detectNetworkPhase(double measuredUs, double predictedUs, const NetworkModel &model,
                        const DetectionConfig &cfg) {
    double delta = std::fabs(predictedUs - measuredUs);
    return delta >= cfg.gamma * std::max(model.sigmaN, cfg.sigmaS);
}

ProgramParameters optimizeParameters(const TimingModel &model, const NetworkModel &net,
                                     const DetectionConfig &cfg) {
    ProgramParameters out;
    out.toleranceUs = cfg.gamma * (model.sigmaM + cfg.sigmaS);

    // (i) Injection visibility: k*(b2 + b3*N) must exceed the tolerance.
    // The objective is increasing in N, so take the boundary solution.
    if (model.beta3 <= 0)
        throw Infeasible("injection-gap",
                         "optimize: timing model has no positive interaction term");
    double bound = (out.toleranceUs / cfg.injectedK - model.beta2) / model.beta3;
    std::uint64_t n = static_cast<std::uint64_t>(std::max(0.0, std::floor(bound))) + 1;
    while (cfg.injectedK * (model.beta2 + model.beta3 * static_cast<double>(n)) <=
           out.toleranceUs)
        ++n;

    // (iv) Coverage floor.
    std::uint64_t coverageFloor = static_cast<std::uint64_t>(
        std::ceil(cfg.coverageMin * static_cast<double>(cfg.nTotal)));
    n = std::max(n, coverageFloor);
    if (n > cfg.nTotal)
        throw Infeasible("coverage", "optimize: required coverage exceeds the region");

    // (ii) Network visibility of the program transfer, with the configured
    // floor; (iii) instruction budget. The visibility threshold uses the
    // network model error alone: sampling error would rule out exactly the
    // low-rate rows the search is meant to solve.
    int c = cfg.minInstructions;
    double netThreshold = cfg.gamma * net.sigmaN;
    while (net.predict(static_cast<double>(c) * cfg.wordSize) <= netThreshold)
        ++c;
    if (c >= cfg.maxInstructions)
        throw Infeasible("cost", "optimize: instruction budget too small for "
                                 "network-visible programs");

    out.nBytes = n;
    out.instructions = c;
    return out;
}

namespace {

std::map<std::string, double> parseKeyValues(const std::string &text) {
    std::map<std::string, double> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        std::size_t lineStart = offset;
        offset += line.size() + 1;
        if (line.empty() || line[0] == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(WireError::Malformed, lineStart,
                              "model file: expected key=value");
        bool ok = false;
        double v = parseDouble(line.substr(eq + 1), &ok);
        if (!ok)
            throw FormatError(WireError::Malformed, lineStart + eq + 1,
                              "model file: bad number");
        kv[line.substr(0, eq)] = v;
    }
    return kv;
}

double need(const std::map<std::string, double> &kv, const std::string &key) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw FormatError(WireError::Malformed, 0, "model file: missing key " + key);
    return it->second;
}

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("timing: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    if (!out)
        throw InvalidInput("timing: cannot open " + path + " for writing");
    out << text;
}

} // namespace

std::string encodeTimingModel(const TimingModel &m) {
    std::string s;
    s += "beta0=" + formatDouble(m.beta0) + "\n";
    s += "beta1=" + formatDouble(m.beta1) + "\n";
    s += "beta2=" + formatDouble(m.beta2) + "\n";
    s += "beta3=" + formatDouble(m.beta3) + "\n";
    s += "sigma_m=" + formatDouble(m.sigmaM) + "\n";
    return s;
}

TimingModel decodeTimingModel(const std::string &text) {
    auto kv = parseKeyValues(text);
    TimingModel m;
    m.beta0 = need(kv, "beta0");
    m.beta1 = need(kv, "beta1");
    m.beta2 = need(kv, "beta2");
    m.beta3 = need(kv, "beta3");
    m.sigmaM = need(kv, "sigma_m");
    return m;
}

std::string encodeNetworkModel(const NetworkModel &m) {
    std::string s;
    s += "slope=" + formatDouble(m.slope) + "\n";
    s += "intercept=" + formatDouble(m.intercept) + "\n";
    s += "sigma_n=" + formatDouble(m.sigmaN) + "\n";
    return s;
}

NetworkModel decodeNetworkModel(const std::string &text) {
    auto kv = parseKeyValues(text);
    NetworkModel m;
    m.slope = need(kv, "slope");
    m.intercept = need(kv, "intercept");
    m.sigmaN = need(kv, "sigma_n");
    return m;
}

void writeTimingModel(const std::string &path, const TimingModel &m) {
    spit(path, encodeTimingModel(m));
}
TimingModel readTimingModel(const std::string &path) {
    return decodeTimingModel(slurp(path));
}
void writeNetworkModel(const std::string &path, const NetworkModel &m) {
    spit(path, encodeNetworkModel(m));
}
NetworkModel readNetworkModel(const std::string &path) {
    return decodeNetworkModel(slurp(path));
}

} // namespace pasim::timing
