#ifndef PASIM_TESTS_SUPPORT_HPP
#define PASIM_TESTS_SUPPORT_HPP

// Shared test oracles and process helpers. Everything here is deliberately
// independent of the library implementation paths it checks.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pasim/game.hpp"
#include "pasim/gf2.hpp"
#include "pasim/rng.hpp"

namespace pasim::testsupport {

// Trial division by every polynomial of degree 1..n/2.
inline bool irreducibleByTrialDivision(std::uint64_t bits) {
    gf2::Poly p(bits);
    int n = p.degree();
    if (n < 1)
        return false;
    if (n == 1)
        return true;
    for (int dd = 1; dd <= n / 2; ++dd)
        for (std::uint64_t q = (1ull << dd); q < (2ull << dd); ++q)
            if (p.mod(gf2::Poly(q)).isZero())
                return false;
    return true;
}

// Discretized game run: same draw order as game::simulateRun, hidden check
// by scanning the attestation window in alpha0/4 steps.
inline game::GameTrace fixedStepGameOracle(const game::GameConfig &cfg,
                                           RandomSource &rng) {
    game::GameTrace trace;
    trace.t1 = cfg.t1;
    trace.alpha1 = cfg.hideDuration();
    trace.phase = rng.uniform01() * cfg.t1;
    trace.endTime = cfg.horizon;
    if (cfg.lambda0 <= 0)
        return trace;

    auto hiddenAt = [&](double t) {
        double u = std::fmod(t - trace.phase, cfg.t1);
        if (u < 0)
            u += cfg.t1;
        return u < trace.alpha1;
    };

    double t = 0;
    while (true) {
        t += rng.exponential(cfg.lambda0);
        if (t >= cfg.horizon)
            break;
        double detectDraw = rng.uniform01();
        bool allHidden = true;
        double step = cfg.alpha0 / 4;
        for (int i = 0; i <= 4; ++i) {
            double probe = t + std::min(i * step, cfg.alpha0 * (1 - 1e-12));
            if (!hiddenAt(probe)) {
                allHidden = false;
                break;
            }
        }
        game::Attestation a;
        a.t = t;
        a.fullyHidden = allHidden;
        a.detected = !allHidden && detectDraw < (1.0 - cfg.pe);
        trace.attestations.push_back(a);
        if (a.detected) {
            trace.detected = true;
            trace.endTime = std::min(t + cfg.alpha0, cfg.horizon);
            break;
        }
    }
    return trace;
}

struct CliResult {
    int exitCode = -1;
    std::string output;
};

inline std::filesystem::path cliWorkDir(const char *tag) {
    std::filesystem::path d = std::filesystem::temp_directory_path() /
                              (std::string("pasim-") + tag + "-" +
                               std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
}

inline CliResult runCli(const std::string &binary, const std::string &args,
                        const std::filesystem::path &dir) {
    std::filesystem::path outFile = dir / "stdout.tmp";
    std::string cmd = binary + " " + args + " > " + outFile.string() + " 2> " +
                      (dir / "stderr.tmp").string();
    int status = std::system(cmd.c_str());
    CliResult r;
    r.exitCode = WEXITSTATUS(status);
    std::ifstream in(outFile);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

inline std::string slurpFile(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace pasim::testsupport

#endif
