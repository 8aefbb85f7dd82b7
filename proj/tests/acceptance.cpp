// Acceptance suite: one test case per release criterion, each printing a
// [PASS]/[FAIL] line. Run them all via ctest or directly:
//   ./acceptance
//
// Criterion 6's directional sub-checks 6b/6c/6d are known to fail: with a
// strictly periodic attacker that hides for exactly half of each period and
// millisecond attestations, the inactivity fraction is pinned at 1/2 and
// the hit ratio is flat in both rates, so there is no trend for those
// checks to find. They are asserted as written rather than weakened; see
// the printed notes.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "pasim/errors.hpp"
#include "pasim/game.hpp"
#include "pasim/gf2.hpp"
#include "pasim/icgen.hpp"
#include "pasim/power.hpp"
#include "pasim/protocol.hpp"
#include "pasim/timing.hpp"
#include "support.hpp"

using namespace pasim;
using namespace pasim::testsupport;

namespace {

double seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

void report(int criterion, bool pass, const std::string &what) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str());
    std::fflush(stdout);
}

void reportSub(const char *tag, bool pass, const std::string &what) {
    std::printf("  [%s] %s: %s\n", pass ? "PASS" : "FAIL", tag, what.c_str());
    std::fflush(stdout);
}

timing::TimingModel referenceTiming() { return {1.3958, 0.081, -0.017, 0.008, 5.4542}; }
timing::NetworkModel referenceNetwork() { return {0.129, 12.48, 1.902}; }

icgen::MemoryImage makeGolden(std::uint64_t seed, std::size_t size) {
    RandomSource rng(seed);
    icgen::MemoryImage mem;
    mem.lo = 0x80000000;
    mem.bytes.resize(size);
    for (auto &b : mem.bytes)
        b = static_cast<std::uint8_t>(rng.u64());
    return mem;
}

} // namespace

TEST_CASE("criterion 1: minimum-parameter table reproduction") {
    auto start = std::chrono::steady_clock::now();
    timing::TimingModel model = referenceTiming();
    timing::NetworkModel net = referenceNetwork();

    struct Row {
        double fsHz;
        double tolerance;
        long long coverage;
    };
    const Row rows[] = {
        {1e6, 64.542, 2019},    {500e3, 74.542, 2331},
        {250e3, 94.542, 2956},  {200e3, 104.542, 3269},
        {54e3, 239.727, 7493},
    };

    bool pass = true;
    for (const Row &row : rows) {
        timing::DetectionConfig cfg;
        cfg.gamma = 10;
        cfg.injectedK = 4;
        cfg.maxInstructions = 300;
        cfg.coverageMin = 1e-6;
        cfg.nTotal = 200ull * 1024 * 1024;
        cfg.sigmaS = 1e6 / row.fsHz;
        timing::ProgramParameters p = timing::optimizeParameters(model, net, cfg);
        bool tolOk = std::fabs(p.toleranceUs - row.tolerance) <= 5e-4;
        bool nOk = std::llabs(static_cast<long long>(p.nBytes) - row.coverage) <= 1;
        CHECK_MESSAGE(tolOk, "tolerance at ", row.fsHz, " Hz: ", p.toleranceUs);
        CHECK_MESSAGE(nOk, "coverage at ", row.fsHz, " Hz: ", p.nBytes);
        pass = pass && tolOk && nOk;
    }
    double elapsed = seconds(start);
    bool timeOk = elapsed < 1.0;
    CHECK_MESSAGE(timeOk, "runtime ", elapsed, " s");
    report(1, pass && timeOk,
           "five sampling rates reproduce (tolerance, coverage) to 3 decimals / "
           "+-1 byte in " +
               std::to_string(elapsed) + " s");
}

TEST_CASE("criterion 2: irreducibility test equals trial division") {
    auto start = std::chrono::steady_clock::now();
    bool pass = true;

    // exhaustive up to degree 12, counting along the way
    for (int d = 1; d <= 12; ++d) {
        std::uint64_t count = 0, mismatches = 0;
        for (std::uint64_t bits = (1ull << d); bits < (2ull << d); ++bits) {
            bool benOr = gf2::isIrreducible(gf2::Poly(bits));
            if (benOr != irreducibleByTrialDivision(bits))
                ++mismatches;
            if (benOr)
                ++count;
        }
        bool countOk = BigUint(count) == gf2::countIrreducible(static_cast<unsigned>(d));
        CHECK_MESSAGE(mismatches == 0, "degree ", d);
        CHECK_MESSAGE(countOk, "necklace count at degree ", d);
        pass = pass && mismatches == 0 && countOk;
    }

    // the well-known small values
    const std::pair<unsigned, const char *> known[] = {
        {1, "2"}, {2, "1"}, {3, "2"}, {4, "3"}, {5, "6"}};
    for (auto [d, expect] : known) {
        bool ok = gf2::countIrreducible(d).toString() == expect;
        CHECK(ok);
        pass = pass && ok;
    }

    // randomized agreement to degree 16
    RandomSource rng(0xACCE97);
    int randomMismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        unsigned d = 1 + static_cast<unsigned>(rng.below(16));
        std::uint64_t bits = (1ull << d) | (rng.u64() & ((1ull << d) - 1));
        if (gf2::isIrreducible(gf2::Poly(bits)) != irreducibleByTrialDivision(bits))
            ++randomMismatches;
    }
    CHECK(randomMismatches == 0);
    pass = pass && randomMismatches == 0;

    double elapsed = seconds(start);
    bool timeOk = elapsed < 60.0;
    CHECK_MESSAGE(timeOk, "runtime ", elapsed, " s");
    report(2, pass && timeOk,
           "exhaustive (d<=12) and 10k randomized (d<=16) agreement with exact "
           "counts in " +
               std::to_string(elapsed) + " s");
}

TEST_CASE("criterion 3: power synthesis/extraction round trip") {
    using power::Phase;
    using power::StateLabel;

    power::PfsmParams params; // 0.870 / 1.36 / 2.34 / 1.58 A
    params.noiseSigma = 0.02;
    power::ExtractionConfig cfg;
    const double fs = 500e3;

    const std::vector<Phase> phases = {
        {StateLabel::S0, 300e-6}, {StateLabel::S1, 250e-6}, {StateLabel::S0, 300e-6},
        {StateLabel::S1, 250e-6}, {StateLabel::S0, 300e-6}, {StateLabel::S2, 200e-6},
        {StateLabel::S3, 900e-6}, {StateLabel::S0, 200e-6}, {StateLabel::S0, 150e-6},
        {StateLabel::S1, 250e-6},
    };
    // the two adjacent idle phases form one physical plateau
    const double expectDur[9] = {300e-6, 250e-6, 300e-6, 250e-6, 300e-6,
                                 200e-6, 900e-6, 350e-6, 250e-6};
    const double expectLevel[9] = {0.870, 1.36, 0.870, 1.36, 0.870,
                                   2.34,  1.58, 0.870, 1.36};
    const double slack =
        (2.0 + cfg.lowpass1Window + cfg.lowpass2Window + 2.0) / fs;

    int good = 0;
    const int seedCount = 200;
    for (int s = 0; s < seedCount; ++s) {
        RandomSource rng(deriveSeed(0xACC3, static_cast<std::uint64_t>(s)));
        power::PowerTrace trace = power::synthesizeTrace(phases, params, fs, rng);
        auto segs = power::extractPowerStates(trace, cfg);
        if (segs.size() != 9)
            continue;
        auto labels = power::classifyStates(segs, params);
        if (!power::validateLanguage(protocol::canonicalizeLabels(labels)))
            continue;
        bool ok = true;
        for (int i = 0; i < 9; ++i) {
            if (std::fabs(segs[i].meanCurrent - expectLevel[i]) >
                0.01 * expectLevel[i])
                ok = false;
            if (std::fabs(segs[i].duration() - expectDur[i]) > slack)
                ok = false;
        }
        if (ok)
            ++good;
    }
    bool pass = good >= seedCount * 99 / 100;
    CHECK_MESSAGE(pass, "round-trip successes: ", good, "/", seedCount);
    report(3, pass,
           "levels within 1% and durations within filter slack, language "
           "accepted, in " +
               std::to_string(good) + "/" + std::to_string(seedCount) + " seeds");
}

TEST_CASE("criterion 4: tamper detection rates") {
    icgen::MemoryImage golden = makeGolden(0xACC4, 1 << 20);
    protocol::VerifierModels models;
    models.timing = referenceTiming();
    models.net = referenceNetwork();
    models.extraction = protocol::roundExtractionConfig();
    timing::DetectionConfig det;
    det.sigmaS = 2; // 500 kHz sampling
    det.nTotal = golden.bytes.size();
    protocol::ChallengeParameters params; // N = 2332 bytes, 40 instructions

    protocol::CompromisePatch patch{golden.lo + 8192, {0x13, 0x37, 0xBE, 0xEF}};

    auto machineFor = [&](protocol::Behavior b, std::uint64_t seed) {
        protocol::SimMachineConfig mc;
        mc.golden = golden;
        mc.compromise = {patch};
        mc.behavior = b;
        mc.redirectK = 4;
        mc.proxyExtraBytes = 160;
        mc.timing = {referenceTiming(), 5.4542, referenceNetwork(), 1.902};
        mc.seed = seed;
        return protocol::SimMachine(mc);
    };

    int redirectAlarms = 0;
    {
        protocol::Verifier verifier(golden, models, det, params);
        protocol::SimMachine machine = machineFor(protocol::Behavior::Redirect, 41);
        for (int i = 0; i < 1000; ++i) {
            RandomSource rng(deriveSeed(0xACC41, static_cast<std::uint64_t>(i)));
            auto art = protocol::runRound(verifier, machine, rng);
            if (!art.verdict.timingOk)
                ++redirectAlarms;
        }
    }
    bool redirectOk = redirectAlarms >= 950;
    CHECK_MESSAGE(redirectOk, "redirect alarms ", redirectAlarms, "/1000");
    reportSub("4-redirect", redirectOk,
              "k=4 shadow loads alarmed in " + std::to_string(redirectAlarms) +
                  "/1000 rounds (need >= 950)");

    int falseAlarms = 0;
    {
        protocol::Verifier verifier(golden, models, det, params);
        protocol::SimMachineConfig mc;
        mc.golden = golden;
        mc.timing = {referenceTiming(), 5.4542, referenceNetwork(), 1.902};
        mc.seed = 42;
        protocol::SimMachine machine(mc);
        for (int i = 0; i < 1000; ++i) {
            RandomSource rng(deriveSeed(0xACC42, static_cast<std::uint64_t>(i)));
            auto art = protocol::runRound(verifier, machine, rng);
            if (!art.verdict.timingOk)
                ++falseAlarms;
        }
    }
    bool honestOk = falseAlarms <= 10;
    CHECK_MESSAGE(honestOk, "honest false alarms ", falseAlarms, "/1000");
    reportSub("4-honest", honestOk,
              "honest rounds false-alarmed " + std::to_string(falseAlarms) +
                  "/1000 times (allowed <= 10)");

    int proxyAlarms = 0;
    const int proxyRounds = 500;
    {
        protocol::Verifier verifier(golden, models, det, params);
        protocol::SimMachine machine = machineFor(protocol::Behavior::Proxy, 43);
        for (int i = 0; i < proxyRounds; ++i) {
            RandomSource rng(deriveSeed(0xACC43, static_cast<std::uint64_t>(i)));
            auto art = protocol::runRound(verifier, machine, rng);
            if (art.verdict.detail.netAlarm)
                ++proxyAlarms;
        }
    }
    bool proxyOk = proxyAlarms >= proxyRounds * 99 / 100;
    CHECK_MESSAGE(proxyOk, "proxy alarms ", proxyAlarms, "/", proxyRounds);
    reportSub("4-proxy", proxyOk,
              "160 extra bytes alarmed in " + std::to_string(proxyAlarms) + "/" +
                  std::to_string(proxyRounds) + " rounds (need >= 99%)");

    report(4, redirectOk && honestOk && proxyOk,
           "redirect >= 95%, honest false alarms <= 1%, proxy >= 99%");
}

TEST_CASE("criterion 5: hash sensitivity to covered and uncovered flips") {
    int coveredChanged = 0;
    int uncoveredChanged = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        RandomSource rng(deriveSeed(0xACC5, static_cast<std::uint64_t>(i)));
        icgen::MemoryImage mem;
        mem.lo = 0;
        mem.bytes.resize(4096);
        for (auto &b : mem.bytes)
            b = static_cast<std::uint8_t>(rng.u64());
        icgen::ICProgram prog = icgen::assembleProgram(
            8 + static_cast<unsigned>(rng.below(9)), 3, 2 + static_cast<unsigned>(rng.below(4)),
            64, rng);
        icgen::AddressList addrs = icgen::genAddressList(64, mem.lo, mem.hi(), 4, rng);

        std::set<std::uint64_t> covered;
        addrs.forEachWord([&](std::uint64_t a) {
            for (unsigned b = 0; b < 4; ++b)
                covered.insert(a + b);
        });

        icgen::ExecResult base = icgen::execute(prog, mem, addrs, 0xACE + i);

        auto it = covered.begin();
        std::advance(it, static_cast<long>(rng.below(covered.size())));
        icgen::MemoryImage tampered = mem;
        std::uint8_t fb = tampered.bytes[*it] ^
                          static_cast<std::uint8_t>(1u << rng.below(8));
        tampered.write(*it, &fb, 1);
        if (icgen::execute(prog, tampered, addrs, 0xACE + i).hash != base.hash)
            ++coveredChanged;

        std::uint64_t free = 0;
        while (covered.count(free))
            ++free;
        icgen::MemoryImage untouched = mem;
        std::uint8_t f2 = untouched.bytes[free] ^
                          static_cast<std::uint8_t>(1u << rng.below(8));
        untouched.write(free, &f2, 1);
        if (icgen::execute(prog, untouched, addrs, 0xACE + i).hash != base.hash)
            ++uncoveredChanged;
    }
    bool coveredOk = coveredChanged >= trials * 99 / 100;
    bool uncoveredOk = uncoveredChanged == 0;
    CHECK_MESSAGE(coveredOk, "covered flips changed ", coveredChanged, "/", trials);
    CHECK_MESSAGE(uncoveredOk, "uncovered flips changed ", uncoveredChanged);
    report(5, coveredOk && uncoveredOk,
           "covered-bit flips changed the hash in " +
               std::to_string(coveredChanged) + "/1000 pairs, uncovered in " +
               std::to_string(uncoveredChanged));
}

TEST_CASE("criterion 6: game sweep qualitative behavior") {
    auto start = std::chrono::steady_clock::now();

    game::SweepGrid grid;
    grid.t0Values = game::gridRange(60, 180, 15); // 9 verifier inter-arrival times
    grid.t1Values = game::gridRange(30, 300, 10); // 28 attacker periods
    REQUIRE(grid.t0Values.size() == 9);
    REQUIRE(grid.t1Values.size() == 28);

    game::GameConfig tmpl;
    tmpl.alpha0 = 903e-6;
    tmpl.alpha1 = -1; // t1 / 2
    tmpl.pe = 0.99998;
    tmpl.horizon = 10 * 86400.0;
    tmpl.runs = 1000;
    tmpl.seed = 0xACC6;

    auto rows = game::sweep(grid, tmpl, 0);
    double sweepSeconds = seconds(start);
    REQUIRE(rows.size() == 252);
    auto cell = [&](std::size_t i0, std::size_t i1) -> const game::SweepRow & {
        return rows[i0 * grid.t1Values.size() + i1];
    };

    // (a) p_detect nondecreasing in the verifier rate at fixed attacker rate.
    // lambda0 ascends as t0 descends. Monte Carlo tolerance: adjacent drops
    // beyond a joint 99% interval count as violations.
    int orderViolations = 0;
    int risingRows = 0;
    for (std::size_t i1 = 0; i1 < grid.t1Values.size(); ++i1) {
        for (std::size_t i0 = grid.t0Values.size(); i0-- > 1;) {
            const auto &slow = cell(i0, i1);      // smaller lambda0
            const auto &fast = cell(i0 - 1, i1);  // larger lambda0
            if (fast.metrics.pDetect <
                slow.metrics.pDetect - 2.576 * (slow.pDetectSe + fast.pDetectSe))
                ++orderViolations;
        }
        const auto &slowest = cell(grid.t0Values.size() - 1, i1);
        const auto &fastest = cell(0, i1);
        if (fastest.metrics.pDetect >
            slowest.metrics.pDetect +
                2.576 * (slowest.pDetectSe + fastest.pDetectSe))
            ++risingRows;
    }
    bool passA = orderViolations == 0 && risingRows >= 26;
    reportSub("6a", passA,
              "p_detect nondecreasing in verifier rate (violations: " +
                  std::to_string(orderViolations) + ", significant rises: " +
                  std::to_string(risingRows) + "/28)");
    CHECK(passA);

    // (b) frac_inactive decreases as the attacker rate increases at fixed
    // verifier rate. lambda1 ascends as t1 descends.
    int sigDecreases = 0, sigIncreases = 0;
    for (std::size_t i0 = 0; i0 < grid.t0Values.size(); ++i0) {
        const auto &slowAtt = cell(i0, grid.t1Values.size() - 1); // lambda1 min
        const auto &fastAtt = cell(i0, 0);                        // lambda1 max
        double joint = 2.576 * (slowAtt.fracInactiveSe + fastAtt.fracInactiveSe);
        if (fastAtt.metrics.fracInactive < slowAtt.metrics.fracInactive - joint)
            ++sigDecreases;
        if (fastAtt.metrics.fracInactive > slowAtt.metrics.fracInactive + joint)
            ++sigIncreases;
    }
    bool passB = sigDecreases >= 5 && sigIncreases == 0;
    reportSub("6b", passB,
              "frac_inactive decreasing in attacker rate (significant decreases: " +
                  std::to_string(sigDecreases) + "/9, increases: " +
                  std::to_string(sigIncreases) + "/9)");
    reportSub("6b-note", true,
              "the periodic half-period schedule pins the inactive fraction at "
              "~0.5 for every rate; no decreasing trend exists in this model");
    CHECK(passB);

    // (c) hit_ratio maximal at the slowest attacker rates: pooled over
    // verifier rates, slowest vs fastest attacker column.
    auto pooledHit = [&](std::size_t i1, double &hit, double &se) {
        double hidden = 0, total = 0;
        for (std::size_t i0 = 0; i0 < grid.t0Values.size(); ++i0) {
            const auto &r = cell(i0, i1);
            hidden += r.metrics.hitRatio * static_cast<double>(r.attestations);
            total += static_cast<double>(r.attestations);
        }
        hit = hidden / total;
        se = std::sqrt(hit * (1 - hit) / total);
    };
    double hitSlow, seSlow, hitFast, seFast;
    pooledHit(grid.t1Values.size() - 1, hitSlow, seSlow);
    pooledHit(0, hitFast, seFast);
    bool passC = hitSlow > hitFast + 2.576 * (seSlow + seFast);
    reportSub("6c", passC,
              "hit_ratio maximal at slowest attacker rates (slow " +
                  std::to_string(hitSlow) + " vs fast " + std::to_string(hitFast) +
                  ")");
    reportSub("6c-note", true,
              "the true gap is alpha0*(1/30 - 1/300) ~= 2.7e-5, an order below "
              "the Monte Carlo resolution of this run count");
    CHECK(passC);

    // (d) frac_inactive peaks at slow attacker + fast verifier.
    const auto &corner = cell(0, grid.t1Values.size() - 1); // t0=60, t1=300
    const auto &opposite = cell(grid.t0Values.size() - 1, 0);
    bool passD = corner.metrics.fracInactive >
                 opposite.metrics.fracInactive +
                     2.576 * (corner.fracInactiveSe + opposite.fracInactiveSe);
    reportSub("6d", passD,
              "frac_inactive peak at slow attacker + fast verifier (corner " +
                  std::to_string(corner.metrics.fracInactive) + " vs opposite " +
                  std::to_string(opposite.metrics.fracInactive) + ")");
    CHECK(passD);

    // event-driven vs fixed-step oracle agreement on 1-hour horizons
    int agree = 0, total = 0;
    RandomSource cfgRng(0xACC6E);
    for (int c = 0; c < 100; ++c) {
        game::GameConfig cfg;
        cfg.t1 = cfgRng.uniform(30, 300);
        cfg.lambda0 = 1.0 / cfgRng.uniform(30, 300);
        cfg.pe = cfgRng.uniform(0.0, 1.0);
        cfg.horizon = 3600;
        for (int r = 0; r < 5; ++r) {
            std::uint64_t seed = deriveSeed(0xACC6F, static_cast<std::uint64_t>(c),
                                            static_cast<std::uint64_t>(r));
            RandomSource r1(seed), r2(seed);
            bool fast = game::simulateRun(cfg, r1).detected;
            bool slow = fixedStepGameOracle(cfg, r2).detected;
            if (fast == slow)
                ++agree;
            ++total;
        }
    }
    bool oracleOk = agree >= total * 99 / 100;
    reportSub("6e", oracleOk,
              "event-driven vs fixed-step agreement " + std::to_string(agree) + "/" +
                  std::to_string(total));
    CHECK(oracleOk);

    bool timeOk = sweepSeconds <= 600.0;
    reportSub("6-runtime", timeOk,
              "full 252-cell sweep in " + std::to_string(sweepSeconds) + " s");
    CHECK(timeOk);

    report(6, passA && passB && passC && passD && oracleOk && timeOk,
           "qualitative game reproduction (6b/6c/6d have no detectable trend "
           "in the non-reactive attacker model; kept as written)");
}

TEST_CASE("criterion 7: exact program-space counting") {
    // strict growth in depth, and in degree where the irreducible count grows
    bool monotone = true;
    for (unsigned d = 2; d <= 10; ++d) {
        BigUint prev;
        for (unsigned n = 1; n <= 8; ++n) {
            BigUint cur = icgen::countPrograms(d, n);
            if (!(cur > prev))
                monotone = false;
            prev = cur;
        }
    }
    for (unsigned d = 2; d <= 10; ++d)
        if (!(icgen::countPrograms(d + 1, 5) > icgen::countPrograms(d, 5)))
            monotone = false;
    CHECK(monotone);

    // composition: programs = irreducibles x tree shapes
    bool composed = true;
    for (unsigned n = 1; n <= 6; ++n) {
        BigUint expect = gf2::countIrreducible(5) * icgen::treeShapeCount(1ull << n);
        if (icgen::countPrograms(5, n) != expect)
            composed = false;
    }
    CHECK(composed);

    // the discrepancy report is part of the counting command's output
    const char *cli = std::getenv("PASIM_CLI");
    bool reportOk = false;
    if (cli) {
        auto dir = cliWorkDir("acc7");
        auto r = runCli(cli, "count-space --degrees 5:5 --depths 1:6", dir);
        reportOk = r.exitCode == 0 &&
                   r.output.find("1.9721e26") != std::string::npos &&
                   r.output.find("irreproducible") != std::string::npos;
    }
    CHECK_MESSAGE(reportOk, "count-space discrepancy report present");

    report(7, monotone && composed && reportOk,
           "counts exact and monotone; quoted 1.9721e26 documented as "
           "irreproducible in command output");
}

TEST_CASE("criterion 8: command outputs reproduce byte for byte") {
    const char *cli = std::getenv("PASIM_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "PASIM_CLI must point at the pasim binary");
    auto dir = cliWorkDir("acc8");

    auto fileOf = [&](const std::string &name) { return (dir / name).string(); };
    // protocol/game configs
    {
        std::ofstream cfg(fileOf("p.ini"));
        cfg << "[memory]\nsize = 262144\nseed = 5\ncompromise_offset = 4096\n"
               "[machine]\nbehavior = redirect\nseed = 11\n"
               "[verifier]\nn_bytes = 1500\n";
        std::ofstream game(fileOf("g.ini"));
        game << "[game]\nt0_min_s = 60\nt0_max_s = 90\nt0_step_s = 30\n"
                "t1_min_s = 60\nt1_max_s = 120\nt1_step_s = 30\n"
                "horizon_days = 0.02\nruns = 40\nseed = 9\n";
        std::ofstream samples(fileOf("s.csv"));
        samples << "n_bytes,instructions,time_us\n";
        for (double n : {500.0, 1000.0, 2000.0})
            for (double c : {10.0, 20.0, 40.0})
                samples << n << "," << c << ","
                        << 1.3958 + 0.081 * n - 0.017 * c + 0.008 * n * c << "\n";
    }

    struct Cmd {
        const char *tag;
        std::string args; // output path appended per run
    };
    const Cmd commands[] = {
        {"gen-poly", "gen-poly -d 24 -c 8 --seed 77 -o "},
        {"count-space", "count-space --degrees 2:6 --depths 1:6 -o "},
        {"protocol", "protocol --config " + fileOf("p.ini") + " --rounds 12 --seed 3 -o "},
        {"game-sweep", "game-sweep --config " + fileOf("g.ini") + " --threads 2 -o "},
        {"synth", "synth --phases S0:300,S2:200,S3:500,S0:300 --seed 6 -o "},
        {"fit", "fit --kind timing --samples " + fileOf("s.csv") + " -o "},
        {"optimize", "optimize -o "},
    };

    bool pass = true;
    for (const Cmd &cmd : commands) {
        std::string outA = fileOf(std::string(cmd.tag) + "_a.out");
        std::string outB = fileOf(std::string(cmd.tag) + "_b.out");
        CliResult ra = runCli(cli, cmd.args + outA, dir);
        CliResult rb = runCli(cli, cmd.args + outB, dir);
        bool ok = ra.exitCode == 0 && rb.exitCode == 0 &&
                  slurpFile(outA) == slurpFile(outB) && !slurpFile(outA).empty();
        CHECK_MESSAGE(ok, cmd.tag);
        pass = pass && ok;
    }

    // extract consumes the synthesized trace from above
    {
        std::string trace = fileOf("synth_a.out");
        std::string outA = fileOf("extract_a.out");
        std::string outB = fileOf("extract_b.out");
        CliResult ra = runCli(cli, "extract --trace " + trace + " -o " + outA, dir);
        CliResult rb = runCli(cli, "extract --trace " + trace + " -o " + outB, dir);
        bool ok = ra.exitCode == 0 && rb.exitCode == 0 &&
                  slurpFile(outA) == slurpFile(outB) && !slurpFile(outA).empty();
        CHECK_MESSAGE(ok, "extract");
        pass = pass && ok;
    }

    report(8, pass, "eight commands re-ran byte-identically from fixed seeds");
}
