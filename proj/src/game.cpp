#include "pasim/game.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "pasim/errors.hpp"
#include "pasim/text.hpp"

namespace pasim::game {

void GameConfig::validate() const {
    if (t1 <= 0 || alpha0 <= 0 || horizon <= 0 || runs == 0)
        throw InvalidInput("game: rates, durations and run count must be positive");
    if (hideDuration() <= 0 || hideDuration() > t1)
        throw InvalidInput("game: hide duration must lie in (0, t1]");
    if (pe < 0 || pe > 1)
        throw InvalidInput("game: evasion probability must lie in [0, 1]");
    if (lambda0 < 0)
        throw InvalidInput("game: verifier rate must be nonnegative");
}

namespace {

// Antiderivative of the cyclic hide indicator: measure of
// {u in [0, y) : u mod t1 < alpha1}, valid for negative y.
double hiddenPrimitive(double y, double t1, double alpha1) {
    double periods = std::floor(y / t1);
    double rem = y - periods * t1;
    return periods * alpha1 + std::min(rem, alpha1);
}

} // namespace

double hiddenMeasure(double phase, double t1, double alpha1, double upTo) {
    return hiddenPrimitive(upTo - phase, t1, alpha1) -
           hiddenPrimitive(-phase, t1, alpha1);
}

bool fullyHidden(double t, double phase, double t1, double alpha1, double alpha0) {
    if (alpha1 >= t1)
        return true; // contiguous hiding
    double u = std::fmod(t - phase, t1);
    if (u < 0)
        u += t1;
    return u + alpha0 <= alpha1;
}

GameTrace simulateRun(const GameConfig &cfg, RandomSource &rng) {
    cfg.validate();
    GameTrace trace;
    trace.t1 = cfg.t1;
    trace.alpha1 = cfg.hideDuration();
    trace.phase = rng.uniform01() * cfg.t1;
    trace.endTime = cfg.horizon;

    if (cfg.lambda0 <= 0)
        return trace;

    double t = 0;
    while (true) {
        t += rng.exponential(cfg.lambda0);
        if (t >= cfg.horizon)
            break;
        double detectDraw = rng.uniform01();
        Attestation a;
        a.t = t;
        a.fullyHidden = fullyHidden(t, trace.phase, cfg.t1, trace.alpha1, cfg.alpha0);
        // Active at any instant of the attestation window: detected unless
        // the coverage draw evades.
        a.detected = !a.fullyHidden && detectDraw < (1.0 - cfg.pe);
        trace.attestations.push_back(a);
        if (a.detected) {
            trace.detected = true;
            trace.endTime = std::min(t + cfg.alpha0, cfg.horizon);
            break;
        }
    }
    return trace;
}

GameMetrics computeMetrics(const std::vector<GameTrace> &traces, double horizon) {
    if (traces.empty())
        throw InvalidInput("game: need at least one trace");
    (void)horizon;
    double detected = 0;
    double fracSum = 0;
    std::uint64_t attTotal = 0, attHidden = 0;
    for (const auto &tr : traces) {
        if (tr.detected)
            detected += 1;
        double hidden = hiddenMeasure(tr.phase, tr.t1, tr.alpha1, tr.endTime);
        fracSum += hidden / tr.endTime;
        attTotal += tr.attestations.size();
        for (const auto &a : tr.attestations)
            if (a.fullyHidden)
                ++attHidden;
    }
    GameMetrics m;
    m.pDetect = detected / static_cast<double>(traces.size());
    m.fracInactive = fracSum / static_cast<double>(traces.size());
    m.hitRatio = attTotal ? static_cast<double>(attHidden) / static_cast<double>(attTotal)
                          : 0.0;
    return m;
}

namespace {

// Slim per-run fold used by the sweep; same event math as simulateRun
// without materializing attestation lists.
struct RunStats {
    bool detected = false;
    double fracInactive = 0;
    std::uint64_t attTotal = 0;
    std::uint64_t attHidden = 0;
};

RunStats foldRun(const GameConfig &cfg, RandomSource &rng) {
    RunStats s;
    double alpha1 = cfg.hideDuration();
    double phase = rng.uniform01() * cfg.t1;
    double endTime = cfg.horizon;
    if (cfg.lambda0 > 0) {
        double t = 0;
        while (true) {
            t += rng.exponential(cfg.lambda0);
            if (t >= cfg.horizon)
                break;
            double detectDraw = rng.uniform01();
            bool hid = fullyHidden(t, phase, cfg.t1, alpha1, cfg.alpha0);
            ++s.attTotal;
            if (hid)
                ++s.attHidden;
            if (!hid && detectDraw < (1.0 - cfg.pe)) {
                s.detected = true;
                endTime = std::min(t + cfg.alpha0, cfg.horizon);
                break;
            }
        }
    }
    s.fracInactive = hiddenMeasure(phase, cfg.t1, alpha1, endTime) / endTime;
    return s;
}

} // namespace

std::vector<double> gridRange(double lo, double hi, double step) {
    std::vector<double> v;
    for (int i = 0;; ++i) {
        double x = lo + i * step;
        if (x > hi + step * 1e-9)
            break;
        v.push_back(x);
    }
    return v;
}

std::vector<SweepRow> sweep(const SweepGrid &grid, const GameConfig &tmpl,
                            unsigned threads) {
    if (grid.t0Values.empty() || grid.t1Values.empty())
        throw InvalidInput("game: sweep grid is empty");
    std::size_t cells = grid.t0Values.size() * grid.t1Values.size();
    std::vector<SweepRow> rows(cells);

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());

    auto runCell = [&](std::size_t cell) {
        std::size_t i0 = cell / grid.t1Values.size();
        std::size_t i1 = cell % grid.t1Values.size();
        GameConfig cfg = tmpl;
        double t0 = grid.t0Values[i0];
        cfg.lambda0 = 1.0 / t0;
        cfg.t1 = grid.t1Values[i1];
        cfg.validate();

        double detected = 0, fracSum = 0, fracSumSq = 0;
        std::uint64_t attTotal = 0, attHidden = 0;
        for (std::uint64_t run = 0; run < cfg.runs; ++run) {
            RandomSource rng(deriveSeed(tmpl.seed, i0, i1, run));
            RunStats s = foldRun(cfg, rng);
            detected += s.detected ? 1 : 0;
            fracSum += s.fracInactive;
            fracSumSq += s.fracInactive * s.fracInactive;
            attTotal += s.attTotal;
            attHidden += s.attHidden;
        }
        SweepRow &row = rows[cell];
        row.t0 = t0;
        row.t1 = cfg.t1;
        row.lambda0 = cfg.lambda0;
        row.lambda1 = 1.0 / cfg.t1;
        row.runs = cfg.runs;
        row.horizon = cfg.horizon;
        row.attestations = attTotal;
        double nRuns = static_cast<double>(cfg.runs);
        row.metrics.pDetect = detected / nRuns;
        row.metrics.fracInactive = fracSum / nRuns;
        row.metrics.hitRatio =
            attTotal ? static_cast<double>(attHidden) / static_cast<double>(attTotal)
                     : 0.0;
        row.pDetectSe =
            std::sqrt(row.metrics.pDetect * (1 - row.metrics.pDetect) / nRuns);
        double fracVar =
            std::max(0.0, fracSumSq / nRuns -
                              row.metrics.fracInactive * row.metrics.fracInactive);
        row.fracInactiveSe = std::sqrt(fracVar / nRuns);
        row.hitRatioSe =
            attTotal ? std::sqrt(row.metrics.hitRatio * (1 - row.metrics.hitRatio) /
                                 static_cast<double>(attTotal))
                     : 0.0;
    };

    if (threads <= 1 || cells == 1) {
        for (std::size_t c = 0; c < cells; ++c)
            runCell(c);
    } else {
        std::vector<std::thread> pool;
        std::size_t stride = threads;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < cells; c += stride)
                    runCell(c);
            });
        for (auto &th : pool)
            th.join();
    }
    return rows;
}

std::string sweepCsv(const std::vector<SweepRow> &rows) {
    std::string out =
        "T0_s,T1_s,lambda0,lambda1,p_detect,frac_inactive,hit_ratio,runs,horizon_s\n";
    for (const auto &r : rows) {
        out += formatDouble(r.t0) + "," + formatDouble(r.t1) + "," +
               formatDouble(r.lambda0) + "," + formatDouble(r.lambda1) + "," +
               formatDouble(r.metrics.pDetect) + "," +
               formatDouble(r.metrics.fracInactive) + "," +
               formatDouble(r.metrics.hitRatio) + "," + std::to_string(r.runs) + "," +
               formatDouble(r.horizon) + "\n";
    }
    return out;
}

std::string sweepJson(const std::vector<SweepRow> &rows) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        out += "  {\"T0_s\":" + formatDouble(r.t0) + ",\"T1_s\":" + formatDouble(r.t1) +
               ",\"lambda0\":" + formatDouble(r.lambda0) +
               ",\"lambda1\":" + formatDouble(r.lambda1) +
               ",\"p_detect\":" + formatDouble(r.metrics.pDetect) +
               ",\"frac_inactive\":" + formatDouble(r.metrics.fracInactive) +
               ",\"hit_ratio\":" + formatDouble(r.metrics.hitRatio) +
               ",\"runs\":" + std::to_string(r.runs) +
               ",\"horizon_s\":" + formatDouble(r.horizon) + "}";
        out += (i + 1 < rows.size()) ? ",\n" : "\n";
    }
    out += "]\n";
    return out;
}

namespace {

// Explicit hide-interval schedule for the probe. Gaps between hide starts
// are t1 * (1 +- jitter); jitter 0 reproduces the cyclic periodic schedule
// including its wraparound piece.
struct Schedule {
    std::vector<std::pair<double, double>> intervals; // [start, end)

    bool coversWindow(double t, double alpha0) const {
        auto it = std::upper_bound(
            intervals.begin(), intervals.end(), t,
            [](double v, const std::pair<double, double> &iv) { return v < iv.first; });
        if (it == intervals.begin())
            return false;
        --it;
        return t >= it->first && t + alpha0 <= it->second;
    }

    double hiddenUpTo(double end) const {
        double sum = 0;
        for (const auto &[a, b] : intervals) {
            if (a >= end)
                break;
            sum += std::min(b, end) - std::max(a, 0.0);
        }
        return sum;
    }
};

Schedule buildJitteredSchedule(const GameConfig &cfg, double jitter, double phase,
                               RandomSource &jitterRng) {
    Schedule sched;
    double alpha1 = cfg.hideDuration();
    auto gap = [&]() {
        return cfg.t1 * (1.0 + jitter * (2.0 * jitterRng.uniform01() - 1.0));
    };
    // Wraparound piece keeps the schedule stationary at t = 0.
    double prev = phase - gap();
    if (prev + alpha1 > 0)
        sched.intervals.emplace_back(prev, prev + alpha1);
    double start = phase;
    while (start < cfg.horizon) {
        sched.intervals.emplace_back(start, start + alpha1);
        start += gap();
    }
    return sched;
}

GameTrace runWithSchedule(const GameConfig &cfg, const Schedule &sched, double phase,
                          RandomSource &eventRng) {
    GameTrace trace;
    trace.t1 = cfg.t1;
    trace.alpha1 = cfg.hideDuration();
    trace.phase = phase;
    trace.endTime = cfg.horizon;
    if (cfg.lambda0 <= 0)
        return trace;
    double t = 0;
    while (true) {
        t += eventRng.exponential(cfg.lambda0);
        if (t >= cfg.horizon)
            break;
        double detectDraw = eventRng.uniform01();
        Attestation a;
        a.t = t;
        a.fullyHidden = sched.coversWindow(t, cfg.alpha0);
        a.detected = !a.fullyHidden && detectDraw < (1.0 - cfg.pe);
        trace.attestations.push_back(a);
        if (a.detected) {
            trace.detected = true;
            trace.endTime = std::min(t + cfg.alpha0, cfg.horizon);
            break;
        }
    }
    return trace;
}

} // namespace

GameTrace simulateRunJittered(const GameConfig &cfg, double jitterFraction,
                              std::uint64_t runSeed) {
    cfg.validate();
    RandomSource phaseRng(deriveSeed(runSeed, 0xF0));
    RandomSource jitterRng(deriveSeed(runSeed, 0xF1));
    RandomSource eventRng(deriveSeed(runSeed, 0xF2));
    double phase = phaseRng.uniform01() * cfg.t1;
    Schedule sched = buildJitteredSchedule(cfg, jitterFraction, phase, jitterRng);
    return runWithSchedule(cfg, sched, phase, eventRng);
}

GameTrace simulateRunProbePeriodic(const GameConfig &cfg, std::uint64_t runSeed) {
    return simulateRunJittered(cfg, 0.0, runSeed);
}

ProbeReport bestResponseProbe(const GameConfig &cfg, double jitterFraction) {
    cfg.validate();
    auto runStrategy = [&](double jitter) {
        StrategyStats st;
        st.runs = cfg.runs;
        double detected = 0;
        for (std::uint64_t r = 0; r < cfg.runs; ++r) {
            GameTrace tr = simulateRunJittered(cfg, jitter, deriveSeed(cfg.seed, r));
            if (tr.detected)
                detected += 1;
        }
        st.pDetect = detected / static_cast<double>(cfg.runs);
        st.ciHalfWidth =
            1.96 * std::sqrt(st.pDetect * (1 - st.pDetect) / static_cast<double>(cfg.runs));
        return st;
    };
    ProbeReport rep;
    rep.jitterFraction = jitterFraction;
    rep.periodic = runStrategy(0.0);
    rep.jittered = runStrategy(jitterFraction);
    rep.periodicNoWorse = rep.periodic.pDetect <=
                          rep.jittered.pDetect + rep.periodic.ciHalfWidth +
                              rep.jittered.ciHalfWidth;
    return rep;
}

} // namespace pasim::game
