// pasim: power-attestation simulator command line.
//
// Subcommands cover each pipeline stage: program-space exploration
// (gen-poly, count-space), model fitting (fit), trace handling (synth,
// extract), parameter search (optimize), protocol rounds (protocol) and the
// attacker-verifier game (game-sweep). Every command that writes an output
// file also writes <out>.manifest.json describing the exact invocation;
// re-running a manifest reproduces the output byte for byte.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pasim/errors.hpp"
#include "pasim/game.hpp"
#include "pasim/gf2.hpp"
#include "pasim/icgen.hpp"
#include "pasim/power.hpp"
#include "pasim/protocol.hpp"
#include "pasim/text.hpp"
#include "pasim/timing.hpp"

using json = nlohmann::ordered_json;
using namespace pasim;

namespace {

constexpr const char *kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// small helpers

void writeFile(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("cannot open " + path + " for writing");
    out << content;
}

std::string readFile(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeManifest(const std::string &command, const json &options,
                   std::uint64_t seed, const std::vector<std::string> &outputs) {
    if (outputs.empty())
        return;
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["seed"] = seed;
    m["options"] = options;
    m["outputs"] = outputs;
    writeFile(outputs.front() + ".manifest.json", m.dump(2) + "\n");
}

// Flat INI: [section] lines and key=value pairs, # or ; comments.
struct Config {
    std::map<std::string, std::string> values; // "section.key" -> value

    static Config parse(const std::string &text) {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            std::size_t h = line.find_first_of("#;");
            if (h != std::string::npos)
                line.resize(h);
            auto notSpace = [](unsigned char c) { return !std::isspace(c); };
            line.erase(line.begin(),
                       std::find_if(line.begin(), line.end(), notSpace));
            while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
                line.pop_back();
            if (line.empty())
                continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw InvalidInput("config line " + std::to_string(lineNo) +
                                       ": unterminated section header");
                section = line.substr(1, line.size() - 2);
                continue;
            }
            std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw InvalidInput("config line " + std::to_string(lineNo) +
                                   ": expected key=value");
            std::string key = line.substr(0, eq);
            while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back())))
                key.pop_back();
            std::string value = line.substr(eq + 1);
            value.erase(value.begin(),
                        std::find_if(value.begin(), value.end(), notSpace));
            cfg.values[section.empty() ? key : section + "." + key] = value;
        }
        return cfg;
    }

    double number(const std::string &key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end())
            return fallback;
        bool ok = false;
        double v = parseDouble(it->second, &ok);
        if (!ok)
            throw InvalidInput("config: bad number for " + key);
        return v;
    }

    std::string text(const std::string &key, const std::string &fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
};

timing::TimingModel referenceTiming() { return {1.3958, 0.081, -0.017, 0.008, 5.4542}; }
timing::NetworkModel referenceNetwork() { return {0.129, 12.48, 1.902}; }

// ---------------------------------------------------------------------------
// gen-poly

struct GenPolyArgs {
    unsigned degree = 16;
    unsigned count = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string sweep; // "min:max[:step]"
};

void parseRange(const std::string &spec, unsigned &lo, unsigned &hi, unsigned &step) {
    step = 1;
    std::size_t c1 = spec.find(':');
    if (c1 == std::string::npos)
        throw CLI::ValidationError("range", "expected min:max[:step]");
    lo = static_cast<unsigned>(std::stoul(spec.substr(0, c1)));
    std::size_t c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) {
        hi = static_cast<unsigned>(std::stoul(spec.substr(c1 + 1)));
    } else {
        hi = static_cast<unsigned>(std::stoul(spec.substr(c1 + 1, c2 - c1 - 1)));
        step = static_cast<unsigned>(std::stoul(spec.substr(c2 + 1)));
    }
    if (lo < 1 || hi < lo || step < 1)
        throw CLI::ValidationError("range", "expected 1 <= min <= max");
}

int cmdGenPoly(const GenPolyArgs &args) {
    std::string out;
    double totalUs = 0;
    if (!args.sweep.empty()) {
        unsigned lo, hi, step;
        parseRange(args.sweep, lo, hi, step);
        out += "degree,count,mean_generation_us\n";
        RandomSource rng(args.seed);
        for (unsigned d = lo; d <= hi; d += step) {
            auto start = std::chrono::steady_clock::now();
            for (unsigned i = 0; i < args.count; ++i)
                gf2::randomIrreducible(d, rng);
            auto us = std::chrono::duration<double, std::micro>(
                          std::chrono::steady_clock::now() - start)
                          .count();
            totalUs += us;
            out += std::to_string(d) + "," + std::to_string(args.count) + "," +
                   formatDouble(us / args.count) + "\n";
        }
    } else {
        RandomSource rng(args.seed);
        auto start = std::chrono::steady_clock::now();
        for (unsigned i = 0; i < args.count; ++i)
            out += gf2::randomIrreducible(args.degree, rng).toHex() + "\n";
        totalUs = std::chrono::duration<double, std::micro>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    }

    // timing is environment noise, not part of the reproducible artifact
    std::cerr << "generation took " << formatDouble(totalUs) << " us total\n";

    if (args.out.empty()) {
        std::cout << out;
    } else {
        writeFile(args.out, out);
        json opts;
        opts["degree"] = args.degree;
        opts["count"] = args.count;
        opts["sweep"] = args.sweep;
        writeManifest("gen-poly", opts, args.seed, {args.out});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// count-space

struct CountSpaceArgs {
    std::string degrees = "2:8";
    std::string depths = "1:8";
    std::uint64_t cap = 0;
    std::string out;
};

int cmdCountSpace(const CountSpaceArgs &args) {
    unsigned dLo, dHi, dStep, nLo, nHi, nStep;
    parseRange(args.degrees, dLo, dHi, dStep);
    parseRange(args.depths, nLo, nHi, nStep);

    std::string out;
    out += "# program-space size: irreducible(d) * sum of Catalan numbers up to "
           "the node cap (default 2^depth)\n";
    out += "# discrepancy: the quoted space size 1.9721e26 for degree 5 at depth "
           "40 is not reachable from this formula;\n";
    BigUint d58 = icgen::countPrograms(5, 8);
    out += "# the count is increasing in depth and already D(5,8) = " +
           d58.toScientific(5) + " (" + d58.toString() +
           ") exceeds it, so the quoted value is recorded as irreproducible.\n";
    out += "degree,depth,node_cap,irreducible_count,tree_count,program_count\n";
    for (unsigned d = dLo; d <= dHi; d += dStep) {
        for (unsigned n = nLo; n <= nHi; n += nStep) {
            std::uint64_t maxNodes = (n >= 63) ? ~std::uint64_t(0) : (std::uint64_t(1) << n);
            std::uint64_t cap = args.cap == 0 ? maxNodes : std::min(args.cap, maxNodes);
            BigUint trees = icgen::treeShapeCount(cap);
            BigUint total = icgen::countPrograms(d, n, cap);
            out += std::to_string(d) + "," + std::to_string(n) + "," +
                   std::to_string(cap) + "," + gf2::countIrreducible(d).toString() +
                   "," + trees.toString() + "," + total.toString() + "\n";
        }
    }

    if (args.out.empty()) {
        std::cout << out;
    } else {
        writeFile(args.out, out);
        json opts;
        opts["degrees"] = args.degrees;
        opts["depths"] = args.depths;
        opts["cap"] = args.cap;
        writeManifest("count-space", opts, 0, {args.out});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// protocol

struct ProtocolArgs {
    std::string configPath;
    unsigned rounds = 100;
    std::uint64_t seed = 1;
    std::string out;
};

protocol::Behavior behaviorFromName(const std::string &name) {
    if (name == "honest")
        return protocol::Behavior::Honest;
    if (name == "redirect")
        return protocol::Behavior::Redirect;
    if (name == "proxy")
        return protocol::Behavior::Proxy;
    if (name == "hidden")
        return protocol::Behavior::Hidden;
    throw InvalidInput("config: unknown machine behavior '" + name + "'");
}

int cmdProtocol(const ProtocolArgs &args) {
    Config cfg = args.configPath.empty() ? Config{}
                                         : Config::parse(readFile(args.configPath));

    // golden image
    std::uint64_t memSeed = static_cast<std::uint64_t>(cfg.number("memory.seed", 1));
    std::size_t memSize = static_cast<std::size_t>(cfg.number("memory.size", 1 << 20));
    icgen::MemoryImage golden;
    golden.lo = static_cast<std::uint64_t>(cfg.number("memory.lo", 0x80000000));
    golden.bytes.resize(memSize);
    RandomSource memRng(memSeed);
    for (auto &b : golden.bytes)
        b = static_cast<std::uint8_t>(memRng.u64());

    // machine
    protocol::SimMachineConfig mc;
    mc.golden = golden;
    mc.behavior = behaviorFromName(cfg.text("machine.behavior", "honest"));
    mc.redirectK = static_cast<int>(cfg.number("machine.redirect_k", 4));
    mc.proxyExtraBytes =
        static_cast<std::uint64_t>(cfg.number("machine.proxy_extra_bytes", 160));
    mc.timing.hash.beta0 = cfg.number("machine.beta0", 1.3958);
    mc.timing.hash.beta1 = cfg.number("machine.beta1", 0.081);
    mc.timing.hash.beta2 = cfg.number("machine.beta2", -0.017);
    mc.timing.hash.beta3 = cfg.number("machine.beta3", 0.008);
    mc.timing.hash.sigmaM = cfg.number("machine.sigma_m_us", 5.4542);
    mc.timing.sigmaTrueUs = cfg.number("machine.sigma_true_us", 5.4542);
    mc.timing.net.slope = cfg.number("machine.net_slope", 0.129);
    mc.timing.net.intercept = cfg.number("machine.net_intercept", 12.48);
    mc.timing.net.sigmaN = cfg.number("machine.sigma_n_us", 1.902);
    mc.timing.sigmaNetTrueUs = cfg.number("machine.sigma_net_true_us", 1.902);
    mc.loadPhaseUs = cfg.number("machine.load_us", 50);
    mc.sampleRateHz = cfg.number("machine.fs_hz", 500e3);
    mc.seed = static_cast<std::uint64_t>(cfg.number("machine.seed", 7));
    mc.pfsm.idle = cfg.number("pfsm.idle", 0.870);
    mc.pfsm.network = cfg.number("pfsm.network", 1.36);
    mc.pfsm.load = cfg.number("pfsm.load", 2.34);
    mc.pfsm.hash = cfg.number("pfsm.hash", 1.58);
    mc.pfsm.networkPeriod = cfg.number("pfsm.period_us", 200) * 1e-6;
    mc.pfsm.noiseSigma = cfg.number("pfsm.sigma", 0.02);

    double compromiseOffset = cfg.number("memory.compromise_offset", -1);
    if (compromiseOffset >= 0) {
        std::size_t len = static_cast<std::size_t>(cfg.number("memory.compromise_len", 4));
        protocol::CompromisePatch patch;
        patch.addr = golden.lo + static_cast<std::uint64_t>(compromiseOffset);
        for (std::size_t i = 0; i < len; ++i)
            patch.data.push_back(
                golden.bytes[patch.addr - golden.lo + i] ^ std::uint8_t(0xA5));
        mc.compromise.push_back(patch);
    }
    protocol::SimMachine machine(mc);

    // verifier: models default to the machine's calibration (the learned-
    // on-honest-hardware convention)
    protocol::VerifierModels models;
    models.timing = mc.timing.hash;
    models.net = mc.timing.net;
    models.pfsm = mc.pfsm;
    models.extraction = protocol::roundExtractionConfig();
    models.loadPhaseUs = mc.loadPhaseUs;

    timing::DetectionConfig det;
    det.gamma = cfg.number("verifier.gamma", 10);
    det.sigmaS = cfg.number("verifier.sigma_s_us", 1e6 / mc.sampleRateHz);
    det.injectedK = static_cast<int>(cfg.number("verifier.k", 4));
    det.maxInstructions = static_cast<int>(cfg.number("verifier.cost", 300));
    det.coverageMin = cfg.number("verifier.coverage_min", 1e-6);
    det.nTotal = memSize;

    protocol::ChallengeParameters params;
    params.degree = static_cast<unsigned>(cfg.number("verifier.degree", 16));
    params.accumulatorBits = static_cast<unsigned>(cfg.number("verifier.accum_bits", 64));
    params.targetCost = static_cast<int>(cfg.number("verifier.target_cost", 40));
    params.nBytes = static_cast<std::uint64_t>(cfg.number("verifier.n_bytes", 2331));
    params.wordSize = static_cast<unsigned>(cfg.number("verifier.word_size", 4));

    protocol::Verifier verifier(golden, models, det, params);
    verifier.rttFactor = cfg.number("verifier.rtt_factor", 2.0);

    std::string out;
    unsigned passes = 0;
    for (unsigned i = 0; i < args.rounds; ++i) {
        RandomSource rng(deriveSeed(args.seed, i));
        protocol::RoundArtifacts art = protocol::runRound(verifier, machine, rng);
        const auto &d = art.verdict.detail;
        json row;
        row["round"] = i;
        row["pass"] = art.verdict.pass();
        row["output_ok"] = art.verdict.outputOk;
        row["timing_ok"] = art.verdict.timingOk;
        row["language_ok"] = art.verdict.languageOk;
        row["delta_hash_us"] = d.deltaHashUs;
        row["delta_net_init_us"] = d.deltaInitUs;
        row["delta_net_out_us"] = d.deltaOutUs;
        row["measured_hash_us"] = d.measuredHashUs;
        row["predicted_hash_us"] = d.predictedHashUs;
        row["hash_alarm"] = d.hashAlarm;
        row["net_alarm"] = d.netAlarm;
        row["rtt_exceeded"] = d.rttExceeded;
        row["instruction_count"] = art.instructionCount;
        row["coverage_bytes"] = art.challenge.addresses.totalBytes;
        out += row.dump() + "\n";
        if (art.verdict.pass())
            ++passes;
    }
    std::cerr << "protocol: " << passes << "/" << args.rounds << " rounds passed\n";

    if (args.out.empty()) {
        std::cout << out;
    } else {
        writeFile(args.out, out);
        json opts;
        opts["config"] = args.configPath;
        opts["rounds"] = args.rounds;
        writeManifest("protocol", opts, args.seed, {args.out});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// game-sweep

struct GameSweepArgs {
    std::string configPath;
    std::string out;
    std::string format = "csv";
    unsigned threads = 0;
};

int cmdGameSweep(const GameSweepArgs &args) {
    Config cfg = args.configPath.empty() ? Config{}
                                         : Config::parse(readFile(args.configPath));
    game::SweepGrid grid;
    grid.t0Values = game::gridRange(cfg.number("game.t0_min_s", 60),
                                    cfg.number("game.t0_max_s", 180),
                                    cfg.number("game.t0_step_s", 15));
    grid.t1Values = game::gridRange(cfg.number("game.t1_min_s", 30),
                                    cfg.number("game.t1_max_s", 300),
                                    cfg.number("game.t1_step_s", 10));
    if (grid.t0Values.empty() || grid.t1Values.empty())
        throw InvalidInput("game config: empty sweep grid");

    game::GameConfig tmpl;
    tmpl.alpha0 = cfg.number("game.alpha0_us", 903) * 1e-6;
    double alpha1Frac = cfg.number("game.alpha1_frac", 0.5);
    tmpl.alpha1 = -1; // per-cell t1 * alpha1Frac applied below via fraction
    tmpl.pe = cfg.number("game.pe", 0.99998);
    tmpl.horizon = cfg.number("game.horizon_days", 10) * 86400.0;
    tmpl.runs = static_cast<std::uint64_t>(cfg.number("game.runs", 1000));
    tmpl.seed = static_cast<std::uint64_t>(cfg.number("game.seed", 1));
    if (alpha1Frac != 0.5)
        throw InvalidInput("game config: only alpha1_frac=0.5 is supported");

    auto rows = game::sweep(grid, tmpl, args.threads);
    std::string out = args.format == "json" ? game::sweepJson(rows)
                                            : game::sweepCsv(rows);
    if (args.out.empty()) {
        std::cout << out;
    } else {
        writeFile(args.out, out);
        json opts;
        opts["config"] = args.configPath;
        opts["format"] = args.format;
        writeManifest("game-sweep", opts, tmpl.seed, {args.out});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
    std::string kind = "timing";
    std::string samplesPath;
    std::string out;
};

std::vector<std::vector<double>> readCsv(const std::string &path, std::size_t columns) {
    std::string text = readFile(path);
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t offset = 0;
    bool first = true;
    while (std::getline(in, line)) {
        std::size_t lineStart = offset;
        offset += line.size() + 1;
        if (line.empty() || line[0] == '#')
            continue;
        if (first) {
            first = false;
            if (!line.empty() && !std::isdigit(static_cast<unsigned char>(line[0])) &&
                line[0] != '-')
                continue; // header
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            row.push_back(parseDouble(cell));
        if (row.size() != columns)
            throw FormatError(WireError::Malformed, lineStart,
                              "sample file: expected " + std::to_string(columns) +
                                  " columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmdFit(const FitArgs &args) {
    std::string out;
    try {
        if (args.kind == "timing") {
            std::vector<timing::TimingSample> samples;
            for (const auto &row : readCsv(args.samplesPath, 3))
                samples.push_back({row[0], row[1], row[2]});
            out = timing::encodeTimingModel(timing::fitTimingModel(samples));
        } else if (args.kind == "network") {
            std::vector<timing::NetworkSample> samples;
            for (const auto &row : readCsv(args.samplesPath, 2))
                samples.push_back({row[0], row[1]});
            out = timing::encodeNetworkModel(timing::fitNetworkModel(samples));
        } else {
            throw CLI::ValidationError("--kind", "must be timing or network");
        }
    } catch (const std::invalid_argument &e) {
        throw FormatError(WireError::Malformed, 0,
                          std::string("sample file: ") + e.what());
    }

    if (args.out.empty()) {
        std::cout << out;
    } else {
        writeFile(args.out, out);
        json opts;
        opts["kind"] = args.kind;
        opts["samples"] = args.samplesPath;
        writeManifest("fit", opts, 0, {args.out});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// synth / extract

struct SynthArgs {
    std::string phases = "S0:300,S1:95,S0:100,S1:95,S0:100,S2:50,S3:935,S0:200,S1:15";
    double fsHz = 500e3;
    double sigma = 0.02;
    std::uint64_t seed = 1;
    double idle = 0.870, network = 1.36, load = 2.34, hash = 1.58;
    double periodUs = 200;
    std::string out;
};

int cmdSynth(const SynthArgs &args) {
    power::PfsmParams params;
    params.idle = args.idle;
    params.network = args.network;
    params.load = args.load;
    params.hash = args.hash;
    params.networkPeriod = args.periodUs * 1e-6;
    params.noiseSigma = args.sigma;

    std::vector<power::Phase> phases;
    std::istringstream in(args.phases);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--phases", "expected STATE:MICROSECONDS");
        std::string state = item.substr(0, colon);
        power::Phase ph;
        ph.duration = parseDouble(item.substr(colon + 1)) * 1e-6;
        if (state == "S0")
            ph.state = power::StateLabel::S0;
        else if (state == "S1")
            ph.state = power::StateLabel::S1;
        else if (state == "S1L") {
            ph.state = power::StateLabel::S1;
            ph.longNetwork = true;
        } else if (state == "S2")
            ph.state = power::StateLabel::S2;
        else if (state == "S3")
            ph.state = power::StateLabel::S3;
        else
            throw CLI::ValidationError("--phases", "unknown state " + state);
        phases.push_back(ph);
    }

    RandomSource rng(args.seed);
    power::PowerTrace trace = power::synthesizeTrace(phases, params, args.fsHz, rng);
    if (args.out.empty())
        throw CLI::ValidationError("--out", "synth requires an output path");
    power::writeTraceFile(args.out, trace);
    json opts;
    opts["phases"] = args.phases;
    opts["fs_hz"] = args.fsHz;
    opts["sigma"] = args.sigma;
    writeManifest("synth", opts, args.seed, {args.out});
    std::cerr << "synth: " << trace.samples.size() << " samples\n";
    return 0;
}

struct ExtractArgs {
    std::string tracePath;
    std::string out;
    unsigned w1 = 5, w2 = 5;
    double threshold = 0;
    unsigned minSegment = 8;
    double mergeTol = 0.05;
    double levelTolerance = 0.10;
};

int cmdExtract(const ExtractArgs &args) {
    power::PowerTrace trace = power::readTraceFile(args.tracePath);
    power::ExtractionConfig cfg;
    cfg.lowpass1Window = args.w1;
    cfg.lowpass2Window = args.w2;
    cfg.threshold = args.threshold;
    cfg.minSegment = args.minSegment;
    cfg.mergeTolerance = args.mergeTol;
    auto segments = power::extractPowerStates(trace, cfg);
    auto labels = power::classifyStates(segments, power::PfsmParams{},
                                        args.levelTolerance);

    std::string out = "index,t_a_s,t_b_s,duration_s,mean_a,label\n";
    for (std::size_t i = 0; i < segments.size(); ++i) {
        out += std::to_string(i) + "," + formatDouble(segments[i].tA) + "," +
               formatDouble(segments[i].tB) + "," +
               formatDouble(segments[i].duration()) + "," +
               formatDouble(segments[i].meanCurrent) + "," +
               power::stateName(labels[i]) + "\n";
    }

    if (args.out.empty()) {
        std::cout << out;
    } else {
        writeFile(args.out, out);
        json opts;
        opts["trace"] = args.tracePath;
        opts["w1"] = args.w1;
        opts["w2"] = args.w2;
        opts["min_segment"] = args.minSegment;
        writeManifest("extract", opts, 0, {args.out});
    }
    return 0;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
    std::string modelPath;
    std::string netModelPath;
    std::string rates = "1e6,500e3,250e3,200e3,54e3";
    double gamma = 10;
    int k = 4;
    int cost = 300;
    double coverage = 1e-6;
    double nTotal = 200.0 * 1024 * 1024;
    int cMin = 40;
    unsigned wordSize = 4;
    std::string out;
};

int cmdOptimize(const OptimizeArgs &args) {
    timing::TimingModel model = args.modelPath.empty()
                                    ? referenceTiming()
                                    : timing::readTimingModel(args.modelPath);
    timing::NetworkModel net = args.netModelPath.empty()
                                   ? referenceNetwork()
                                   : timing::readNetworkModel(args.netModelPath);

    std::string out = "sampling_rate_hz,sigma_s_us,tolerance_us,coverage_bytes,"
                      "program_size\n";
    std::istringstream in(args.rates);
    std::string item;
    while (std::getline(in, item, ',')) {
        double fs = parseDouble(item);
        if (fs <= 0)
            throw CLI::ValidationError("--rates", "sampling rates must be positive");
        timing::DetectionConfig cfg;
        cfg.gamma = args.gamma;
        cfg.sigmaS = 1e6 / fs;
        cfg.injectedK = args.k;
        cfg.maxInstructions = args.cost;
        cfg.coverageMin = args.coverage;
        cfg.nTotal = static_cast<std::uint64_t>(args.nTotal);
        cfg.minInstructions = args.cMin;
        cfg.wordSize = args.wordSize;
        timing::ProgramParameters p = timing::optimizeParameters(model, net, cfg);
        out += formatDouble(fs) + "," + formatDouble(cfg.sigmaS) + "," +
               formatDouble(p.toleranceUs) + "," + std::to_string(p.nBytes) + "," +
               std::to_string(p.instructions) + "\n";
    }

    if (args.out.empty()) {
        std::cout << out;
    } else {
        writeFile(args.out, out);
        json opts;
        opts["model"] = args.modelPath;
        opts["net_model"] = args.netModelPath;
        opts["rates"] = args.rates;
        opts["gamma"] = args.gamma;
        opts["k"] = args.k;
        writeManifest("optimize", opts, 0, {args.out});
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"power-attestation simulator"};
    app.require_subcommand(1);

    GenPolyArgs genPoly;
    auto *gp = app.add_subcommand("gen-poly", "generate random irreducible polynomials");
    gp->add_option("-d,--degree", genPoly.degree, "polynomial degree")
        ->check(CLI::Range(1u, 4096u));
    gp->add_option("-c,--count", genPoly.count, "how many to generate")
        ->check(CLI::Range(1u, 1000000u));
    gp->add_option("--seed", genPoly.seed, "random seed");
    gp->add_option("-o,--out", genPoly.out, "output file (default stdout)");
    gp->add_option("--sweep", genPoly.sweep,
                   "benchmark a degree range min:max[:step] instead of listing");

    CountSpaceArgs countSpace;
    auto *cs = app.add_subcommand("count-space", "count the program space exactly");
    cs->add_option("--degrees", countSpace.degrees, "degree range min:max[:step]");
    cs->add_option("--depths", countSpace.depths, "tree depth range min:max[:step]");
    cs->add_option("--cap", countSpace.cap, "node-count cap (default 2^depth)");
    cs->add_option("-o,--out", countSpace.out, "output CSV");

    ProtocolArgs protocolArgs;
    auto *pr = app.add_subcommand("protocol", "run attestation rounds");
    pr->add_option("--config", protocolArgs.configPath, "INI config file");
    pr->add_option("--rounds", protocolArgs.rounds, "number of rounds")
        ->check(CLI::Range(1u, 1000000u));
    pr->add_option("--seed", protocolArgs.seed, "random seed");
    pr->add_option("-o,--out", protocolArgs.out, "verdict log (JSON lines)");

    GameSweepArgs gameArgs;
    auto *gs = app.add_subcommand("game-sweep", "attacker-verifier game sweep");
    gs->add_option("--config", gameArgs.configPath, "INI config file");
    gs->add_option("-o,--out", gameArgs.out, "output file");
    gs->add_option("--format", gameArgs.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    gs->add_option("--threads", gameArgs.threads, "worker threads (0 = auto)");

    FitArgs fitArgs;
    auto *ft = app.add_subcommand("fit", "fit a timing or network model");
    ft->add_option("--kind", fitArgs.kind, "timing or network")
        ->check(CLI::IsMember({"timing", "network"}));
    ft->add_option("--samples", fitArgs.samplesPath, "sample CSV")->required();
    ft->add_option("-o,--out", fitArgs.out, "model file");

    SynthArgs synthArgs;
    auto *sy = app.add_subcommand("synth", "synthesize a power trace");
    sy->add_option("--phases", synthArgs.phases,
                   "comma list STATE:MICROSECONDS (S1L = long network)");
    sy->add_option("--fs", synthArgs.fsHz, "sampling rate in Hz");
    sy->add_option("--sigma", synthArgs.sigma, "noise sigma in amperes");
    sy->add_option("--seed", synthArgs.seed, "random seed");
    sy->add_option("--idle", synthArgs.idle, "S0 level (A)");
    sy->add_option("--network", synthArgs.network, "S1 level (A)");
    sy->add_option("--load", synthArgs.load, "S2 level (A)");
    sy->add_option("--hash", synthArgs.hash, "S3 level (A)");
    sy->add_option("--period-us", synthArgs.periodUs, "network alternation period");
    sy->add_option("-o,--out", synthArgs.out, "trace file")->required();

    ExtractArgs extractArgs;
    auto *ex = app.add_subcommand("extract", "extract power states from a trace");
    ex->add_option("--trace", extractArgs.tracePath, "trace file")->required();
    ex->add_option("-o,--out", extractArgs.out, "segment CSV");
    ex->add_option("--w1", extractArgs.w1, "first lowpass window (samples)");
    ex->add_option("--w2", extractArgs.w2, "second lowpass window (samples)");
    ex->add_option("--threshold", extractArgs.threshold,
                   "derivative threshold (A/s, 0 = auto)");
    ex->add_option("--min-segment", extractArgs.minSegment, "minimum run (samples)");
    ex->add_option("--merge-tol", extractArgs.mergeTol, "merge tolerance (A)");

    OptimizeArgs optArgs;
    auto *op = app.add_subcommand("optimize", "solve for minimum program parameters");
    op->add_option("--model", optArgs.modelPath, "timing model file");
    op->add_option("--net-model", optArgs.netModelPath, "network model file");
    op->add_option("--rates", optArgs.rates, "comma list of sampling rates (Hz)");
    op->add_option("--gamma", optArgs.gamma, "tolerance factor");
    op->add_option("--k", optArgs.k, "injected instructions to provision for");
    op->add_option("--cost", optArgs.cost, "instruction budget");
    op->add_option("--coverage", optArgs.coverage, "minimum coverage fraction");
    op->add_option("--n-total", optArgs.nTotal, "protected region size (bytes)");
    op->add_option("--c-min", optArgs.cMin, "program size floor");
    op->add_option("-o,--out", optArgs.out, "output CSV");

    try {
        app.parse(argc, argv);
        if (gp->parsed())
            return cmdGenPoly(genPoly);
        if (cs->parsed())
            return cmdCountSpace(countSpace);
        if (pr->parsed())
            return cmdProtocol(protocolArgs);
        if (gs->parsed())
            return cmdGameSweep(gameArgs);
        if (ft->parsed())
            return cmdFit(fitArgs);
        if (sy->parsed())
            return cmdSynth(synthArgs);
        if (ex->parsed())
            return cmdExtract(extractArgs);
        if (op->parsed())
            return cmdOptimize(optArgs);
        return 2;
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const FormatError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Infeasible &e) {
        std::cerr << "error (" << e.constraint() << "): " << e.what() << "\n";
        return 4;
    } catch (const LearningFailure &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const InvalidInput &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
