// Command-line front end: simulate, select-patterns, analyze, enumerate.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drm/analysis.hpp"
#include "drm/codebook.hpp"
#include "drm/codebook_file.hpp"
#include "drm/error.hpp"
#include "drm/patterns.hpp"
#include "drm/sim.hpp"
#include "drm/simd/kernels.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

std::string format_complex(drm::Complex z) {
    auto clean = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
    const double re = clean(z.real());
    const double im = clean(z.imag());
    char buf[64];
    if (im == 0.0) std::snprintf(buf, sizeof buf, "%g", re);
    else if (re == 0.0) std::snprintf(buf, sizeof buf, "%gj", im);
    else std::snprintf(buf, sizeof buf, "%g%+gj", re, im);
    return buf;
}

struct SimulateOptions {
    drm::SimConfig cfg;
    std::string scheme = "drm";
    std::string preset = "lexicographic";
    std::string selection = "stepwise";
    std::string snr = "0:2:30";
    std::string codebook;
    std::string out;
    std::string plot_out;
};

void apply_selection(const std::string& text, drm::SimConfig& cfg) {
    if (text == "stepwise") {
        cfg.selection = drm::SelectionMode::stepwise;
    } else if (text == "random") {
        cfg.selection = drm::SelectionMode::random;
    } else if (text.rfind("patterns=", 0) == 0) {
        cfg.selection = drm::SelectionMode::explicit_list;
        cfg.explicit_patterns.clear();
        std::stringstream ss(text.substr(9));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) cfg.explicit_patterns.push_back(item);
        }
    } else {
        throw drm::ConfigError("--selection must be stepwise, random or patterns=<list>");
    }
}

int run_simulate(SimulateOptions& o) {
    drm::SimConfig& cfg = o.cfg;
    cfg.scheme = drm::parse_scheme(o.scheme);
    try {
        cfg.preset = drm::parse_permutation_preset(o.preset);
    } catch (const std::invalid_argument& e) {
        throw drm::ConfigError(e.what());
    }
    apply_selection(o.selection, cfg);
    if (!o.codebook.empty()) {
        const drm::CodebookFile cb = drm::read_codebook_file(o.codebook);
        cfg.K = cb.K;
        cfg.M = cb.M;
        cfg.N = cb.N;
        cfg.phase_bits = cb.phase_bits;
        cfg.allow_off = cb.allow_off;
        cfg.preset = cb.preset;
        cfg.selection = drm::SelectionMode::explicit_list;
        cfg.explicit_patterns.clear();
        for (const auto& p : cb.patterns) cfg.explicit_patterns.push_back(p.to_string());
    }
    cfg.snr_db = drm::parse_snr_list(o.snr);
    cfg.validate();

    const auto records = drm::run_ber_sweep(cfg);
    if (o.out.empty()) {
        std::cout << drm::format_csv(records);
    } else {
        drm::write_csv(records, o.out);
    }
    if (!o.plot_out.empty()) drm::write_plot_pairs(records, o.plot_out);
    return 0;
}

struct SelectOptions {
    std::size_t N = 4;
    unsigned K = 2;
    unsigned M = 2;
    unsigned phase_bits = 1;
    bool allow_off = false;
    std::string preset = "lexicographic";
    std::string method = "stepwise";
    std::uint64_t seed = 1;
    std::string out;
};

int run_select(const SelectOptions& o) {
    drm::SimConfig cfg;
    cfg.N = o.N;
    cfg.K = o.K;
    cfg.M = o.M;
    cfg.phase_bits = o.phase_bits;
    cfg.allow_off = o.allow_off;
    cfg.seed = o.seed;
    if (o.method == "stepwise") cfg.selection = drm::SelectionMode::stepwise;
    else if (o.method == "random") cfg.selection = drm::SelectionMode::random;
    else throw drm::ConfigError("--method must be stepwise or random");
    try {
        cfg.preset = drm::parse_permutation_preset(o.preset);
    } catch (const std::invalid_argument& e) {
        throw drm::ConfigError(e.what());
    }
    cfg.validate();

    drm::CodebookFile cb;
    cb.K = o.K;
    cb.M = o.M;
    cb.N = o.N;
    cb.phase_bits = o.phase_bits;
    cb.allow_off = o.allow_off;
    cb.preset = cfg.preset;
    cb.patterns = drm::resolve_patterns(cfg);
    const double d = drm::dmin(cb.patterns, drm::PskConstellation(o.M));
    if (o.out.empty()) {
        drm::write_codebook(std::cout, cb);
    } else {
        drm::write_codebook_file(o.out, cb);
    }
    std::cerr << "dmin = " << d << "\n";
    return 0;
}

int run_analyze(unsigned K, unsigned M, unsigned Nr, const std::string& T, bool csv) {
    std::optional<std::uint64_t> blocks;
    if (T != "inf") {
        try {
            blocks = std::stoull(T);
        } catch (const std::exception&) {
            throw drm::ConfigError("--t must be an integer >= 2 or 'inf'");
        }
    }
    drm::RateReport rep;
    std::uint64_t c1 = 0;
    std::uint64_t c1_sum = 0;
    try {
        rep = drm::transmission_rate(K, M, blocks);
        c1 = drm::detection_complexity(K, M, Nr);
        c1_sum = drm::detection_complexity_sum_form(K, M, Nr);
    } catch (const std::invalid_argument& e) {
        throw drm::ConfigError(e.what());
    }
    if (csv) {
        std::cout << "K,M,Nr,T,r1,r2,r,rate_exact,rate_exact_value,rate_asymptotic,rate_stirling,"
                     "complexity,complexity_sum_form\n";
        std::cout << K << ',' << M << ',' << Nr << ',' << T << ',' << rep.r1 << ',' << rep.r2 << ','
                  << rep.r << ',' << rep.exact.to_string() << ',' << rep.exact.value() << ','
                  << rep.asymptotic.value() << ',' << rep.stirling << ',' << c1 << ',' << c1_sum << "\n";
        return 0;
    }
    std::cout << "configuration      K=" << K << " M=" << M << " Nr=" << Nr << " T=" << T << "\n"
              << "bits per block     r1=" << rep.r1 << " r2=" << rep.r2 << " r=" << rep.r << "\n"
              << "rate (exact)       " << rep.exact.to_string() << " = " << rep.exact.value() << " bpcu\n"
              << "rate (T -> inf)    " << rep.asymptotic.to_string() << " = " << rep.asymptotic.value()
              << " bpcu\n"
              << "rate (Stirling)    " << rep.stirling << " bpcu\n"
              << "detection cost     " << c1 << " complex multiplications (2^r form)\n"
              << "                   " << c1_sum << " (sum form)\n";
    return 0;
}

int run_enumerate(unsigned K, unsigned M, const std::string& preset_text) {
    drm::PermutationPreset preset;
    try {
        preset = drm::parse_permutation_preset(preset_text);
    } catch (const std::invalid_argument& e) {
        throw drm::ConfigError(e.what());
    }
    drm::PermutationSubset subset;
    std::optional<drm::PskConstellation> psk;
    try {
        subset = drm::build_permutation_subset(K, preset);
        psk.emplace(M);
    } catch (const std::invalid_argument& e) {
        throw drm::ConfigError(e.what());
    }
    if (drm::bits_per_block(subset, *psk) > 12) throw drm::ConfigError("enumerate: 2^r too large to list (r > 12)");
    const auto words = drm::enumerate_codewords(subset, *psk);
    const unsigned r = drm::bits_per_block(subset, *psk);
    std::cout << "# K=" << K << " M=" << M << " preset=" << preset_text << " r=" << r
              << " count=" << words.size() << "\n";
    for (std::size_t w = 0; w < words.size(); ++w) {
        const auto& b = words[w];
        std::cout << w << ' ' << drm::BitWord{static_cast<std::uint32_t>(w), r}.to_string() << " Z=(";
        for (std::size_t i = 0; i < b.Z.order(); ++i) std::cout << (i ? "," : "") << int(b.Z.mapping()[i]) + 1;
        std::cout << ") S=(";
        for (std::size_t i = 0; i < b.symbols.size(); ++i) std::cout << (i ? "," : "") << format_complex(b.symbols[i]);
        std::cout << ") X=[";
        for (std::size_t i = 0; i < b.X.rows(); ++i) {
            std::cout << (i ? ";" : "");
            for (std::size_t j = 0; j < b.X.cols(); ++j) std::cout << (j ? "," : "") << format_complex(b.X(i, j));
        }
        std::cout << "]\n";
    }
    return 0;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// "key = value" lines become "--key=value" arguments; '#' starts a comment
// and underscores in keys map to dashes.
std::vector<std::string> config_file_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw drm::IoError("cannot open config file: " + path);
    std::vector<std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw drm::ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config")
            throw drm::ConfigError(path + ":" + std::to_string(lineno) + ": invalid key");
        for (char& c : key)
            if (c == '_') c = '-';
        out.push_back("--" + key + "=" + value);
    }
    return out;
}

// Splices the simulate config file ahead of the command-line flags so that
// flags win under the take-last policy.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    if (args.size() < 2 || args[1] != "simulate") return args;
    std::optional<std::string> path;
    std::vector<std::string> rest;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw drm::ConfigError("--config requires a path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) return args;
    std::vector<std::string> out{args[0], args[1]};
    for (auto& a : config_file_args(*path)) out.push_back(std::move(a));
    for (auto& a : rest) out.push_back(std::move(a));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differential reflecting modulation link simulator"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo BER sweep");
    simulate->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config_path;
    simulate->add_option("--config", config_path, "Key-value config file (keys as long flags)");
    simulate->add_option("--scheme", sim.scheme, "drm | ndrm")->check(CLI::IsMember({"drm", "ndrm"}));
    simulate->add_option("--n", sim.cfg.N, "RIS units");
    simulate->add_option("--nr", sim.cfg.Nr, "Receive antennas");
    simulate->add_option("--k", sim.cfg.K, "Patterns per block");
    simulate->add_option("--m", sim.cfg.M, "PSK order");
    simulate->add_option("--preset", sim.preset, "lexicographic | table1");
    simulate->add_option("--selection", sim.selection, "stepwise | random | patterns=<p1,p2,...>");
    simulate->add_option("--codebook", sim.codebook, "Codebook file from select-patterns (overrides K, M, N, patterns)");
    simulate->add_option("--phase-bits", sim.cfg.phase_bits, "Phase quantisation bits per unit");
    simulate->add_flag("--allow-off", sim.cfg.allow_off, "Include OFF unit states in candidates");
    simulate->add_option("--snr", sim.snr, "SNR list in dB: start:step:stop or comma list");
    simulate->add_option("--eta", sim.cfg.eta, "CSI error coefficient (NDRM)");
    simulate->add_option("--blocks-per-frame", sim.cfg.blocks_per_frame, "Blocks per frame T");
    simulate->add_option("--frames", sim.cfg.frames, "Channel realisations per SNR point");
    simulate->add_option("--seed", sim.cfg.seed, "Master seed");
    simulate->add_option("--threads", sim.cfg.threads, "Worker threads (0 = all cores)");
    simulate->add_flag("--noiseless", sim.cfg.noiseless, "Force sigma^2 = 0");
    simulate->add_option("--out", sim.out, "CSV output path (stdout if omitted)");
    simulate->add_option("--plot-out", sim.plot_out, "Companion (snr_db, ber) file");

    SelectOptions sel;
    auto* select = app.add_subcommand("select-patterns", "Select K reflecting patterns and emit a codebook file");
    select->add_option("--n", sel.N, "RIS units");
    select->add_option("--k", sel.K, "Patterns to select");
    select->add_option("--m", sel.M, "PSK order");
    select->add_option("--phase-bits", sel.phase_bits, "Phase quantisation bits per unit");
    select->add_flag("--allow-off", sel.allow_off, "Include OFF unit states");
    select->add_option("--preset", sel.preset, "Permutation preset recorded in the codebook");
    select->add_option("--method", sel.method, "stepwise | random");
    select->add_option("--seed", sel.seed, "Seed for random selection");
    select->add_option("--out", sel.out, "Codebook path (stdout if omitted)");

    unsigned aK = 2, aM = 2, aNr = 4;
    std::string aT = "inf";
    bool aCsv = false;
    auto* analyze = app.add_subcommand("analyze", "Transmission rate and detection complexity");
    analyze->add_option("--k", aK, "Patterns per block");
    analyze->add_option("--m", aM, "PSK order");
    analyze->add_option("--nr", aNr, "Receive antennas");
    analyze->add_option("--t", aT, "Blocks per frame, or 'inf'");
    analyze->add_flag("--csv", aCsv, "Emit a CSV header and row");

    unsigned eK = 2, eM = 2;
    std::string ePreset = "lexicographic";
    auto* enumerate = app.add_subcommand("enumerate", "List all legitimate codewords X");
    enumerate->add_option("--k", eK, "Patterns per block");
    enumerate->add_option("--m", eM, "PSK order");
    enumerate->add_option("--preset", ePreset, "lexicographic | table1");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const drm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const drm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (select->parsed()) return run_select(sel);
        if (analyze->parsed()) return run_analyze(aK, aM, aNr, aT, aCsv);
        if (enumerate->parsed()) return run_enumerate(eK, eM, ePreset);
    } catch (const drm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const drm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
