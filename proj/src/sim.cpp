#include "drm/sim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "drm/error.hpp"

namespace drm {
namespace {

enum class StreamDomain : std::uint32_t { frame = 0, selection = 1 };

Rng derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b, StreamDomain domain) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(master), hi(master), lo(a), hi(a), lo(b), hi(b),
                      static_cast<std::uint32_t>(domain)};
    return Rng(seq);
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct Tally {
    std::uint64_t blocks = 0;
    std::uint64_t errors = 0;
};

struct SweepContext {
    const SimConfig& cfg;
    std::vector<ReflectingPattern> patterns;
    PermutationSubset subset;
    PskConstellation psk;
    std::vector<BlockMatrices> codewords;
    unsigned r;
};

std::uint32_t random_word(Rng& rng, unsigned r) {
    return static_cast<std::uint32_t>(rng() >> (64 - r));
}

Tally simulate_frame(const SweepContext& ctx, CorrelationDetector& det, double sigma2,
                     std::size_t snr_index, std::size_t frame_index) {
    const SimConfig& cfg = ctx.cfg;
    Rng rng = seed_stream(cfg.seed, frame_index, snr_index);
    const ChannelRealization ch = draw_channel(cfg.N, cfg.Nr, rng);
    const ComplexMatrix H = build_equivalent_channel(ch, ctx.patterns);
    const NoiseModel noise{sigma2};
    Tally tally;

    if (cfg.scheme == Scheme::drm) {
        DifferentialState state = DifferentialState::initial(cfg.K);
        ReceivedBlock previous = transmit_block(state.V, H, noise, rng);
        for (std::size_t t = 1; t < cfg.blocks_per_frame; ++t) {
            const std::uint32_t word = random_word(rng, ctx.r);
            state = differential_encode(state, ctx.codewords[word]);
            ReceivedBlock current = transmit_block(state.V, H, noise, rng);
            const auto detected = static_cast<std::uint32_t>(det.argmax(current.Y, previous.Y));
            tally.errors += static_cast<std::uint64_t>(std::popcount(word ^ detected));
            ++tally.blocks;
            previous = std::move(current);
        }
    } else {
        const ComplexMatrix H_hat =
            cfg.eta > 0.0 ? build_equivalent_channel(perturb_csi(ch, cfg.eta, sigma2, rng), ctx.patterns) : H;
        for (std::size_t t = 0; t < cfg.blocks_per_frame; ++t) {
            const std::uint32_t word = random_word(rng, ctx.r);
            const ReceivedBlock received = transmit_block(ctx.codewords[word].X, H, noise, rng);
            const auto detected = static_cast<std::uint32_t>(det.argmax(received.Y, H_hat));
            tally.errors += static_cast<std::uint64_t>(std::popcount(word ^ detected));
            ++tally.blocks;
        }
    }
    return tally;
}

}  // namespace

std::string_view to_string(Scheme s) { return s == Scheme::drm ? "drm" : "ndrm"; }

Scheme parse_scheme(std::string_view text) {
    if (text == "drm") return Scheme::drm;
    if (text == "ndrm") return Scheme::ndrm;
    throw ConfigError("unknown scheme '" + std::string(text) + "'");
}

std::vector<double> SimConfig::default_snr_grid() {
    std::vector<double> g;
    for (int s = 0; s <= 30; s += 2) g.push_back(s);
    return g;
}

void SimConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (N < 1) fail("N must be >= 1");
    if (Nr < 1) fail("Nr must be >= 1");
    if (K < 1 || K > 8) fail("K must be in [1, 8]");
    if (M < 2 || !std::has_single_bit(M)) fail("M must be a power of two >= 2");
    if (frames < 1) fail("frames must be >= 1");
    if (blocks_per_frame < 2) fail("blocks per frame must be >= 2");
    if (snr_db.empty()) fail("SNR list is empty");
    for (double s : snr_db) {
        if (!std::isfinite(s)) fail("SNR values must be finite");
    }
    if (!std::isfinite(eta) || eta < 0.0) fail("eta must be a non-negative finite number");
    if (preset == PermutationPreset::table1 && K != 3) fail("table1 preset requires K = 3");
    if (phase_bits < 1 || phase_bits > 4) fail("phase_bits must be in [1, 4]");
    const unsigned r = permutation_bits(K) + K * static_cast<unsigned>(std::countr_zero(M));
    if (r > 20) fail("bits per block r = " + std::to_string(r) + " exceeds 20");
    if (selection == SelectionMode::explicit_list) {
        if (explicit_patterns.size() != K) fail("explicit pattern list must contain exactly K entries");
    } else {
        const double states = std::pow(2.0, phase_bits) + (allow_off ? 1.0 : 0.0);
        if (N > 16) fail("pattern enumeration needs N <= 16");
        if (std::pow(states, static_cast<double>(N)) < K) fail("K exceeds the number of legitimate patterns");
    }
}

std::vector<double> parse_snr_list(std::string_view text) {
    auto num = [&](std::string_view s) {
        double v = 0.0;
        std::string t(s);
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size()) {
            throw ConfigError("bad SNR value '" + t + "'");
        }
        return v;
    };
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos) throw ConfigError("SNR range must be start:step:stop");
        const double start = num(text.substr(0, a));
        const double step = num(text.substr(a + 1, b - a - 1));
        const double stop = num(text.substr(b + 1));
        if (!(step > 0.0) || stop < start) throw ConfigError("SNR range needs step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        out.push_back(num(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

Rng seed_stream(std::uint64_t master_seed, std::uint64_t frame_index, std::uint64_t snr_index) {
    return derive_stream(master_seed, frame_index, snr_index, StreamDomain::frame);
}

std::vector<ReflectingPattern> resolve_patterns(const SimConfig& cfg) {
    if (cfg.selection == SelectionMode::explicit_list) {
        std::vector<ReflectingPattern> out;
        for (const auto& s : cfg.explicit_patterns) {
            try {
                out.push_back(ReflectingPattern::parse(s, cfg.phase_bits));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
            if (out.back().units() != cfg.N) throw ConfigError("config: pattern '" + s + "' does not have N units");
        }
        return out;
    }
    const PatternCandidateSet cands = enumerate_patterns(cfg.N, cfg.phase_bits, cfg.allow_off);
    if (cfg.selection == SelectionMode::stepwise) {
        return stepwise_depletion_select(cands, cfg.K, PskConstellation(cfg.M));
    }
    // Partial Fisher-Yates over enumeration indices, then ascending order.
    Rng rng = derive_stream(cfg.seed, 0, 0, StreamDomain::selection);
    std::vector<std::size_t> idx(cands.patterns.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < cfg.K; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(cfg.K);
    std::sort(idx.begin(), idx.end());
    std::vector<ReflectingPattern> out;
    for (auto i : idx) out.push_back(cands.patterns[i]);
    return out;
}

std::vector<BerRecord> run_ber_sweep(const SimConfig& cfg) {
    cfg.validate();
    SweepContext ctx{cfg, resolve_patterns(cfg), build_permutation_subset(cfg.K, cfg.preset),
                     PskConstellation(cfg.M), {}, 0};
    ctx.codewords = enumerate_codewords(ctx.subset, ctx.psk);
    ctx.r = bits_per_block(ctx.subset, ctx.psk);

    const std::size_t points = cfg.snr_db.size();
    const std::size_t units = points * cfg.frames;
    std::vector<Tally> tallies(units);

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, units));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        CorrelationDetector det(ctx.codewords);
        for (std::size_t u = next.fetch_add(1); u < units; u = next.fetch_add(1)) {
            const std::size_t snr_index = u / cfg.frames;
            const std::size_t frame_index = u % cfg.frames;
            const double sigma2 = cfg.noiseless ? 0.0 : std::pow(10.0, -cfg.snr_db[snr_index] / 10.0);
            tallies[u] = simulate_frame(ctx, det, sigma2, snr_index, frame_index);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    std::vector<BerRecord> records;
    records.reserve(points);
    for (std::size_t p = 0; p < points; ++p) {
        BerRecord rec{cfg.scheme, cfg.K, cfg.M, cfg.N, cfg.Nr, cfg.eta, cfg.snr_db[p],
                      cfg.frames, 0, 0, 0.0, cfg.seed};
        for (std::size_t f = 0; f < cfg.frames; ++f) {
            rec.blocks_counted += tallies[p * cfg.frames + f].blocks;
            rec.bit_errors += tallies[p * cfg.frames + f].errors;
        }
        rec.ber = static_cast<double>(rec.bit_errors) / (static_cast<double>(rec.blocks_counted) * ctx.r);
        records.push_back(rec);
    }
    return records;
}

std::string format_csv(const std::vector<BerRecord>& records) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const auto& r : records) {
        char ber[32];
        std::snprintf(ber, sizeof ber, "%.9e", r.ber);
        os << to_string(r.scheme) << ',' << r.K << ',' << r.M << ',' << r.N << ',' << r.Nr << ','
           << format_double(r.eta) << ',' << format_double(r.snr_db) << ',' << r.frames << ','
           << r.blocks_counted << ',' << r.bit_errors << ',' << ber << ',' << r.seed << "\n";
    }
    return os.str();
}

void write_csv(const std::vector<BerRecord>& records, const std::string& path) {
    if (records.empty()) throw std::invalid_argument("write_csv: no records");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open CSV for writing: " + path);
    out << format_csv(records);
    out.flush();
    if (!out) throw IoError("failed writing CSV: " + path);
}

std::vector<BerRecord> parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("CSV: unexpected header");
    std::vector<BerRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 12) throw ConfigError("CSV: line " + std::to_string(lineno) + " has wrong field count");
        auto u64 = [&](const std::string& s) {
            std::uint64_t v = 0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) throw ConfigError("CSV: bad integer '" + s + "'");
            return v;
        };
        auto real = [&](const std::string& s) {
            double v = 0.0;
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size()) throw ConfigError("CSV: bad number '" + s + "'");
            return v;
        };
        BerRecord r;
        r.scheme = parse_scheme(f[0]);
        r.K = static_cast<unsigned>(u64(f[1]));
        r.M = static_cast<unsigned>(u64(f[2]));
        r.N = u64(f[3]);
        r.Nr = u64(f[4]);
        r.eta = real(f[5]);
        r.snr_db = real(f[6]);
        r.frames = u64(f[7]);
        r.blocks_counted = u64(f[8]);
        r.bit_errors = u64(f[9]);
        r.ber = real(f[10]);
        r.seed = u64(f[11]);
        out.push_back(r);
    }
    return out;
}

std::vector<BerRecord> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

void write_plot_pairs(const std::vector<BerRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open plot file for writing: " + path);
    std::string current;
    for (const auto& r : records) {
        const std::string key = std::string(to_string(r.scheme)) + " K=" + std::to_string(r.K) +
                                " M=" + std::to_string(r.M) + " eta=" + format_double(r.eta);
        if (key != current) {
            if (!current.empty()) out << "\n\n";
            out << "# " << key << "\n";
            current = key;
        }
        char ber[32];
        std::snprintf(ber, sizeof ber, "%.9e", r.ber);
        out << format_double(r.snr_db) << ' ' << ber << "\n";
    }
    if (!out) throw IoError("failed writing plot file: " + path);
}

}  // namespace drm
