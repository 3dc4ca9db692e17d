#include "drm/codebook_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "drm/error.hpp"

namespace drm {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("codebook: bad value for " + key + ": '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("codebook: bad boolean for " + key + ": '" + text + "'");
}

}  // namespace

void write_codebook(std::ostream& out, const CodebookFile& cb) {
    out << "# reflecting-modulation codebook\n";
    out << "K = " << cb.K << "\n";
    out << "M = " << cb.M << "\n";
    out << "N = " << cb.N << "\n";
    out << "phase_bits = " << cb.phase_bits << "\n";
    out << "allow_off = " << (cb.allow_off ? "true" : "false") << "\n";
    out << "preset = " << to_string(cb.preset) << "\n";
    out << "pattern_indices = ";
    for (std::size_t i = 0; i < cb.patterns.size(); ++i) {
        out << (i ? "," : "") << enumeration_index(cb.patterns[i], cb.allow_off);
    }
    out << "\npatterns = ";
    for (std::size_t i = 0; i < cb.patterns.size(); ++i) out << (i ? "," : "") << cb.patterns[i].to_string();
    out << "\n";
}

void write_codebook_file(const std::string& path, const CodebookFile& cb) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open codebook file for writing: " + path);
    write_codebook(out, cb);
    if (!out) throw IoError("failed writing codebook file: " + path);
}

CodebookFile read_codebook(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("codebook: line " + std::to_string(lineno) + " is not key = value");
        }
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }

    auto require = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError(std::string("codebook: missing key ") + key);
        return it->second;
    };

    CodebookFile cb;
    cb.K = parse_number<unsigned>("K", require("K"));
    cb.M = parse_number<unsigned>("M", require("M"));
    cb.N = parse_number<std::size_t>("N", require("N"));
    if (kv.count("phase_bits")) cb.phase_bits = parse_number<unsigned>("phase_bits", kv["phase_bits"]);
    if (kv.count("allow_off")) cb.allow_off = parse_bool("allow_off", kv["allow_off"]);
    try {
        if (kv.count("preset")) cb.preset = parse_permutation_preset(kv["preset"]);
        for (const auto& s : split_list(require("patterns"))) {
            cb.patterns.push_back(ReflectingPattern::parse(s, cb.phase_bits));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("codebook: ") + e.what());
    }
    if (cb.patterns.size() != cb.K) throw ConfigError("codebook: pattern count does not match K");
    for (const auto& p : cb.patterns) {
        if (p.units() != cb.N) throw ConfigError("codebook: pattern length does not match N");
    }
    if (kv.count("pattern_indices")) {
        const auto idx = split_list(kv["pattern_indices"]);
        if (idx.size() != cb.patterns.size()) throw ConfigError("codebook: pattern_indices length mismatch");
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (parse_number<std::uint64_t>("pattern_indices", idx[i]) !=
                enumeration_index(cb.patterns[i], cb.allow_off)) {
                throw ConfigError("codebook: pattern_indices disagree with patterns");
            }
        }
    }
    return cb;
}

CodebookFile read_codebook_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open codebook file: " + path);
    return read_codebook(in);
}

}  // namespace drm
