#pragma once

// Plain-text key-value codebook description shared by the selection tool
// and the simulator:
//
//   K = 2
//   M = 2
//   N = 4
//   phase_bits = 1
//   allow_off = false
//   preset = lexicographic
//   pattern_indices = 6,9
//   patterns = ++--,--++
//
// Blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "drm/codebook.hpp"
#include "drm/patterns.hpp"

namespace drm {

struct CodebookFile {
    unsigned K = 0;
    unsigned M = 2;
    std::size_t N = 0;
    unsigned phase_bits = 1;
    bool allow_off = false;
    PermutationPreset preset = PermutationPreset::lexicographic;
    std::vector<ReflectingPattern> patterns;
};

void write_codebook(std::ostream& out, const CodebookFile& cb);
void write_codebook_file(const std::string& path, const CodebookFile& cb);

// Throws ConfigError for malformed content, IoError when the file cannot be read.
CodebookFile read_codebook(std::istream& in);
CodebookFile read_codebook_file(const std::string& path);

}  // namespace drm
