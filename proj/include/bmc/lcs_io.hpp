// Text serialization for candidate sets.
//
// Format:
//   bmc-lcs v1 k=<k> w=<w> delta=<delta> size=<n> verified=<0|1> seed=<seed>
//   <pick> <pick> ... <pick>        (w decimal values per line, one line per string)
//
// Writing is canonical (single spaces, "\n" endings, %.17g for delta), so
// read followed by write reproduces a written file byte for byte.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "bmc/masking.hpp"

namespace bmc {

struct LcsFile {
    CandidateSet set;
    std::uint64_t seed = 0; // seed recorded at build time, informational
};

void write_lcs(std::ostream& out, const CandidateSet& set, std::uint64_t seed);
void write_lcs_file(const std::string& path, const CandidateSet& set, std::uint64_t seed);

// Throws std::runtime_error with a line reference on malformed input.
LcsFile read_lcs(std::istream& in);
LcsFile read_lcs_file(const std::string& path);

} // namespace bmc
