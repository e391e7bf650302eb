#include "bmc/lcs_io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bmc {

void write_lcs(std::ostream& out, const CandidateSet& set, std::uint64_t seed) {
    const auto& params = set.params();
    char header[192];
    std::snprintf(header, sizeof(header),
                  "bmc-lcs v1 k=%u w=%u delta=%.17g size=%zu verified=%d seed=%" PRIu64 "\n",
                  params.max_degree, params.weight, params.delta, set.size(),
                  set.verified() ? 1 : 0, seed);
    out << header;

    std::string line;
    line.reserve(static_cast<std::size_t>(params.weight) * 7 + 2);
    char digits[16];
    for (std::size_t i = 0; i < set.size(); ++i) {
        line.clear();
        for (std::uint32_t j = 0; j < params.weight; ++j) {
            if (j) line.push_back(' ');
            auto [ptr, ec] = std::to_chars(digits, digits + sizeof(digits), set.pick(i, j));
            (void)ec;
            line.append(digits, ptr);
        }
        line.push_back('\n');
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    if (!out) throw std::runtime_error("lcs write failed");
}

void write_lcs_file(const std::string& path, const CandidateSet& set, std::uint64_t seed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_lcs(out, set, seed);
}

LcsFile read_lcs(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("lcs read: empty input");

    MaskingParams params;
    std::size_t size = 0;
    int verified = 0;
    std::uint64_t seed = 0;
    if (std::sscanf(line.c_str(),
                    "bmc-lcs v1 k=%u w=%u delta=%lf size=%zu verified=%d seed=%" SCNu64,
                    &params.max_degree, &params.weight, &params.delta, &size, &verified,
                    &seed) != 6)
        throw std::runtime_error("lcs read: bad header: " + line);
    if (verified != 0 && verified != 1)
        throw std::runtime_error("lcs read: bad verified flag");

    LcsFile file;
    file.set = CandidateSet(params, size);
    file.seed = seed;
    for (std::size_t i = 0; i < size; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("lcs read: truncated at string " + std::to_string(i));
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::uint32_t j = 0; j < params.weight; ++j) {
            while (p < end && *p == ' ') ++p;
            std::uint32_t value = 0;
            auto [next, ec] = std::from_chars(p, end, value);
            if (ec != std::errc{})
                throw std::runtime_error("lcs read: bad pick on line " + std::to_string(i + 2));
            p = next;
            try {
                file.set.set_pick(i, j, value);
            } catch (const std::invalid_argument&) {
                throw std::runtime_error("lcs read: pick out of range on line " +
                                         std::to_string(i + 2));
            }
        }
        while (p < end && *p == ' ') ++p;
        if (p != end)
            throw std::runtime_error("lcs read: trailing data on line " + std::to_string(i + 2));
    }
    file.set.set_verified(verified == 1);
    return file;
}

LcsFile read_lcs_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_lcs(in);
}

} // namespace bmc
