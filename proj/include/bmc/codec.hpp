// Two-phase protocol codec: masking-string broadcast (phase 1) followed by
// the data-item broadcast (phase 2). A sender draws a masking string from
// the shared set, announces it by transmitting "1" on its w slots, then
// sends its rate-1/2 RS codeword symbols on those same slots.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bmc/crc32.hpp"
#include "bmc/masking.hpp"
#include "bmc/rs.hpp"

namespace bmc {

struct Phase1Observation;
struct Phase2Observation;

// A phase-1 codeword is the masking string itself: "1" on each pick slot,
// blank everywhere else.
using Phase1Codeword = MaskingString;

struct MaskingDraw {
    std::size_t index = 0; // position within the shared set
    MaskingString mask;
};

// Uniform draw from the set; deterministic given the seed.
MaskingDraw encode_masking(const CandidateSet& set, std::uint64_t seed);

// Every string whose picks are fully or mostly covered by the observation:
// output λ iff λ·z >= 3w/4, compared as 4*(λ·z) >= 3w. Output indices follow
// set storage order, regardless of thread count.
std::vector<std::size_t> decode_masking(const Phase1Observation& observation,
                                        const CandidateSet& set, unsigned threads = 1);

struct Phase2Codeword {
    MaskingString mask;
    std::vector<std::uint32_t> symbols; // w RS symbols, in slot order
};

// CRC-frames the payload, RS-encodes the d-byte item, and places the w
// codeword symbols on the masking string's slots. Requires the RS codeword
// length to equal the string weight and the item to fit in w/2 symbols.
Phase2Codeword encode_data(std::span<const std::uint8_t> payload,
                           const MaskingString& mask, const RsParams& params);

// For each decoded string: gather the symbols on slots not shared with any
// other decoded string, erase the rest, RS-decode, and keep the payload iff
// its CRC passes. item_bytes is the framed item size d. Failed items are
// dropped silently; output order follows decoded_indices.
std::vector<std::vector<std::uint8_t>> decode_data(
    const Phase2Observation& observation, const CandidateSet& set,
    std::span<const std::size_t> decoded_indices, const RsParams& params,
    std::uint32_t item_bytes);

struct AirtimeBreakdown {
    std::uint64_t phase1_bytes = 0; // 4kw bits
    std::uint64_t phase2_bytes = 0; // 4kw RS symbols of u bytes
    std::uint64_t total_bytes = 0;
};

// Exact airtime for a d-byte item at degree bound k with the (w,u) pair
// chosen by choose_wu: kw/2 + 4kwu bytes, which is (8 + 1/u)kd when u
// divides d, and at most 9kd for the supported sizes.
AirtimeBreakdown bmc_airtime(std::uint32_t max_degree, std::uint32_t item_bytes);

} // namespace bmc
