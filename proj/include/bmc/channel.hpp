// OR-superimposition channel. Phase 1 demodulates each slot to one bit:
// 1 iff at least one sender put a "1" there. Phase 2 demodulates each slot
// to the unique sender's symbol, or marks it silent/collision; a collision
// slot exposes the OR of the colliding symbols so that reading it (which
// the decoder never does on the correct path) stays deterministic.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bmc/bitvec.hpp"
#include "bmc/codec.hpp"
#include "bmc/masking.hpp"
#include "bmc/rs.hpp"

namespace bmc {

struct Phase1Observation {
    MaskingParams params;
    BitVec slots; // 4kw bits
};

Phase1Observation superimpose_phase1(const MaskingParams& params,
                                     std::span<const Phase1Codeword> codewords);

enum class SlotState : std::uint8_t { silent, unique, collision };

struct Phase2Observation {
    MaskingParams params;
    RsParams rs;
    std::vector<SlotState> state; // 4kw slots
    std::vector<std::uint32_t> value;
};

Phase2Observation superimpose_phase2(const MaskingParams& params, const RsParams& rs,
                                     std::span<const Phase2Codeword> codewords);

// Flips exactly `flips` distinct, uniformly chosen slots. Deterministic
// given the seed; throws when flips exceeds the slot count.
Phase1Observation inject_bit_flips(Phase1Observation observation, std::uint64_t flips,
                                   std::uint64_t seed);

} // namespace bmc
