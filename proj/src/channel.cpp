#include "bmc/channel.hpp"

#include <stdexcept>
#include <unordered_set>

#include "bmc/rng.hpp"

namespace bmc {

namespace {

void require_same_params(const MaskingParams& expected, const MaskingString& mask) {
    if (!(mask.params == expected) || mask.picks.size() != expected.weight)
        throw std::invalid_argument("channel: codeword length mismatch");
}

} // namespace

Phase1Observation superimpose_phase1(const MaskingParams& params,
                                     std::span<const Phase1Codeword> codewords) {
    validate(params);
    Phase1Observation obs{params, BitVec(params.total_slots())};
    for (const auto& cw : codewords) {
        require_same_params(params, cw);
        for (std::uint32_t j = 0; j < params.weight; ++j)
            obs.slots.set(slot_of(params, j, cw.picks[j]));
    }
    return obs;
}

Phase2Observation superimpose_phase2(const MaskingParams& params, const RsParams& rs,
                                     std::span<const Phase2Codeword> codewords) {
    validate(params);
    if (rs.codeword_symbols != params.weight)
        throw std::invalid_argument("channel: RS codeword length does not match weight");
    Phase2Observation obs{params, rs, {}, {}};
    obs.state.assign(params.total_slots(), SlotState::silent);
    obs.value.assign(params.total_slots(), 0);
    for (const auto& cw : codewords) {
        require_same_params(params, cw.mask);
        if (cw.symbols.size() != params.weight)
            throw std::invalid_argument("channel: symbol count mismatch");
        for (std::uint32_t j = 0; j < params.weight; ++j) {
            const std::uint64_t slot = slot_of(params, j, cw.mask.picks[j]);
            if (obs.state[slot] == SlotState::silent) {
                obs.state[slot] = SlotState::unique;
                obs.value[slot] = cw.symbols[j];
            } else {
                obs.state[slot] = SlotState::collision;
                obs.value[slot] |= cw.symbols[j];
            }
        }
    }
    return obs;
}

Phase1Observation inject_bit_flips(Phase1Observation observation, std::uint64_t flips,
                                   std::uint64_t seed) {
    const std::uint64_t total = observation.slots.size();
    if (flips > total) throw std::invalid_argument("inject_bit_flips: flips exceed slot count");

    // Floyd's sampling: exactly `flips` distinct slots, uniform over subsets
    Rng rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(flips);
    for (std::uint64_t j = total - flips; j < total; ++j) {
        std::uint64_t r = rng.uniform_below(j + 1);
        if (!chosen.insert(r).second) chosen.insert(j);
    }
    for (std::uint64_t slot : chosen) observation.slots.flip(slot);
    return observation;
}

} // namespace bmc
