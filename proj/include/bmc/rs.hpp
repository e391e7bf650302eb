// Rate-1/2 Reed-Solomon erasure codec over GF(2^{8u}).
//
// The message bytes are split into w/2 symbols (big-endian within a u=2
// symbol) taken as polynomial coefficients; the codeword is the w
// evaluations at the fixed points 0, 1, alpha, alpha^2, ... in generator
// order. Decoding interpolates through any w/2 surviving evaluations, so
// the codec tolerates erasures only.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bmc {

struct RsParams {
    unsigned symbol_bytes = 1;          // u: 1 or 2
    std::uint32_t codeword_symbols = 0; // w, even, <= 2^{8u} - 1
    std::uint32_t message_symbols = 0;  // w/2

    std::uint32_t message_bytes() const { return message_symbols * symbol_bytes; }
};

// Validates the field-size constraint and the exact rate-1/2 split.
RsParams rs_params_for(std::uint32_t codeword_symbols, unsigned symbol_bytes);

struct WuChoice {
    std::uint32_t w = 0;
    unsigned u = 0;
};

// Smallest symbol size u (then smallest even w = 2*ceil(d/u)) such that
// w <= 2^{8u} - 1; throws when even u = 2 cannot host the item.
WuChoice choose_wu(std::uint32_t item_bytes);

// Zero-pads the message to w/2 symbols and evaluates. Throws when the
// message exceeds w/2 symbols.
std::vector<std::uint32_t> rs_encode(std::span<const std::uint8_t> message,
                                     const RsParams& params);

struct RsReceived {
    std::uint32_t value = 0;
    bool erased = false;
};

// Recovers the padded message (message_bytes() long) when at least w/2
// symbols survive; std::nullopt otherwise. Surviving values are trusted:
// a corrupted survivor yields a wrong message for the CRC to reject.
std::optional<std::vector<std::uint8_t>> rs_erasure_decode(
    std::span<const RsReceived> received, const RsParams& params);

} // namespace bmc
