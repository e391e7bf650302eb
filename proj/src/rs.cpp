#include "bmc/rs.hpp"

#include <stdexcept>

#include "bmc/gf.hpp"

namespace bmc {

RsParams rs_params_for(std::uint32_t codeword_symbols, unsigned symbol_bytes) {
    if (symbol_bytes != 1 && symbol_bytes != 2)
        throw std::invalid_argument("rs: symbol size must be 1 or 2 bytes");
    if (codeword_symbols < 2 || codeword_symbols % 2 != 0)
        throw std::invalid_argument("rs: codeword length must be even and >= 2");
    const std::uint32_t field_max = (1u << (8 * symbol_bytes)) - 1;
    if (codeword_symbols > field_max)
        throw std::invalid_argument("rs: codeword length exceeds 2^{8u}-1");
    return RsParams{symbol_bytes, codeword_symbols, codeword_symbols / 2};
}

WuChoice choose_wu(std::uint32_t item_bytes) {
    if (item_bytes < 1) throw std::invalid_argument("choose_wu: item size must be >= 1");
    for (unsigned u = 1; u <= 2; ++u) {
        const std::uint64_t w = 2ull * ((item_bytes + u - 1) / u);
        const std::uint64_t field_max = (1ull << (8 * u)) - 1;
        if (w <= field_max) return {static_cast<std::uint32_t>(w), u};
    }
    throw std::invalid_argument("choose_wu: item too large for supported symbol sizes");
}

std::vector<std::uint32_t> rs_encode(std::span<const std::uint8_t> message,
                                     const RsParams& params) {
    if (message.size() > params.message_bytes())
        throw std::invalid_argument("rs_encode: message longer than w/2 symbols");
    const GaloisField& gf = GaloisField::for_symbol_bytes(params.symbol_bytes);

    // big-endian bytes -> coefficient symbols, zero padded
    std::vector<std::uint32_t> coeffs(params.message_symbols, 0);
    for (std::size_t b = 0; b < message.size(); ++b) {
        const std::size_t sym = b / params.symbol_bytes;
        const unsigned shift = 8 * (params.symbol_bytes - 1 - b % params.symbol_bytes);
        coeffs[sym] |= static_cast<std::uint32_t>(message[b]) << shift;
    }

    std::vector<std::uint32_t> codeword(params.codeword_symbols);
    for (std::uint32_t i = 0; i < params.codeword_symbols; ++i) {
        const std::uint32_t x = i == 0 ? 0 : gf.exp(i - 1);
        std::uint32_t acc = 0;
        for (std::size_t t = coeffs.size(); t-- > 0;) acc = gf.mul(acc, x) ^ coeffs[t];
        codeword[i] = acc;
    }
    return codeword;
}

std::optional<std::vector<std::uint8_t>> rs_erasure_decode(
    std::span<const RsReceived> received, const RsParams& params) {
    if (received.size() != params.codeword_symbols)
        throw std::invalid_argument("rs_erasure_decode: length mismatch");
    const GaloisField& gf = GaloisField::for_symbol_bytes(params.symbol_bytes);
    const std::uint32_t n = params.message_symbols;

    // first n survivors in position order
    std::vector<std::uint32_t> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    for (std::uint32_t i = 0; i < params.codeword_symbols && xs.size() < n; ++i) {
        if (received[i].erased) continue;
        xs.push_back(i == 0 ? 0 : gf.exp(i - 1));
        ys.push_back(received[i].value);
    }
    if (xs.size() < n) return std::nullopt;

    // master polynomial M(x) = prod (x + xs_i), degree n
    std::vector<std::uint32_t> master(n + 1, 0);
    master[0] = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t t = i + 1; t-- > 1;)
            master[t] = master[t - 1] ^ gf.mul(xs[i], master[t]);
        master[0] = gf.mul(xs[i], master[0]);
        master[i + 1] = 1;
    }

    std::vector<std::uint32_t> coeffs(n, 0);
    std::vector<std::uint32_t> quotient(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        // Q_i = M / (x + xs_i) by synthetic division
        quotient[n - 1] = master[n];
        for (std::uint32_t t = n - 1; t-- > 0;)
            quotient[t] = master[t + 1] ^ gf.mul(xs[i], quotient[t + 1]);
        // denom = Q_i(xs_i) = prod_{j != i} (xs_i + xs_j)
        std::uint32_t denom = 0;
        for (std::size_t t = n; t-- > 0;) denom = gf.mul(denom, xs[i]) ^ quotient[t];
        const std::uint32_t scale = gf.div(ys[i], denom);
        for (std::uint32_t t = 0; t < n; ++t) coeffs[t] ^= gf.mul(scale, quotient[t]);
    }

    std::vector<std::uint8_t> message(params.message_bytes());
    for (std::uint32_t sym = 0; sym < n; ++sym)
        for (unsigned b = 0; b < params.symbol_bytes; ++b)
            message[sym * params.symbol_bytes + b] = static_cast<std::uint8_t>(
                coeffs[sym] >> (8 * (params.symbol_bytes - 1 - b)));
    return message;
}

} // namespace bmc
