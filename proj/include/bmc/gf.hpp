// GF(2^8) and GF(2^16) arithmetic via log/antilog tables.
//
// Reduction polynomials: 0x11D for GF(256), 0x1100B for GF(65536); the
// generator is 2 in both fields. Tables are immutable once built and safe
// to share across threads.

#pragma once

#include <cstdint>
#include <vector>

namespace bmc {

class GaloisField {
public:
    // symbol_bytes is 1 or 2
    static const GaloisField& for_symbol_bytes(unsigned symbol_bytes);

    unsigned symbol_bytes() const { return symbol_bytes_; }
    std::uint32_t order() const { return order_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return a ^ b; }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        std::uint32_t s = log_[a] + log_[b];
        if (s >= order_ - 1) s -= order_ - 1;
        return exp_[s];
    }

    std::uint32_t inv(std::uint32_t a) const;
    std::uint32_t div(std::uint32_t a, std::uint32_t b) const { return mul(a, inv(b)); }

    // alpha^e for e in [0, order-1)
    std::uint32_t exp(std::uint32_t e) const { return exp_[e]; }

private:
    GaloisField(unsigned symbol_bytes, std::uint32_t reduction_poly);

    unsigned symbol_bytes_;
    std::uint32_t order_;
    std::vector<std::uint32_t> exp_;
    std::vector<std::uint32_t> log_;
};

} // namespace bmc
