#include "bmc/gf.hpp"

#include <stdexcept>

namespace bmc {

GaloisField::GaloisField(unsigned symbol_bytes, std::uint32_t reduction_poly)
    : symbol_bytes_(symbol_bytes), order_(1u << (8 * symbol_bytes)) {
    exp_.assign(order_ - 1, 0);
    log_.assign(order_, 0);
    std::uint32_t x = 1;
    for (std::uint32_t e = 0; e < order_ - 1; ++e) {
        if (x == 1 && e != 0)
            throw std::logic_error("GaloisField: generator 2 is not primitive for this polynomial");
        exp_[e] = x;
        log_[x] = e;
        x <<= 1;
        if (x & order_) x ^= reduction_poly;
    }
}

std::uint32_t GaloisField::inv(std::uint32_t a) const {
    if (a == 0) throw std::domain_error("GaloisField: inverse of zero");
    return exp_[(order_ - 1 - log_[a]) % (order_ - 1)];
}

const GaloisField& GaloisField::for_symbol_bytes(unsigned symbol_bytes) {
    static const GaloisField gf256(1, 0x11D);
    static const GaloisField gf65536(2, 0x1100B);
    switch (symbol_bytes) {
        case 1: return gf256;
        case 2: return gf65536;
        default: throw std::invalid_argument("GaloisField: symbol size must be 1 or 2 bytes");
    }
}

} // namespace bmc
