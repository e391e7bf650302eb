// Inverted index over a candidate set: for each (segment, pick) the list of
// strings using that pick. Lets callers accumulate inner products against
// many strings at once by walking only the buckets that actually collide.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bmc/masking.hpp"

namespace bmc {

class SegmentIndex {
public:
    explicit SegmentIndex(const CandidateSet& set);

    std::span<const std::uint32_t> bucket(std::uint32_t segment, std::uint32_t pick) const {
        std::size_t row = static_cast<std::size_t>(segment) * (segment_bits_ + 1);
        std::size_t begin = offsets_[row + pick];
        std::size_t end = offsets_[row + pick + 1];
        return {entries_.data() + begin, end - begin};
    }

    std::uint64_t memory_bytes() const {
        return (offsets_.size() + entries_.size()) * sizeof(std::uint32_t);
    }

private:
    std::uint32_t segment_bits_ = 0;
    std::vector<std::uint32_t> offsets_; // per segment: 4k+1 prefix sums
    std::vector<std::uint32_t> entries_; // string indices grouped by pick
};

} // namespace bmc
