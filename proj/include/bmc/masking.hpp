// Masking strings and low-collision-set machinery.
//
// A (k,w) masking string is the concatenation of w segments of 4k bits,
// each segment carrying exactly one "1". We store the index of that bit
// per segment (w integers in [0,4k)) instead of the raw 4kw-bit string,
// which makes inner products O(w) and keeps large sets compact.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bmc {

struct MaskingParams {
    std::uint32_t max_degree = 0; // k: max number of neighboring senders
    std::uint32_t weight = 0;     // w: Hamming weight / segment count
    double delta = 0.0;           // failure parameter, in (0,1]

    std::uint32_t segment_bits() const { return 4 * max_degree; }
    std::uint64_t total_slots() const {
        return static_cast<std::uint64_t>(segment_bits()) * weight;
    }
    friend bool operator==(const MaskingParams&, const MaskingParams&) = default;
};

// Throws std::invalid_argument when k < 1, w < 1 or delta outside (0,1].
void validate(const MaskingParams& params);

struct MaskingString {
    MaskingParams params;
    std::vector<std::uint32_t> picks; // one per segment, each in [0, 4k)
};

// Bit position of (segment, pick) within the expanded 4kw-bit string.
inline std::uint64_t slot_of(const MaskingParams& params, std::uint32_t segment,
                             std::uint32_t pick) {
    return static_cast<std::uint64_t>(segment) * params.segment_bits() + pick;
}

// A multiset of masking strings sharing one parameter set. Duplicates are
// permitted until the promising-set check has certified the set. Picks are
// stored flat; 16-bit cells are used whenever 4k fits, halving the memory
// for large sets.
class CandidateSet {
public:
    CandidateSet() = default;
    CandidateSet(const MaskingParams& params, std::size_t size);

    std::size_t size() const { return size_; }
    const MaskingParams& params() const { return params_; }

    bool verified() const { return verified_; }
    void set_verified(bool v) { verified_ = v; }

    std::uint32_t pick(std::size_t string_index, std::size_t segment) const {
        std::size_t at = string_index * params_.weight + segment;
        return narrow_ ? picks16_[at] : picks32_[at];
    }
    void set_pick(std::size_t string_index, std::size_t segment, std::uint32_t value);

    MaskingString string_at(std::size_t index) const;

    bool narrow() const { return narrow_; }
    std::span<const std::uint16_t> picks16() const { return picks16_; }
    std::span<const std::uint32_t> picks32() const { return picks32_; }

    std::uint64_t memory_bytes() const;

private:
    MaskingParams params_;
    std::size_t size_ = 0;
    bool verified_ = false;
    bool narrow_ = true;
    std::vector<std::uint16_t> picks16_;
    std::vector<std::uint32_t> picks32_;
};

// Count of segments where both strings picked the same bit; equals the
// bit-level dot product of the expanded strings. Throws on parameter
// mismatch.
std::uint32_t inner_product(const MaskingString& a, const MaskingString& b);

// Sum of inner_product(lambda, t) over the multiset, with multiplicity.
std::uint64_t compatibility_sum(const MaskingString& lambda,
                                std::span<const MaskingString> multiset);

// True iff the summed inner products are at most w/2 (compared as
// 2*sum <= w to stay in integers).
bool is_compatible(const MaskingString& lambda,
                   std::span<const MaskingString> multiset);

// Draws `size` independent strings, every pick uniform over [0, 4k).
// Deterministic for a given seed; the verified flag starts unset.
CandidateSet construct_candidate_set(const MaskingParams& params, std::size_t size,
                                     std::uint64_t seed);

struct PromisingFailure {
    std::size_t index;    // offending string
    int equation;         // 1, 2 or 3
};

struct PromisingStringStats {
    double mean;                      // mu(lambda, S)
    std::uint32_t max_inner_product;  // max over the other strings
    double max_deviation;             // max |ip - mu|
    double squared_deviation_sum;     // sum (ip - mu)^2
};

struct PromisingDiagnostics {
    bool promising = false;
    std::vector<PromisingFailure> failures; // empty iff promising
    std::vector<PromisingStringStats> per_string;
    double mean_target = 0.0;  // w/4k
    double eq1_slack = 0.0;    // 0.04 * w/4k
    double eq2_bound = 0.0;    // 4 ln(k/delta)
    double eq3_bound = 0.0;    // (|S|-1) * (w/5k) * ln(k/delta)
};

// Evaluates the three promising-set inequalities for every string, with
// strict comparisons done in exact integer form where possible. Marks the
// set verified iff all pass. Requires |S| >= 2. Cost grows with |S|^2*w/4k
// pair collisions plus an O(|S|) scan per string; callers pick feasible
// sizes.
PromisingDiagnostics check_promising(CandidateSet& set, unsigned threads = 1);

// ceil(20 ln(k/delta) ln(2k/delta^2)): the weight for which the promising
// set construction and LCS implication are proven. Throws when delta is
// outside (0,1).
std::uint32_t theoretical_weight(std::uint32_t max_degree, double delta);

// True when delta <= 0.02 and k >= 6 ln(2k/delta^2); outside this range
// theoretical_weight is still computable but carries no guarantee.
bool theoretical_weight_preconditions_hold(std::uint32_t max_degree, double delta);

// S^c: every string's pick sequence repeated `repeat` times; weight becomes
// c*w and all pairwise inner products scale by c. Verified status carries
// over.
CandidateSet extend_lcs(const CandidateSet& set, std::uint32_t repeat);

struct LcsCheckResult {
    std::uint32_t m = 0;
    std::uint64_t trials = 0;
    std::uint64_t cond1_violations = 0; // T incompatible with some unsent string
    std::uint64_t cond2_violations = 0; // T minus the sampled element vs that element
    std::uint64_t violations = 0;       // trials violating either condition
    double violation_rate = 0.0;
    double wilson_low = 0.0;  // 95% Wilson interval on the rate
    double wilson_high = 0.0;
};

// Estimates how often m uniform draws (with replacement) from S violate
// either low-collision-set condition; the element index for condition (2)
// is sampled per trial. Deterministic given the seed, and independent of
// the thread count.
LcsCheckResult monte_carlo_lcs_check(const CandidateSet& set, std::uint32_t m,
                                     std::uint64_t trials, std::uint64_t seed,
                                     unsigned threads = 1);

// 95% Wilson score interval for `hits` out of `total`.
void wilson_interval(std::uint64_t hits, std::uint64_t total, double& low, double& high);

} // namespace bmc
