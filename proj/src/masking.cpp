#include "bmc/masking.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "bmc/parallel.hpp"
#include "bmc/rng.hpp"
#include "bmc/segment_index.hpp"

namespace bmc {

void validate(const MaskingParams& params) {
    if (params.max_degree < 1) throw std::invalid_argument("masking: max_degree must be >= 1");
    if (params.weight < 1) throw std::invalid_argument("masking: weight must be >= 1");
    if (!(params.delta > 0.0) || params.delta > 1.0)
        throw std::invalid_argument("masking: delta must be in (0, 1]");
}

CandidateSet::CandidateSet(const MaskingParams& params, std::size_t size)
    : params_(params), size_(size) {
    validate(params);
    narrow_ = params.segment_bits() <= 0xFFFFu;
    std::size_t cells = size * params.weight;
    if (narrow_)
        picks16_.assign(cells, 0);
    else
        picks32_.assign(cells, 0);
}

void CandidateSet::set_pick(std::size_t string_index, std::size_t segment,
                            std::uint32_t value) {
    if (value >= params_.segment_bits())
        throw std::invalid_argument("masking: pick outside segment");
    std::size_t at = string_index * params_.weight + segment;
    if (narrow_)
        picks16_[at] = static_cast<std::uint16_t>(value);
    else
        picks32_[at] = value;
}

MaskingString CandidateSet::string_at(std::size_t index) const {
    MaskingString s;
    s.params = params_;
    s.picks.resize(params_.weight);
    for (std::uint32_t j = 0; j < params_.weight; ++j) s.picks[j] = pick(index, j);
    return s;
}

std::uint64_t CandidateSet::memory_bytes() const {
    return narrow_ ? picks16_.size() * sizeof(std::uint16_t)
                   : picks32_.size() * sizeof(std::uint32_t);
}

std::uint32_t inner_product(const MaskingString& a, const MaskingString& b) {
    if (!(a.params == b.params))
        throw std::invalid_argument("inner_product: parameter mismatch");
    std::uint32_t matches = 0;
    for (std::size_t j = 0; j < a.picks.size(); ++j)
        matches += a.picks[j] == b.picks[j];
    return matches;
}

std::uint64_t compatibility_sum(const MaskingString& lambda,
                                std::span<const MaskingString> multiset) {
    std::uint64_t sum = 0;
    for (const auto& t : multiset) sum += inner_product(lambda, t);
    return sum;
}

bool is_compatible(const MaskingString& lambda,
                   std::span<const MaskingString> multiset) {
    return 2 * compatibility_sum(lambda, multiset) <= lambda.params.weight;
}

CandidateSet construct_candidate_set(const MaskingParams& params, std::size_t size,
                                     std::uint64_t seed) {
    if (size < 1) throw std::invalid_argument("construct_candidate_set: size must be >= 1");
    CandidateSet set(params, size);
    Rng rng(seed);
    const std::uint32_t segment_bits = params.segment_bits();
    for (std::size_t i = 0; i < size; ++i)
        for (std::uint32_t j = 0; j < params.weight; ++j)
            set.set_pick(i, j, static_cast<std::uint32_t>(rng.uniform_below(segment_bits)));
    return set;
}

SegmentIndex::SegmentIndex(const CandidateSet& set) {
    const auto& params = set.params();
    segment_bits_ = params.segment_bits();
    const std::size_t n = set.size();
    const std::uint32_t w = params.weight;
    if (static_cast<std::uint64_t>(n) * w > 0xFFFFFFFFull)
        throw std::invalid_argument("SegmentIndex: set too large to index");

    // counting sort per segment into one flat CSR layout; counts are stored
    // one cell right of their bucket, so a flat inclusive prefix sum turns
    // offsets_[row + p] into the exclusive start of bucket (segment, p).
    offsets_.assign(static_cast<std::size_t>(w) * (segment_bits_ + 1), 0);
    entries_.resize(n * static_cast<std::size_t>(w));
    for (std::size_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < w; ++j)
            offsets_[static_cast<std::size_t>(j) * (segment_bits_ + 1) + set.pick(i, j) + 1]++;
    std::uint64_t acc = 0;
    for (auto& cell : offsets_) {
        acc += cell;
        cell = static_cast<std::uint32_t>(acc);
    }
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end());
    for (std::size_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < w; ++j) {
            std::size_t cell = static_cast<std::size_t>(j) * (segment_bits_ + 1) + set.pick(i, j);
            entries_[cursor[cell]++] = static_cast<std::uint32_t>(i);
        }
}

namespace {

long double u128_to_ld(unsigned __int128 v) {
    return static_cast<long double>(static_cast<std::uint64_t>(v >> 64)) * 18446744073709551616.0L +
           static_cast<long double>(static_cast<std::uint64_t>(v));
}

} // namespace

PromisingDiagnostics check_promising(CandidateSet& set, unsigned threads) {
    const std::size_t n = set.size();
    if (n < 2) throw std::invalid_argument("check_promising: need at least 2 strings");
    const auto& params = set.params();
    const std::uint32_t w = params.weight;
    const std::uint32_t k = params.max_degree;
    const std::uint64_t n_minus_1 = n - 1;

    PromisingDiagnostics diag;
    diag.mean_target = static_cast<double>(w) / (4.0 * k);
    diag.eq1_slack = 0.04 * diag.mean_target;
    diag.eq2_bound = 4.0 * std::log(static_cast<double>(k) / params.delta);
    diag.eq3_bound = static_cast<double>(n_minus_1) * (static_cast<double>(w) / (5.0 * k)) *
                     std::log(static_cast<double>(k) / params.delta);
    diag.per_string.resize(n);

    const SegmentIndex index(set);

    // Scaled strict comparisons; scaling keeps the left-hand sides integral.
    //   eq1:  25*|4k*sum - w*(n-1)|        <  w*(n-1)
    //   eq2:  (n-1)*ip - sum  (per string) <  (n-1) * eq2_bound
    //   eq3:  sum((n-1)*ip - sum)^2        <  (n-1)^3 * (w/5k) * ln(k/delta)
    const long double eq2_scaled = static_cast<long double>(n_minus_1) * diag.eq2_bound;
    const long double eq3_scaled = static_cast<long double>(n_minus_1) * n_minus_1 *
                                   static_cast<long double>(n_minus_1) *
                                   (static_cast<long double>(w) / (5.0L * k)) *
                                   std::log(static_cast<long double>(k) / params.delta);

    std::vector<std::vector<PromisingFailure>> block_failures(threads == 0 ? 1 : threads);

    parallel_blocks(n, threads, [&](std::size_t block, std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> count(n, 0);
        auto& failures = block_failures[block];
        for (std::size_t i = begin; i < end; ++i) {
            for (std::uint32_t j = 0; j < w; ++j)
                for (std::uint32_t s : index.bucket(j, set.pick(i, j))) count[s]++;

            std::uint64_t sum = 0;
            for (std::size_t s = 0; s < n; ++s)
                if (s != i) sum += count[s];

            std::uint64_t max_scaled_dev = 0;
            std::uint32_t max_ip = 0;
            unsigned __int128 sumsq_scaled = 0;
            for (std::size_t s = 0; s < n; ++s) {
                if (s == i) continue;
                const std::uint64_t scaled_ip = n_minus_1 * count[s];
                const std::uint64_t dev =
                    scaled_ip > sum ? scaled_ip - sum : sum - scaled_ip;
                if (dev > max_scaled_dev) max_scaled_dev = dev;
                if (count[s] > max_ip) max_ip = count[s];
                sumsq_scaled += static_cast<unsigned __int128>(dev) * dev;
            }

            for (std::uint32_t j = 0; j < w; ++j)
                for (std::uint32_t s : index.bucket(j, set.pick(i, j))) count[s] = 0;

            const std::uint64_t target = static_cast<std::uint64_t>(w) * n_minus_1;
            const std::uint64_t mean_scaled = 4ull * k * sum;
            const std::uint64_t eq1_dev =
                mean_scaled > target ? mean_scaled - target : target - mean_scaled;
            const bool eq1_ok = 25ull * eq1_dev < target;
            const bool eq2_ok = static_cast<long double>(max_scaled_dev) < eq2_scaled;
            const bool eq3_ok = u128_to_ld(sumsq_scaled) < eq3_scaled;

            auto& stats = diag.per_string[i];
            stats.mean = static_cast<double>(sum) / static_cast<double>(n_minus_1);
            stats.max_inner_product = max_ip;
            stats.max_deviation =
                static_cast<double>(max_scaled_dev) / static_cast<double>(n_minus_1);
            stats.squared_deviation_sum = static_cast<double>(
                u128_to_ld(sumsq_scaled) /
                (static_cast<long double>(n_minus_1) * static_cast<long double>(n_minus_1)));

            if (!eq1_ok) failures.push_back({i, 1});
            if (!eq2_ok) failures.push_back({i, 2});
            if (!eq3_ok) failures.push_back({i, 3});
        }
    });

    for (auto& block : block_failures)
        diag.failures.insert(diag.failures.end(), block.begin(), block.end());
    diag.promising = diag.failures.empty();
    set.set_verified(diag.promising);
    return diag;
}

std::uint32_t theoretical_weight(std::uint32_t max_degree, double delta) {
    if (max_degree < 1) throw std::invalid_argument("theoretical_weight: max_degree must be >= 1");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("theoretical_weight: delta must be in (0, 1)");
    const double k = static_cast<double>(max_degree);
    const double w = 20.0 * std::log(k / delta) * std::log(2.0 * k / (delta * delta));
    return static_cast<std::uint32_t>(std::ceil(w));
}

bool theoretical_weight_preconditions_hold(std::uint32_t max_degree, double delta) {
    if (!(delta > 0.0) || !(delta < 1.0)) return false;
    if (delta > 0.02) return false;
    const double k = static_cast<double>(max_degree);
    return k >= 6.0 * std::log(2.0 * k / (delta * delta));
}

CandidateSet extend_lcs(const CandidateSet& set, std::uint32_t repeat) {
    if (repeat < 1) throw std::invalid_argument("extend_lcs: repeat must be >= 1");
    const auto& params = set.params();
    const std::uint64_t new_weight = static_cast<std::uint64_t>(params.weight) * repeat;
    if (new_weight > 0xFFFFFFFFull) throw std::invalid_argument("extend_lcs: weight overflow");

    MaskingParams extended = params;
    extended.weight = static_cast<std::uint32_t>(new_weight);
    CandidateSet out(extended, set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::uint32_t r = 0; r < repeat; ++r)
            for (std::uint32_t j = 0; j < params.weight; ++j)
                out.set_pick(i, static_cast<std::size_t>(r) * params.weight + j, set.pick(i, j));
    out.set_verified(set.verified());
    return out;
}

void wilson_interval(std::uint64_t hits, std::uint64_t total, double& low, double& high) {
    if (total == 0) {
        low = 0.0;
        high = 1.0;
        return;
    }
    const double z = 1.959963984540054; // 95%
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    low = center - half;
    high = center + half;
    if (low < 0.0) low = 0.0;
    if (high > 1.0) high = 1.0;
}

LcsCheckResult monte_carlo_lcs_check(const CandidateSet& set, std::uint32_t m,
                                     std::uint64_t trials, std::uint64_t seed,
                                     unsigned threads) {
    const std::size_t n = set.size();
    if (n == 0) throw std::invalid_argument("monte_carlo_lcs_check: empty set");
    if (m < 1 || m > set.params().max_degree)
        throw std::invalid_argument("monte_carlo_lcs_check: m must be in [1, k]");
    if (trials < 1) throw std::invalid_argument("monte_carlo_lcs_check: trials must be >= 1");

    const std::uint32_t w = set.params().weight;
    const SegmentIndex index(set);

    const unsigned blocks = threads == 0 ? 1 : threads;
    std::vector<std::uint64_t> block_cond1(blocks, 0), block_cond2(blocks, 0),
        block_either(blocks, 0);

    parallel_blocks(trials, threads, [&](std::size_t block, std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> count(n, 0);
        std::vector<std::uint8_t> drawn_flag(n, 0);
        std::vector<std::uint32_t> drawn(m);
        for (std::size_t t = begin; t < end; ++t) {
            Rng rng(Rng::derive(seed, t));
            for (std::uint32_t i = 0; i < m; ++i)
                drawn[i] = static_cast<std::uint32_t>(rng.uniform_below(n));
            const std::uint32_t sampled = drawn[rng.uniform_below(m)];

            for (std::uint32_t i = 0; i < m; ++i) {
                const std::uint32_t di = drawn[i];
                for (std::uint32_t j = 0; j < w; ++j)
                    for (std::uint32_t s : index.bucket(j, set.pick(di, j))) count[s]++;
            }
            for (std::uint32_t i = 0; i < m; ++i) drawn_flag[drawn[i]] = 1;

            // condition (2): the multiset minus the sampled copy vs that string;
            // count[sampled] includes one w-term for the sampled copy itself.
            const std::uint64_t cond2_sum = count[sampled] - w;
            const bool cond2_bad = 2 * cond2_sum > w;

            // condition (1): every string outside T must see total overlap <= w/2.
            bool cond1_bad = false;
            for (std::size_t s = 0; s < n; ++s) {
                if (!drawn_flag[s] && 2ull * count[s] > w) {
                    cond1_bad = true;
                    break;
                }
            }

            for (std::uint32_t i = 0; i < m; ++i) {
                const std::uint32_t di = drawn[i];
                drawn_flag[di] = 0;
                for (std::uint32_t j = 0; j < w; ++j)
                    for (std::uint32_t s : index.bucket(j, set.pick(di, j))) count[s] = 0;
            }

            block_cond1[block] += cond1_bad;
            block_cond2[block] += cond2_bad;
            block_either[block] += cond1_bad || cond2_bad;
        }
    });

    LcsCheckResult result;
    result.m = m;
    result.trials = trials;
    for (unsigned b = 0; b < blocks; ++b) {
        result.cond1_violations += block_cond1[b];
        result.cond2_violations += block_cond2[b];
        result.violations += block_either[b];
    }
    result.violation_rate = static_cast<double>(result.violations) / static_cast<double>(trials);
    wilson_interval(result.violations, trials, result.wilson_low, result.wilson_high);
    return result;
}

} // namespace bmc
