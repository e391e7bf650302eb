#include "bmc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "bmc/channel.hpp"
#include "bmc/codec.hpp"
#include "bmc/rng.hpp"

namespace bmc {

const char* scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::bmc1: return "BMC1";
        case Scheme::bmc2: return "BMC2";
        case Scheme::rand_access1: return "RandAccess1";
        case Scheme::rand_access2: return "RandAccess2";
    }
    return "?";
}

std::uint32_t Topology::max_degree() const {
    std::size_t degree = 0;
    for (const auto& neighbors : receiver_neighbors)
        degree = std::max(degree, neighbors.size());
    return static_cast<std::uint32_t>(degree);
}

void validate(const Topology& topology, std::uint32_t max_degree) {
    for (const auto& neighbors : topology.receiver_neighbors)
        for (std::uint32_t s : neighbors)
            if (s >= topology.senders)
                throw std::invalid_argument("topology: neighbor index out of range");
    if (topology.max_degree() > max_degree)
        throw std::invalid_argument("topology: receiver degree exceeds k");
}

RoundResult run_bmc_round(const Topology& topology, const CandidateSet& set,
                          std::span<const std::vector<std::uint8_t>> payloads,
                          const RsParams& params, std::uint64_t seed) {
    validate(topology, set.params().max_degree);
    if (payloads.size() != topology.senders)
        throw std::invalid_argument("run_bmc_round: one payload per sender required");
    for (const auto& p : payloads)
        if (p.size() != payloads[0].size())
            throw std::invalid_argument("run_bmc_round: payload sizes differ");
    const std::uint32_t item_bytes = static_cast<std::uint32_t>(payloads[0].size() + 4);

    RoundResult result;
    result.chosen_index.resize(topology.senders);
    std::vector<Phase1Codeword> phase1(topology.senders);
    std::vector<Phase2Codeword> phase2(topology.senders);
    for (std::size_t s = 0; s < topology.senders; ++s) {
        MaskingDraw draw = encode_masking(set, Rng::derive(seed, s));
        result.chosen_index[s] = draw.index;
        phase2[s] = encode_data(payloads[s], draw.mask, params);
        phase1[s] = std::move(draw.mask);
    }

    result.receiver_outputs.resize(topology.receivers());
    result.delivered.resize(topology.receivers());
    for (std::size_t r = 0; r < topology.receivers(); ++r) {
        const auto& neighbors = topology.receiver_neighbors[r];
        std::vector<Phase1Codeword> heard1;
        std::vector<Phase2Codeword> heard2;
        heard1.reserve(neighbors.size());
        heard2.reserve(neighbors.size());
        for (std::uint32_t s : neighbors) {
            heard1.push_back(phase1[s]);
            heard2.push_back(phase2[s]);
        }
        const Phase1Observation obs1 = superimpose_phase1(set.params(), heard1);
        const std::vector<std::size_t> decoded = decode_masking(obs1, set);
        const Phase2Observation obs2 = superimpose_phase2(set.params(), params, heard2);
        auto outputs = decode_data(obs2, set, decoded, params, item_bytes);

        auto& delivered = result.delivered[r];
        delivered.assign(neighbors.size(), 0);
        for (std::size_t p = 0; p < neighbors.size(); ++p) {
            const auto& want = payloads[neighbors[p]];
            for (const auto& out : outputs)
                if (out == want) {
                    delivered[p] = 1;
                    break;
                }
        }
        result.receiver_outputs[r] = std::move(outputs);
    }
    return result;
}

Bmc1Runner::Bmc1Runner(const ExperimentConfig& config, const CandidateSet& set)
    : config_(config), set_(&set) {
    const WuChoice wu = choose_wu(config.item_bytes);
    if (set.params().weight != wu.w)
        throw std::invalid_argument("bmc1: set weight does not match choose_wu(d)");
    if (set.params().max_degree != config.max_degree)
        throw std::invalid_argument("bmc1: set degree bound does not match config");
    const AirtimeBreakdown airtime = bmc_airtime(config.max_degree, config.item_bytes);
    if (airtime.total_bytes > config.airtime_budget)
        throw std::invalid_argument("bmc1: airtime budget exceeded");
    index_ = std::make_unique<SegmentIndex>(set);
}

TrialTally Bmc1Runner::run(std::uint64_t trial_begin, std::uint64_t trial_end) const {
    const CandidateSet& set = *set_;
    const std::uint32_t k = config_.max_degree;
    const std::uint32_t w = set.params().weight;
    const std::uint32_t segment_bits = set.params().segment_bits();
    const std::size_t n = set.size();
    const std::uint32_t decode_threshold = (3 * w + 3) / 4; // matches 4c >= 3w

    std::vector<std::uint16_t> count(n, 0);
    std::vector<std::uint32_t> drawn(k);
    std::vector<std::uint32_t> sorted_drawn(k);
    std::vector<std::uint32_t> decoded;                   // T, by crossing the threshold
    std::vector<std::uint32_t> seg_picks;                 // distinct picks in one segment
    std::vector<std::uint16_t> seg_count(segment_bits, 0);
    std::vector<std::uint32_t> erased(k);

    TrialTally tally;
    for (std::uint64_t trial = trial_begin; trial < trial_end; ++trial) {
        Rng rng(Rng::derive(config_.seed, trial));
        for (std::uint32_t i = 0; i < k; ++i)
            drawn[i] = static_cast<std::uint32_t>(rng.uniform_below(n));

        // Phase 1 decode: count[s] accumulates s's overlap with the OR of
        // the drawn strings; a string enters T when it crosses 3w/4.
        decoded.clear();
        for (std::uint32_t j = 0; j < w; ++j) {
            seg_picks.clear();
            for (std::uint32_t i = 0; i < k; ++i) {
                const std::uint32_t p = set.pick(drawn[i], j);
                if (seg_count[p]++ == 0) seg_picks.push_back(p);
            }
            for (std::uint32_t p : seg_picks) {
                seg_count[p] = 0;
                for (std::uint32_t s : index_->bucket(j, p))
                    if (++count[s] == decode_threshold) decoded.push_back(s);
            }
        }
        std::sort(decoded.begin(), decoded.end());

        // Erasures per decoded-string slot: a sender's symbol survives only
        // where no other member of T shares the slot.
        std::fill(erased.begin(), erased.end(), 0);
        for (std::uint32_t j = 0; j < w; ++j) {
            seg_picks.clear();
            for (std::uint32_t t : decoded) {
                const std::uint32_t p = set.pick(t, j);
                if (seg_count[p]++ == 0) seg_picks.push_back(p);
            }
            for (std::uint32_t i = 0; i < k; ++i)
                if (seg_count[set.pick(drawn[i], j)] >= 2) erased[i]++;
            for (std::uint32_t p : seg_picks) seg_count[p] = 0;
        }

        sorted_drawn.assign(drawn.begin(), drawn.end());
        std::sort(sorted_drawn.begin(), sorted_drawn.end());
        for (std::uint32_t i = 0; i < k; ++i) {
            const std::uint32_t di = drawn[i];
            const bool duplicate_draw =
                std::count(sorted_drawn.begin(), sorted_drawn.end(), di) > 1;
            const bool in_t = std::binary_search(decoded.begin(), decoded.end(), di);
            const bool rs_ok = 2ull * erased[i] <= w;
            if (duplicate_draw || !in_t || !rs_ok) tally.failures++;
        }
        tally.items += k;
        tally.trials++;

        std::memset(count.data(), 0, count.size() * sizeof(count[0]));
    }
    return tally;
}

ExperimentResult finalize_result(Scheme scheme, const ExperimentConfig& config,
                                 const TrialTally& tally, std::uint64_t airtime_bytes) {
    ExperimentResult result;
    result.scheme = scheme;
    result.max_degree = config.max_degree;
    result.item_bytes = config.item_bytes;
    result.delta = config.delta;
    result.set_size = config.set_size;
    result.airtime_budget = config.airtime_budget;
    result.trials = tally.trials;
    result.items_total = tally.items;
    result.items_failed = tally.failures;
    result.failure_rate =
        tally.items == 0 ? 1.0
                         : static_cast<double>(tally.failures) / static_cast<double>(tally.items);
    double low = 0.0, high = 1.0;
    wilson_interval(tally.failures, tally.items, low, high);
    result.ci_half_width = (high - low) / 2.0;
    result.airtime_bytes = airtime_bytes;
    result.utilization = airtime_bytes == 0
                             ? 0.0
                             : medium_utilization(config.max_degree, config.item_bytes,
                                                  airtime_bytes);
    result.seed = config.seed;
    return result;
}

ExperimentResult bmc1_failure_rate(const ExperimentConfig& config, const CandidateSet& set) {
    Bmc1Runner runner(config, set);
    const TrialTally tally = runner.run(0, config.trials);
    const AirtimeBreakdown airtime = bmc_airtime(config.max_degree, config.item_bytes);
    return finalize_result(Scheme::bmc1, config, tally, airtime.total_bytes);
}

ExperimentResult bmc2_failure_rate(const ExperimentResult& bmc1,
                                   const ExperimentConfig& config) {
    const std::uint64_t per_round = 9ull * config.max_degree * config.item_bytes;
    const std::uint64_t repeats = config.airtime_budget / per_round;
    if (repeats == 0)
        throw std::invalid_argument("bmc2: airtime budget below one 9kd round");
    if (bmc1.scheme != Scheme::bmc1 || bmc1.max_degree != config.max_degree ||
        bmc1.item_bytes != config.item_bytes)
        throw std::invalid_argument("bmc2: mismatched BMC1 result");

    ExperimentResult result = bmc1;
    result.scheme = Scheme::bmc2;
    result.failure_rate = std::pow(bmc1.failure_rate, static_cast<double>(repeats));
    double low = 0.0, high = 1.0;
    wilson_interval(bmc1.items_failed, bmc1.items_total, low, high);
    result.ci_half_width = (std::pow(high, static_cast<double>(repeats)) -
                            std::pow(low, static_cast<double>(repeats))) /
                           2.0;
    result.airtime_bytes = repeats * bmc1.airtime_bytes;
    result.utilization =
        medium_utilization(config.max_degree, config.item_bytes, result.airtime_bytes);
    return result;
}

TrialTally rand_access1_trials(const ExperimentConfig& config, std::uint64_t trial_begin,
                               std::uint64_t trial_end) {
    const std::uint32_t k = config.max_degree;
    const std::uint64_t intervals = config.airtime_budget / config.item_bytes;

    std::vector<std::uint8_t> delivered(k, 0);
    TrialTally tally;
    for (std::uint64_t trial = trial_begin; trial < trial_end; ++trial) {
        Rng rng(Rng::derive(config.seed, trial));
        std::fill(delivered.begin(), delivered.end(), 0);
        for (std::uint64_t interval = 0; interval < intervals; ++interval) {
            std::uint32_t transmitters = 0;
            std::uint32_t sole = 0;
            for (std::uint32_t s = 0; s < k; ++s) {
                if (rng.uniform_below(k) == 0) { // exactly probability 1/k
                    transmitters++;
                    sole = s;
                }
            }
            if (transmitters == 1) delivered[sole] = 1;
        }
        for (std::uint32_t s = 0; s < k; ++s)
            if (!delivered[s]) tally.failures++;
        tally.items += k;
        tally.trials++;
    }
    return tally;
}

TrialTally rand_access2_trials(const ExperimentConfig& config, std::uint64_t trial_begin,
                               std::uint64_t trial_end) {
    const std::uint32_t k = config.max_degree;
    const std::uint64_t intervals = config.airtime_budget / config.item_bytes;
    const std::uint64_t picks_per_sender =
        intervals >= k ? intervals / k : (intervals >= 1 ? 1 : 0);

    TrialTally tally;
    if (intervals == 0 || picks_per_sender == 0) {
        tally.trials = trial_end - trial_begin;
        tally.items = tally.trials * k;
        tally.failures = tally.items;
        return tally;
    }

    std::vector<std::uint32_t> pool(intervals);
    std::vector<std::uint16_t> occupancy(intervals, 0);
    std::vector<std::uint32_t> picks(static_cast<std::size_t>(k) * picks_per_sender);
    for (std::uint64_t trial = trial_begin; trial < trial_end; ++trial) {
        Rng rng(Rng::derive(config.seed, trial));
        std::fill(occupancy.begin(), occupancy.end(), 0);
        for (std::uint32_t s = 0; s < k; ++s) {
            std::iota(pool.begin(), pool.end(), 0u);
            for (std::uint64_t p = 0; p < picks_per_sender; ++p) {
                const std::uint64_t r = p + rng.uniform_below(intervals - p);
                std::swap(pool[p], pool[r]);
                const std::uint32_t interval = pool[p];
                picks[s * picks_per_sender + p] = interval;
                occupancy[interval]++;
            }
        }
        for (std::uint32_t s = 0; s < k; ++s) {
            bool sole = false;
            for (std::uint64_t p = 0; p < picks_per_sender && !sole; ++p)
                sole = occupancy[picks[s * picks_per_sender + p]] == 1;
            if (!sole) tally.failures++;
        }
        tally.items += k;
        tally.trials++;
    }
    return tally;
}

ExperimentResult rand_access1(const ExperimentConfig& config) {
    const TrialTally tally = rand_access1_trials(config, 0, config.trials);
    ExperimentResult result =
        finalize_result(Scheme::rand_access1, config, tally, config.airtime_budget);
    return result;
}

ExperimentResult rand_access2(const ExperimentConfig& config) {
    const TrialTally tally = rand_access2_trials(config, 0, config.trials);
    ExperimentResult result =
        finalize_result(Scheme::rand_access2, config, tally, config.airtime_budget);
    return result;
}

double medium_utilization(std::uint32_t max_degree, std::uint32_t item_bytes,
                          std::uint64_t airtime_bytes) {
    if (airtime_bytes == 0) throw std::invalid_argument("medium_utilization: zero airtime");
    return static_cast<double>(static_cast<std::uint64_t>(max_degree) * item_bytes) /
           static_cast<double>(airtime_bytes);
}

} // namespace bmc
