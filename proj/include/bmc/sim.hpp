// Multi-sender multi-receiver scenario runner and the failure-rate
// experiments: one full-fidelity protocol round over the byte-level codec,
// plus the reduced-model schemes (RS success iff at most w/2 erasures, CRC
// with no false negatives) and the two interval random-access baselines.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bmc/masking.hpp"
#include "bmc/rs.hpp"
#include "bmc/segment_index.hpp"

namespace bmc {

enum class Scheme { bmc1, bmc2, rand_access1, rand_access2 };
const char* scheme_name(Scheme scheme);

struct Topology {
    std::size_t senders = 0;
    // receiver -> indices of its neighboring senders
    std::vector<std::vector<std::uint32_t>> receiver_neighbors;

    std::size_t receivers() const { return receiver_neighbors.size(); }
    std::uint32_t max_degree() const;
};

// Checks neighbor indices and the degree bound.
void validate(const Topology& topology, std::uint32_t max_degree);

struct RoundResult {
    std::vector<std::size_t> chosen_index; // per sender: its draw from the set
    std::vector<std::vector<std::vector<std::uint8_t>>> receiver_outputs;
    // per receiver, aligned with its neighbor list: 1 iff that sender's
    // payload appears among the receiver's outputs
    std::vector<std::vector<std::uint8_t>> delivered;
};

// One full protocol execution: every sender draws a string and encodes its
// payload; every receiver superimposes its neighbors' transmissions and
// decodes both phases over the byte-level codec.
RoundResult run_bmc_round(const Topology& topology, const CandidateSet& set,
                          std::span<const std::vector<std::uint8_t>> payloads,
                          const RsParams& params, std::uint64_t seed);

struct ExperimentConfig {
    std::uint32_t max_degree = 100;     // k
    std::uint32_t item_bytes = 100;     // d, CRC included
    double delta = 1e-4;
    std::size_t set_size = 0;           // |S|, echoed into results
    std::uint64_t airtime_budget = 100000; // t, bytes
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct ExperimentResult {
    Scheme scheme = Scheme::bmc1;
    std::uint32_t max_degree = 0;
    std::uint32_t item_bytes = 0;
    double delta = 0.0;
    std::size_t set_size = 0;
    std::uint64_t airtime_budget = 0;
    std::uint64_t trials = 0;
    std::uint64_t items_total = 0;
    std::uint64_t items_failed = 0;
    double failure_rate = 0.0;
    double ci_half_width = 0.0; // 95% Wilson half width
    std::uint64_t airtime_bytes = 0;
    double utilization = 0.0;
    std::uint64_t seed = 0;
};

struct TrialTally {
    std::uint64_t trials = 0;
    std::uint64_t items = 0;
    std::uint64_t failures = 0;
};

// Reduced-model single-receiver star with k senders. Trial outcomes depend
// only on (seed, trial index), so disjoint trial ranges compose and results
// are reproducible regardless of batching.
class Bmc1Runner {
public:
    Bmc1Runner(const ExperimentConfig& config, const CandidateSet& set);
    TrialTally run(std::uint64_t trial_begin, std::uint64_t trial_end) const;
    const ExperimentConfig& config() const { return config_; }

private:
    ExperimentConfig config_;
    const CandidateSet* set_;
    std::unique_ptr<SegmentIndex> index_;
};

ExperimentResult bmc1_failure_rate(const ExperimentConfig& config, const CandidateSet& set);

// BMC2 repeats the round floor(t / 9kd) times; its failure rate is computed
// as p^r from the BMC1 rate p, never simulated. Throws when r would be 0.
ExperimentResult bmc2_failure_rate(const ExperimentResult& bmc1, const ExperimentConfig& config);

TrialTally rand_access1_trials(const ExperimentConfig& config, std::uint64_t trial_begin,
                               std::uint64_t trial_end);
TrialTally rand_access2_trials(const ExperimentConfig& config, std::uint64_t trial_begin,
                               std::uint64_t trial_end);
ExperimentResult rand_access1(const ExperimentConfig& config);
ExperimentResult rand_access2(const ExperimentConfig& config);

// R = kd / airtime, byte for byte.
double medium_utilization(std::uint32_t max_degree, std::uint32_t item_bytes,
                          std::uint64_t airtime_bytes);

ExperimentResult finalize_result(Scheme scheme, const ExperimentConfig& config,
                                 const TrialTally& tally, std::uint64_t airtime_bytes);

} // namespace bmc
