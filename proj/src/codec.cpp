#include "bmc/codec.hpp"

#include <stdexcept>

#include "bmc/channel.hpp"
#include "bmc/parallel.hpp"
#include "bmc/rng.hpp"

namespace bmc {

MaskingDraw encode_masking(const CandidateSet& set, std::uint64_t seed) {
    if (set.size() == 0) throw std::invalid_argument("encode_masking: empty set");
    Rng rng(seed);
    const std::size_t index = rng.uniform_below(set.size());
    return {index, set.string_at(index)};
}

std::vector<std::size_t> decode_masking(const Phase1Observation& observation,
                                        const CandidateSet& set, unsigned threads) {
    const auto& params = set.params();
    if (!(observation.params == params) || observation.slots.size() != params.total_slots())
        throw std::invalid_argument("decode_masking: observation length mismatch");

    const std::uint32_t w = params.weight;
    const unsigned blocks = threads == 0 ? 1 : threads;
    std::vector<std::vector<std::size_t>> found(blocks);

    parallel_blocks(set.size(), threads, [&](std::size_t block, std::size_t begin,
                                             std::size_t end) {
        auto& out = found[block];
        for (std::size_t i = begin; i < end; ++i) {
            std::uint32_t matches = 0;
            std::uint64_t slot_base = 0;
            for (std::uint32_t j = 0; j < w; ++j) {
                matches += observation.slots.test(slot_base + set.pick(i, j));
                slot_base += params.segment_bits();
            }
            if (4ull * matches >= 3ull * w) out.push_back(i);
        }
    });

    std::vector<std::size_t> result;
    for (auto& block : found) result.insert(result.end(), block.begin(), block.end());
    return result;
}

Phase2Codeword encode_data(std::span<const std::uint8_t> payload,
                           const MaskingString& mask, const RsParams& params) {
    if (params.codeword_symbols != mask.params.weight)
        throw std::invalid_argument("encode_data: RS codeword length does not match weight");
    const DataItem item = crc_append(payload);
    const std::vector<std::uint8_t> bytes = item_to_bytes(item);
    if (bytes.size() > params.message_bytes())
        throw std::invalid_argument("encode_data: payload too long for RS parameters");
    return {mask, rs_encode(bytes, params)};
}

std::vector<std::vector<std::uint8_t>> decode_data(
    const Phase2Observation& observation, const CandidateSet& set,
    std::span<const std::size_t> decoded_indices, const RsParams& params,
    std::uint32_t item_bytes) {
    const auto& mask_params = set.params();
    if (!(observation.params == mask_params) ||
        observation.state.size() != mask_params.total_slots())
        throw std::invalid_argument("decode_data: observation length mismatch");
    if (params.codeword_symbols != mask_params.weight)
        throw std::invalid_argument("decode_data: RS codeword length does not match weight");
    if (item_bytes < 4 || item_bytes > params.message_bytes())
        throw std::invalid_argument("decode_data: bad item size");

    const std::uint32_t w = mask_params.weight;
    const std::size_t t_count = decoded_indices.size();

    // exclusive[i*w + j]: no other decoded string shares string i's slot in
    // segment j
    std::vector<std::uint8_t> exclusive(t_count * w, 0);
    std::vector<std::uint16_t> seg_count(mask_params.segment_bits(), 0);
    std::vector<std::uint32_t> touched;
    for (std::uint32_t j = 0; j < w; ++j) {
        touched.clear();
        for (std::size_t i = 0; i < t_count; ++i) {
            const std::uint32_t p = set.pick(decoded_indices[i], j);
            if (seg_count[p]++ == 0) touched.push_back(p);
        }
        for (std::size_t i = 0; i < t_count; ++i) {
            const std::uint32_t p = set.pick(decoded_indices[i], j);
            exclusive[i * w + j] = seg_count[p] == 1;
        }
        for (std::uint32_t p : touched) seg_count[p] = 0;
    }

    std::vector<std::vector<std::uint8_t>> outputs;
    std::vector<RsReceived> received(w);
    for (std::size_t i = 0; i < t_count; ++i) {
        for (std::uint32_t j = 0; j < w; ++j) {
            if (exclusive[i * w + j]) {
                const std::uint64_t slot =
                    slot_of(mask_params, j, set.pick(decoded_indices[i], j));
                received[j] = {observation.value[slot], false};
            } else {
                received[j] = {0, true};
            }
        }
        auto message = rs_erasure_decode(received, params);
        if (!message) continue;
        DataItem item = item_from_bytes({message->data(), item_bytes});
        if (crc_check(item)) outputs.push_back(std::move(item.payload));
    }
    return outputs;
}

AirtimeBreakdown bmc_airtime(std::uint32_t max_degree, std::uint32_t item_bytes) {
    const WuChoice wu = choose_wu(item_bytes);
    AirtimeBreakdown airtime;
    const std::uint64_t kw = static_cast<std::uint64_t>(max_degree) * wu.w;
    airtime.phase1_bytes = kw / 2; // 4kw bits
    airtime.phase2_bytes = 4 * kw * wu.u;
    airtime.total_bytes = airtime.phase1_bytes + airtime.phase2_bytes;
    return airtime;
}

} // namespace bmc
