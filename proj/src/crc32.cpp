#include "bmc/crc32.hpp"

#include <array>
#include <stdexcept>

namespace bmc {

namespace {

std::array<std::uint32_t, 256> make_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int bit = 0; bit < 8; ++bit)
            c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

const std::array<std::uint32_t, 256> crc_table = make_table();

} // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t byte : data) crc = crc_table[(crc ^ byte) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

DataItem crc_append(std::span<const std::uint8_t> payload) {
    DataItem item;
    item.payload.assign(payload.begin(), payload.end());
    item.crc = crc32(payload);
    return item;
}

bool crc_check(const DataItem& item) { return crc32(item.payload) == item.crc; }

std::vector<std::uint8_t> item_to_bytes(const DataItem& item) {
    std::vector<std::uint8_t> bytes = item.payload;
    bytes.push_back(static_cast<std::uint8_t>(item.crc >> 24));
    bytes.push_back(static_cast<std::uint8_t>(item.crc >> 16));
    bytes.push_back(static_cast<std::uint8_t>(item.crc >> 8));
    bytes.push_back(static_cast<std::uint8_t>(item.crc));
    return bytes;
}

DataItem item_from_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4) throw std::invalid_argument("item_from_bytes: too short");
    DataItem item;
    item.payload.assign(bytes.begin(), bytes.end() - 4);
    const std::size_t n = bytes.size();
    item.crc = (static_cast<std::uint32_t>(bytes[n - 4]) << 24) |
               (static_cast<std::uint32_t>(bytes[n - 3]) << 16) |
               (static_cast<std::uint32_t>(bytes[n - 2]) << 8) |
               static_cast<std::uint32_t>(bytes[n - 1]);
    return item;
}

} // namespace bmc
