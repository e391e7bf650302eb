// Standard CRC-32 (polynomial 0x04C11DB7 reflected, init and final xor
// 0xFFFFFFFF) and the data-item framing built on it. An item is the payload
// followed by its CRC in big-endian byte order; the item length d therefore
// counts payload bytes plus four.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bmc {

std::uint32_t crc32(std::span<const std::uint8_t> data);

struct DataItem {
    std::vector<std::uint8_t> payload;
    std::uint32_t crc = 0;

    std::size_t item_bytes() const { return payload.size() + 4; }
};

DataItem crc_append(std::span<const std::uint8_t> payload);
bool crc_check(const DataItem& item);

std::vector<std::uint8_t> item_to_bytes(const DataItem& item);
// Throws when fewer than 4 bytes are supplied.
DataItem item_from_bytes(std::span<const std::uint8_t> bytes);

} // namespace bmc
