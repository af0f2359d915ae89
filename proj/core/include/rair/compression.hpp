#pragma once

// Compression-based regularity reward: the negative compressed length of a
// canonical byte serialization of the direct symbol multiset.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rair/reward.hpp"

namespace rair {

class Compressor {
 public:
  virtual ~Compressor() = default;
  virtual std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input) const = 0;
  virtual std::string name() const = 0;
};

// Stride-delta transform followed by byte run-length coding, with run lengths
// written as Elias-gamma codes. Each run costs 8 bits for the byte plus the
// gamma code of its length. A stride equal to the record width turns repeated
// records into runs of zero bytes.
class RunLengthGammaCompressor final : public Compressor {
 public:
  explicit RunLengthGammaCompressor(std::size_t stride = 5);

  std::vector<std::uint8_t> compress(std::span<const std::uint8_t> input) const override;
  std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> packed) const;
  std::string name() const override;

 private:
  std::size_t stride_;
};

// Canonical form: symbols sorted by (tag, values), each repeated by its
// multiplicity, written as one tag byte followed by each value as a 4-byte
// little-endian two's-complement integer.
std::vector<std::uint8_t> serialize_symbols(const SymbolHistogram& h);

std::int64_t compression_reward(std::span<const EntityView> entities, const PhiSpec& spec,
                                const Compressor& compressor);

}  // namespace rair
