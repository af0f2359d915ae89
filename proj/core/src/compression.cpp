#include "rair/compression.hpp"

#include "rair/error.hpp"

namespace rair {

namespace {

class BitWriter {
 public:
  void put(bool bit) {
    if (nbits_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() = static_cast<std::uint8_t>(bytes_.back() | (0x80u >> (nbits_ % 8)));
    ++nbits_;
  }
  void put_bits(std::uint64_t value, int count) {
    for (int i = count - 1; i >= 0; --i) put(((value >> i) & 1u) != 0);
  }
  void put_gamma(std::uint64_t n) {
    // n >= 1: floor(log2 n) zeros, then n in binary
    int len = 0;
    while ((n >> (len + 1)) != 0) ++len;
    for (int i = 0; i < len; ++i) put(false);
    put_bits(n, len + 1);
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t nbits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::size_t remaining() const { return bytes_.size() * 8 - pos_; }
  bool get() {
    const bool bit = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
    ++pos_;
    return bit;
  }
  std::uint64_t get_bits(int count) {
    std::uint64_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | (get() ? 1u : 0u);
    return v;
  }
  std::uint64_t get_gamma() {
    int zeros = 0;
    while (!get()) {
      if (++zeros > 63 || remaining() == 0) throw Error("corrupt gamma code");
    }
    if (remaining() < static_cast<std::size_t>(zeros)) throw Error("corrupt gamma code");
    return (std::uint64_t{1} << zeros) | get_bits(zeros);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

RunLengthGammaCompressor::RunLengthGammaCompressor(std::size_t stride) : stride_(stride) {
  if (stride_ == 0) throw Error("compressor stride must be positive");
}

std::string RunLengthGammaCompressor::name() const { return "rle-gamma/stride=" + std::to_string(stride_); }

std::vector<std::uint8_t> RunLengthGammaCompressor::compress(std::span<const std::uint8_t> input) const {
  std::vector<std::uint8_t> delta(input.begin(), input.end());
  for (std::size_t i = delta.size(); i-- > stride_;) {
    delta[i] = static_cast<std::uint8_t>(input[i] - input[i - stride_]);
  }
  BitWriter out;
  std::size_t i = 0;
  while (i < delta.size()) {
    std::size_t j = i + 1;
    while (j < delta.size() && delta[j] == delta[i]) ++j;
    out.put_bits(delta[i], 8);
    out.put_gamma(j - i);
    i = j;
  }
  return out.take();
}

std::vector<std::uint8_t> RunLengthGammaCompressor::decompress(std::span<const std::uint8_t> packed) const {
  BitReader in(packed);
  std::vector<std::uint8_t> out;
  // A run needs at least 9 bits; padding is at most 7.
  while (in.remaining() >= 9) {
    const auto byte = static_cast<std::uint8_t>(in.get_bits(8));
    const std::uint64_t run = in.get_gamma();
    out.insert(out.end(), run, byte);
  }
  for (std::size_t i = stride_; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(out[i] + out[i - stride_]);
  }
  return out;
}

std::vector<std::uint8_t> serialize_symbols(const SymbolHistogram& h) {
  std::vector<std::uint8_t> bytes;
  for (const auto& [sym, m] : h.entries()) {
    for (std::uint64_t r = 0; r < m; ++r) {
      bytes.push_back(sym.tag);
      for (std::uint8_t k = 0; k < sym.width; ++k) {
        const auto u = static_cast<std::uint32_t>(sym.values[k]);
        for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<std::uint8_t>((u >> (8 * b)) & 0xFFu));
      }
    }
  }
  return bytes;
}

std::int64_t compression_reward(std::span<const EntityView> entities, const PhiSpec& spec,
                                const Compressor& compressor) {
  if (spec.variant != PhiVariant::Direct) throw Error("compression reward needs the direct variant");
  const SymbolHistogram h = build_multiset_direct(entities, spec);
  const std::vector<std::uint8_t> packed = compressor.compress(serialize_symbols(h));
  return -static_cast<std::int64_t>(packed.size());
}

}  // namespace rair
