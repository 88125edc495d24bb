#pragma once

/// Little-endian binary encoding of a sketch:
///
///   "MPRS" | version:u8 | p:u64 | q:u64 | k:u8 | subtable_size:u32 |
///   b_key:u8 | b_hash:u8 | ids_width:u16 | position_seed:u64 |
///   checksum_seed:u64 | m cells
///
/// Each cell is count:u64, b_key digits:u64, b_hash digits:u64, then
/// ceil(ids_width / 8) bytes of parity bits. Poisoned parity bits are not
/// representable, so such sketches are written with ids_width = 0.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mprecon/error.hpp"
#include "mprecon/sketch.hpp"

namespace mprecon {

inline constexpr std::uint8_t kWireVersion = 1;

namespace detail {

class ByteWriter {
 public:
  template <class T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > in_.size()) raise(Errc::malformed_wire, "truncated sketch");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const Sketch& s) {
  detail::ByteWriter w;
  for (char c : std::string_view("MPRS")) w.put<std::uint8_t>(static_cast<std::uint8_t>(c));
  const auto& f = s.params();
  const auto& cfg = s.hash_config();
  const std::size_t ids_width = s.ids_poisoned() ? 0 : s.ids_width();
  w.put<std::uint8_t>(kWireVersion);
  w.put<std::uint64_t>(f.p());
  w.put<std::uint64_t>(f.q());
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.k));
  w.put<std::uint32_t>(cfg.subtable_size);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(f.key_width()));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(f.hash_width()));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(ids_width));
  w.put<std::uint64_t>(cfg.position_seed);
  w.put<std::uint64_t>(cfg.checksum_seed);
  const std::size_t id_bytes = (ids_width + 7) / 8;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::uint64_t d : s.cell_words(i)) w.put<std::uint64_t>(d);
    auto bits = s.ids(i);
    for (std::size_t b = 0; b < id_bytes; ++b) w.put<std::uint8_t>(static_cast<std::uint8_t>(bits[b / 8] >> (8 * (b % 8))));
  }
  return w.take();
}

inline Sketch deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  std::string magic;
  for (int i = 0; i < 4; ++i) magic.push_back(static_cast<char>(r.get<std::uint8_t>()));
  if (magic != "MPRS") raise(Errc::malformed_wire, "bad magic");
  if (r.get<std::uint8_t>() != kWireVersion) raise(Errc::malformed_wire, "unsupported version");
  const auto p = r.get<std::uint64_t>();
  const auto q = r.get<std::uint64_t>();
  HashConfig cfg;
  cfg.k = r.get<std::uint8_t>();
  cfg.subtable_size = r.get<std::uint32_t>();
  const unsigned b_key = r.get<std::uint8_t>();
  const unsigned b_hash = r.get<std::uint8_t>();
  const std::size_t ids_width = r.get<std::uint16_t>();
  cfg.position_seed = r.get<std::uint64_t>();
  cfg.checksum_seed = r.get<std::uint64_t>();
  cfg.q = q;
  FieldParams f(p, q);
  if (b_key != f.key_width() || b_hash != f.hash_width()) raise(Errc::malformed_wire, "digit widths disagree with p and q");
  Sketch s(f, cfg, ids_width);
  const std::size_t id_bytes = (ids_width + 7) / 8;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (auto& d : s.cell_words(i)) {
      d = r.get<std::uint64_t>();
      if (d >= p) raise(Errc::malformed_wire, "digit not reduced mod p");
    }
    auto bits = s.ids(i);
    for (std::size_t b = 0; b < id_bytes; ++b) bits[b / 8] |= std::uint64_t{r.get<std::uint8_t>()} << (8 * (b % 8));
    if (ids_width % 64 != 0 && (bits.back() >> (ids_width % 64)) != 0) {
      raise(Errc::malformed_wire, "parity bits set beyond ids_width");
    }
  }
  if (!r.done()) raise(Errc::malformed_wire, "trailing bytes");
  return s;
}

}  // namespace mprecon
