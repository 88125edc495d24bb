#pragma once

/// Invertible Bloom lookup table over (F_p)^b.
///
/// Each cell holds a count, a key_sum vector of key_width digits, a hash_sum
/// vector of hash_width digits, and optionally a parity bitset with one bit
/// per party. Cells are stored contiguously as
///   [count | key_sum... | hash_sum...]
/// so combination and scaling are single passes over one word array.
///
/// The table is a linear object: inserting x with coefficient c adds
/// c * (1, enc(x), enc(H(x))) to each of x's k cells, so the sketch of
/// c1*S1 + c2*S2 is the same linear combination of the two sketches.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mprecon/error.hpp"
#include "mprecon/field.hpp"
#include "mprecon/hashing.hpp"

namespace mprecon {

/// Value copy of one cell, mostly for inspection and tests.
struct Cell {
  std::uint64_t count = 0;
  FVector key_sum;
  FVector hash_sum;
  std::vector<std::uint64_t> ids;

  friend bool operator==(const Cell&, const Cell&) = default;
};

class Sketch {
 public:
  Sketch(FieldParams params, HashConfig cfg, std::size_t ids_width = 0)
      : params_(params), cfg_(cfg), ids_width_(ids_width) {
    cfg_.validate();
    if (cfg_.q != params_.q()) raise(Errc::config_mismatch, "hash config q differs from field q");
    stride_ = 1 + params_.key_width() + params_.hash_width();
    ids_words_ = (ids_width_ + 63) / 64;
    words_.assign(size() * stride_, 0);
    ids_.assign(size() * ids_words_, 0);
  }

  const FieldParams& params() const noexcept { return params_; }
  const HashConfig& hash_config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return cfg_.table_size(); }
  std::size_t ids_width() const noexcept { return ids_width_; }
  /// Parity bits no longer mean anything after a non-unit scaling.
  bool ids_poisoned() const noexcept { return ids_poisoned_; }
  std::size_t stride() const noexcept { return stride_; }
  std::size_t ids_words() const noexcept { return ids_words_; }

  std::uint64_t count(std::size_t i) const { return words_[i * stride_]; }
  std::span<const std::uint64_t> key_sum(std::size_t i) const {
    return {words_.data() + i * stride_ + 1, params_.key_width()};
  }
  std::span<const std::uint64_t> hash_sum(std::size_t i) const {
    return {words_.data() + i * stride_ + 1 + params_.key_width(), params_.hash_width()};
  }
  std::span<const std::uint64_t> ids(std::size_t i) const { return {ids_.data() + i * ids_words_, ids_words_}; }
  /// The whole cell, count first.
  std::span<const std::uint64_t> cell_words(std::size_t i) const { return {words_.data() + i * stride_, stride_}; }
  std::span<std::uint64_t> cell_words(std::size_t i) { return {words_.data() + i * stride_, stride_}; }
  std::span<std::uint64_t> ids(std::size_t i) { return {ids_.data() + i * ids_words_, ids_words_}; }

  Cell cell(std::size_t i) const {
    return Cell{count(i), FVector(key_sum(i).begin(), key_sum(i).end()),
                FVector(hash_sum(i).begin(), hash_sum(i).end()),
                std::vector<std::uint64_t>(ids(i).begin(), ids(i).end())};
  }

  /// True when the field part (count, key_sum, hash_sum) of cell i is zero.
  bool cell_is_zero(std::size_t i) const {
    auto w = cell_words(i);
    return std::all_of(w.begin(), w.end(), [](std::uint64_t x) { return x == 0; });
  }
  /// Field part of every cell is zero. Parity bits are not considered.
  bool is_zero() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t x) { return x == 0; });
  }

  /// True when both sketches can be combined cell-for-cell.
  bool compatible(const Sketch& o) const {
    return params_ == o.params_ && cfg_ == o.cfg_ && ids_width_ == o.ids_width_;
  }

  /// Adds coeff * x to the key's k cells. With a party index the party's
  /// parity bit toggles once per call, whatever the coefficient.
  void insert(std::uint64_t key, Scalar coeff, std::optional<std::size_t> party = std::nullopt) {
    if (party && *party >= ids_width_) {
      raise(Errc::invalid_party, "party " + std::to_string(*party) + " outside ids width " + std::to_string(ids_width_));
    }
    const std::uint64_t c = params_.reduce(coeff.value);
    const FVector enc = encoded_entry(key);
    for (unsigned i = 0; i < cfg_.k; ++i) {
      const std::size_t pos = std::size_t{i} * cfg_.subtable_size + subtable_offset(key, i, cfg_);
      axpy(cell_words(pos), c, enc, params_);
      if (party) ids(pos)[*party / 64] ^= std::uint64_t{1} << (*party % 64);
    }
  }

  /// (1, enc(x), enc(H(x))) laid out like one cell.
  FVector encoded_entry(std::uint64_t key) const {
    FVector enc;
    enc.reserve(stride_);
    enc.push_back(1);
    const FVector k = encode_value(key, params_.key_width(), params_);
    const FVector h = encode_value(checksum(key, cfg_), params_.hash_width(), params_);
    enc.insert(enc.end(), k.begin(), k.end());
    enc.insert(enc.end(), h.begin(), h.end());
    return enc;
  }

  Sketch& operator+=(const Sketch& o) {
    require_compatible(o);
    add_into(words_, o.words_, params_);
    for (std::size_t i = 0; i < ids_.size(); ++i) ids_[i] ^= o.ids_[i];
    ids_poisoned_ = ids_poisoned_ || o.ids_poisoned_;
    return *this;
  }

  /// this += c * o. Poisons the parity bits unless c == 1.
  void add_scaled(const Sketch& o, Scalar c) {
    require_compatible(o);
    const std::uint64_t cv = params_.reduce(c.value);
    if (cv == 1) {
      *this += o;
      return;
    }
    axpy(words_, cv, o.words_, params_);
    poison_ids();
  }

  /// this += c * o restricted to the listed cells (o must be zero elsewhere).
  void add_scaled_cells(const Sketch& o, Scalar c, std::span<const std::size_t> cells) {
    require_compatible(o);
    const std::uint64_t cv = params_.reduce(c.value);
    for (std::size_t i : cells) axpy(cell_words(i), cv, o.cell_words(i), params_);
    if (cv != 1) {
      poison_ids();
    } else {
      for (std::size_t i : cells) {
        for (std::size_t w = 0; w < ids_words_; ++w) ids(i)[w] ^= o.ids(i)[w];
      }
    }
  }

  void scale_by(Scalar c) {
    scale_in_place(words_, params_.reduce(c.value), params_);
    poison_ids();
  }

  /// Indices of cells whose field part is nonzero.
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!cell_is_zero(i)) out.push_back(i);
    }
    return out;
  }

  /// Peeling test for cell i: treat it as holding `multiplicity` copies of a
  /// single key x and return x if x decodes, i is one of x's cells, and the
  /// hash_sum equals multiplicity * enc(H(x)).
  std::optional<std::uint64_t> verify_pure(std::size_t i, Scalar multiplicity) const {
    const std::uint64_t a = params_.reduce(multiplicity.value);
    if (a == 0) return std::nullopt;
    const std::uint64_t inv = mul_inv(Scalar{a}, params_).value;
    auto ks = key_sum(i);
    FVector y(ks.size());
    for (std::size_t d = 0; d < ks.size(); ++d) y[d] = params_.mul(inv, ks[d]);
    auto x = try_decode_value(y, params_);
    if (!x) return std::nullopt;
    const std::size_t sub = i / cfg_.subtable_size;
    if (sub * cfg_.subtable_size + subtable_offset(*x, static_cast<unsigned>(sub), cfg_) != i) return std::nullopt;
    std::uint64_t h = checksum(*x, cfg_);
    auto hs = hash_sum(i);
    for (std::size_t d = 0; d < hs.size(); ++d) {
      if (hs[d] != params_.mul(a, h % params_.p())) return std::nullopt;
      h /= params_.p();
    }
    return x;
  }

  void poison_ids() {
    if (ids_width_ == 0) return;
    std::fill(ids_.begin(), ids_.end(), 0);
    ids_poisoned_ = true;
  }

  std::span<const std::uint64_t> raw_words() const noexcept { return words_; }

  friend bool operator==(const Sketch& a, const Sketch& b) {
    return a.compatible(b) && a.ids_poisoned_ == b.ids_poisoned_ && a.words_ == b.words_ && a.ids_ == b.ids_;
  }

 private:
  void require_compatible(const Sketch& o) const {
    if (!compatible(o)) raise(Errc::config_mismatch, "sketches differ in field, hash config, or ids width");
  }

  FieldParams params_;
  HashConfig cfg_;
  std::size_t ids_width_ = 0;
  std::size_t stride_ = 0;
  std::size_t ids_words_ = 0;
  bool ids_poisoned_ = false;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> ids_;
};

inline Sketch combine(const Sketch& a, const Sketch& b) {
  Sketch out = a;
  out += b;
  return out;
}

/// c * s. Always poisons parity bits (when the sketch has any).
inline Sketch scale(const Sketch& s, Scalar c) {
  Sketch out = s;
  out.scale_by(c);
  return out;
}

/// Sketch of a set where every key carries the same coefficient.
inline Sketch build_sketch(std::span<const std::uint64_t> keys, const FieldParams& params, const HashConfig& cfg,
                           std::size_t ids_width = 0, std::optional<std::size_t> party = std::nullopt,
                           Scalar coeff = Scalar{1}) {
  Sketch s(params, cfg, ids_width);
  for (std::uint64_t x : keys) s.insert(x, coeff, party);
  return s;
}

// ---------------------------------------------------------------------------
// Sizing

/// 2-core threshold coefficients c_k for k = 3..7, in thousandths.
inline constexpr std::array<unsigned, 5> kThresholdMilli = {1222, 1295, 1425, 1570, 1721};

inline double threshold_coefficient(unsigned k) {
  if (k < kMinHashes || k > kMaxHashes) raise(Errc::unsupported_k, "k must lie in [3,7], got " + std::to_string(k));
  return kThresholdMilli[k - kMinHashes] / 1000.0;
}

/// Cells per subtable for a table of at least (c_k + epsilon) * t cells.
/// Growable tables round the subtable up to a power of two.
inline std::uint32_t subtable_size_for(std::size_t t, unsigned k, double epsilon, bool growable = false) {
  const double ck = threshold_coefficient(k);
  if (t < 1) raise(Errc::invalid_argument, "difference bound must be at least 1");
  if (!(epsilon > 0)) raise(Errc::invalid_argument, "epsilon must be positive");
  const double target = (ck + epsilon) * static_cast<double>(t);
  // Absorb representation error so (1.222 + 0.028) * 1000 stays 1250.
  const auto cells = static_cast<std::size_t>(std::ceil(target - 1e-9 * target));
  std::size_t sub = (cells + k - 1) / k;
  if (growable) sub = std::bit_ceil(sub);
  return static_cast<std::uint32_t>(sub);
}

/// Table size m for difference bound t; always a multiple of k.
inline std::size_t size_for(std::size_t t, unsigned k, double epsilon, bool growable = false) {
  return std::size_t{k} * subtable_size_for(t, k, epsilon, growable);
}

/// Cells per subtable for a requested total of `cells` (rounded up to a multiple of k).
inline std::uint32_t subtable_size_for_cells(std::size_t cells, unsigned k) {
  return static_cast<std::uint32_t>(std::max<std::size_t>(1, (cells + k - 1) / k));
}

/// Message size by fields: m * (ceil(log2 p) * (1 + b_key + b_hash) + ids_width).
inline std::uint64_t packed_bits(const FieldParams& params, const HashConfig& cfg, std::size_t ids_width) {
  const std::uint64_t per_cell =
      std::uint64_t{params.element_bits()} * (1 + params.key_width() + params.hash_width()) + ids_width;
  return per_cell * cfg.table_size();
}

inline std::uint64_t packed_bits(const Sketch& s) { return packed_bits(s.params(), s.hash_config(), s.ids_width()); }

// ---------------------------------------------------------------------------
// Doubling refinement

/// The odd-indexed cells (2j+1 within each subtable) of a doubled sketch,
/// which is all a peer must send to upgrade an existing sketch.
struct OddHalf {
  FieldParams params;
  HashConfig cfg;  // configuration of the doubled sketch
  std::size_t ids_width = 0;
  bool ids_poisoned = false;
  std::vector<std::uint64_t> words;  // (m_doubled / 2) cells, subtable order
  std::vector<std::uint64_t> ids;
};

inline OddHalf odd_half(const Sketch& doubled) {
  const auto& cfg = doubled.hash_config();
  if (cfg.subtable_size % 2 != 0) raise(Errc::config_mismatch, "subtable size of a doubled sketch must be even");
  OddHalf half{doubled.params(), cfg, doubled.ids_width(), doubled.ids_poisoned(), {}, {}};
  for (std::size_t sub = 0; sub < cfg.k; ++sub) {
    for (std::size_t j = 1; j < cfg.subtable_size; j += 2) {
      const std::size_t i = sub * cfg.subtable_size + j;
      auto w = doubled.cell_words(i);
      half.words.insert(half.words.end(), w.begin(), w.end());
      auto b = doubled.ids(i);
      half.ids.insert(half.ids.end(), b.begin(), b.end());
    }
  }
  return half;
}

/// Rebuilds the doubled sketch from the old one and the odd half:
/// even cell 2j of each subtable = old cell j - odd cell 2j+1.
inline Sketch refine_halves(const Sketch& old, const OddHalf& odd) {
  const HashConfig& ocfg = old.hash_config();
  if (!old.hash_config().growable() || !(odd.params == old.params()) || !(odd.cfg == doubled(ocfg)) ||
      odd.ids_width != old.ids_width()) {
    raise(Errc::config_mismatch, "odd half does not match a doubling of this sketch");
  }
  Sketch out(old.params(), odd.cfg, old.ids_width());
  const std::size_t stride = out.stride();
  const std::size_t idw = out.ids_words();
  if (odd.words.size() != out.size() / 2 * stride || odd.ids.size() != out.size() / 2 * idw) {
    raise(Errc::config_mismatch, "odd half has the wrong number of cells");
  }
  const auto& f = old.params();
  std::size_t h = 0;
  for (std::size_t sub = 0; sub < ocfg.k; ++sub) {
    for (std::size_t j = 0; j < ocfg.subtable_size; ++j, ++h) {
      const std::size_t oi = sub * ocfg.subtable_size + j;
      const std::size_t even = sub * odd.cfg.subtable_size + 2 * j;
      std::span<const std::uint64_t> oddw{odd.words.data() + h * stride, stride};
      auto ow = old.cell_words(oi);
      auto ev = out.cell_words(even);
      auto od = out.cell_words(even + 1);
      for (std::size_t d = 0; d < stride; ++d) {
        od[d] = oddw[d];
        ev[d] = f.sub(ow[d], oddw[d]);
      }
      for (std::size_t w = 0; w < idw; ++w) {
        out.ids(even + 1)[w] = odd.ids[h * idw + w];
        out.ids(even)[w] = old.ids(oi)[w] ^ odd.ids[h * idw + w];
      }
    }
  }
  if (old.ids_poisoned() || odd.ids_poisoned) out.poison_ids();
  return out;
}

}  // namespace mprecon
