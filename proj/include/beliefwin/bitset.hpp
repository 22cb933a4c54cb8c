#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace beliefwin {

/// Fixed-width bitset sized at construction.  Used for beliefs (bits index
/// model states), sensor sets (bits index sensors) and arena state sets
/// (bits index arena states).  The word storage is exposed so sweep kernels
/// can be parallelised over whole 64-bit words.
class Bitset {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Bitset() = default;
  explicit Bitset(std::size_t nbits, bool value = false)
      : nbits_(nbits), words_((nbits + 63) / 64, value ? ~0ull : 0ull) {
    mask_tail();
  }

  std::size_t size() const { return nbits_; }
  std::size_t num_words() const { return words_.size(); }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i) { words_[i >> 6] |= 1ull << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ull << (i & 63)); }

  void clear() { words_.assign(words_.size(), 0ull); }
  void fill() {
    words_.assign(words_.size(), ~0ull);
    mask_tail();
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += std::popcount(w);
    return n;
  }
  bool any() const {
    for (std::uint64_t w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  friend bool operator==(const Bitset& a, const Bitset& b) {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }
  friend bool operator!=(const Bitset& a, const Bitset& b) { return !(a == b); }

  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  /// Removes every bit set in `o`.
  Bitset& subtract(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  /// Flips all bits (within size()).
  void complement() {
    for (auto& w : words_) w = ~w;
    mask_tail();
  }

  bool is_subset_of(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }
  bool intersects(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  std::size_t find_first() const { return find_next(npos); }
  /// First set bit strictly after `i` (pass npos to start from bit 0).
  std::size_t find_next(std::size_t i) const {
    std::size_t start = (i == npos) ? 0 : i + 1;
    if (start >= nbits_) return npos;
    std::size_t wi = start >> 6;
    std::uint64_t w = words_[wi] & (~0ull << (start & 63));
    while (true) {
      if (w) return (wi << 6) + std::countr_zero(w);
      if (++wi == words_.size()) return npos;
      w = words_[wi];
    }
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        f((wi << 6) + std::countr_zero(w));
        w &= w - 1;
      }
    }
  }

  std::vector<std::size_t> to_indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  std::uint64_t word(std::size_t wi) const { return words_[wi]; }
  void set_word(std::size_t wi, std::uint64_t w) {
    words_[wi] = w;
    if (wi + 1 == words_.size()) mask_tail();
  }
  std::span<const std::uint64_t> words() const { return words_; }

  /// FNV-1a over the words; stable across runs (content only).
  std::uint64_t hash() const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    mix(nbits_);
    for (std::uint64_t w : words_) mix(w);
    return h;
  }

 private:
  void mask_tail() {
    if (nbits_ & 63) words_.back() &= (~0ull >> (64 - (nbits_ & 63)));
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitsetHash {
  std::size_t operator()(const Bitset& b) const {
    return static_cast<std::size_t>(b.hash());
  }
};

}  // namespace beliefwin
