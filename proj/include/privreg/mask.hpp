// Fixed-width bitset over the hypotheses of an ambient class. Subclasses of
// the ambient class are represented (and memoized) by their masks.
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace privreg {

class Mask {
 public:
  Mask() = default;
  explicit Mask(std::size_t n, bool filled = false)
      : n_(n), words_((n + 63) / 64, filled ? ~std::uint64_t{0} : 0) {
    trim();
  }

  std::size_t universe() const { return n_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  bool any() const { return !none(); }

  Mask operator&(const Mask& o) const {
    Mask r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
  }
  Mask operator|(const Mask& o) const {
    Mask r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] |= o.words_[i];
    return r;
  }
  bool subset_of(const Mask& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  // Set bits in increasing order.
  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto bits = words_[w];
      while (bits) {
        out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  bool operator==(const Mask& o) const { return n_ == o.n_ && words_ == o.words_; }
  bool operator!=(const Mask& o) const { return !(*this == o); }

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ull ^ n_;
    for (auto w : words_) {
      h ^= w;
      h *= 1099511628211ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  void trim() {
    if (n_ % 64 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  }

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct MaskHash {
  std::size_t operator()(const Mask& m) const { return m.hash(); }
};

// Canonical class order: descending size, then lexicographic member lists.
inline bool canonical_less(const Mask& a, const Mask& b) {
  const auto ca = a.count(), cb = b.count();
  if (ca != cb) return ca > cb;
  return a.members() < b.members();
}

}  // namespace privreg
