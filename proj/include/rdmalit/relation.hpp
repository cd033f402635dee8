/*
 * Copyright (c) 2026, the rdma-lit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RDMALIT_RELATION_HPP_
#define RDMALIT_RELATION_HPP_

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

namespace rdmalit {

/// Binary relation over {0..n-1} as a bit matrix. All the model checking in
/// this library runs over executions of a few dozen (sub)events, so a dense
/// representation with word-parallel closure is both the simplest and the
/// fastest option.
class Rel {
 public:
  Rel() = default;
  explicit Rel(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  std::size_t size() const { return n_; }

  void add(std::size_t a, std::size_t b) {
    bits_[a * words_ + b / 64] |= (std::uint64_t{1} << (b % 64));
  }
  void remove(std::size_t a, std::size_t b) {
    bits_[a * words_ + b / 64] &= ~(std::uint64_t{1} << (b % 64));
  }
  bool test(std::size_t a, std::size_t b) const {
    return (bits_[a * words_ + b / 64] >> (b % 64)) & 1;
  }

  Rel& operator|=(const Rel& o) {
    assert(n_ == o.n_);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }

  friend Rel operator|(Rel a, const Rel& b) { return a |= b; }

  bool operator==(const Rel& o) const { return n_ == o.n_ && bits_ == o.bits_; }

  Rel inverse() const {
    Rel r(n_);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (test(a, b)) r.add(b, a);
    return r;
  }

  /// r1 ; r2 (relational composition).
  Rel seq(const Rel& o) const {
    assert(n_ == o.n_);
    Rel r(n_);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t c = 0; c < n_; ++c)
        if (test(a, c))
          for (std::size_t w = 0; w < words_; ++w)
            r.bits_[a * words_ + w] |= o.bits_[c * words_ + w];
    return r;
  }

  /// Transitive closure, in place (word-parallel Warshall).
  void close() {
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t a = 0; a < n_; ++a)
        if (test(a, k))
          for (std::size_t w = 0; w < words_; ++w)
            bits_[a * words_ + w] |= bits_[k * words_ + w];
  }

  Rel closed() const {
    Rel r = *this;
    r.close();
    return r;
  }

  bool irreflexive() const {
    for (std::size_t a = 0; a < n_; ++a)
      if (test(a, a)) return false;
    return true;
  }

  /// Acyclic iff the transitive closure is irreflexive.
  bool acyclic() const { return closed().irreflexive(); }

  bool empty() const {
    for (auto w : bits_)
      if (w) return false;
    return true;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : bits_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (test(a, b)) out.emplace_back(a, b);
    return out;
  }

  /// imm(r) = r \ (r;r); meaningful when r is a strict partial order.
  Rel immediate() const {
    Rel rr = seq(*this);
    Rel r = *this;
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b)
        if (rr.test(a, b)) r.remove(a, b);
    return r;
  }

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Calls `fn` once per permutation of `items`; `fn` returning false aborts
/// the enumeration. Used for mo/rao/lo witness orders, which range over a
/// handful of elements.
template <typename T, typename Fn>
bool for_each_permutation(std::vector<T> items, Fn&& fn) {
  std::sort(items.begin(), items.end());
  do {
    if (!fn(static_cast<const std::vector<T>&>(items))) return false;
  } while (std::next_permutation(items.begin(), items.end()));
  return true;
}

}  // namespace rdmalit

#endif  // RDMALIT_RELATION_HPP_
