#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "stmon/error.hpp"
#include "stmon/geometry/polytope.hpp"

namespace stmon::stl {

// Set of 1-based sub-formula indices, bitmask-backed. Specs are capped at 32
// conjuncts, which is far beyond anything the monitor meets in practice.
class IndexSet {
 public:
  static constexpr int kMaxIndices = 32;

  IndexSet() = default;

  static IndexSet all(int n) {
    IndexSet s;
    s.bits_ = n >= kMaxIndices ? ~0u : ((1u << n) - 1u);
    return s;
  }
  static IndexSet of(std::initializer_list<int> xs) {
    IndexSet s;
    for (int i : xs) s.insert(i);
    return s;
  }

  bool contains(int i) const { return (bits_ >> (i - 1)) & 1u; }
  void insert(int i) { bits_ |= 1u << (i - 1); }
  void erase(int i) { bits_ &= ~(1u << (i - 1)); }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcount(bits_); }

  IndexSet intersect(IndexSet o) const { return from_raw(bits_ & o.bits_); }
  IndexSet unite(IndexSet o) const { return from_raw(bits_ | o.bits_); }
  IndexSet minus(IndexSet o) const { return from_raw(bits_ & ~o.bits_); }
  bool intersects(IndexSet o) const { return (bits_ & o.bits_) != 0; }
  bool subset_of(IndexSet o) const { return (bits_ & ~o.bits_) == 0; }

  std::vector<int> members() const {
    std::vector<int> v;
    for (int i = 1; i <= kMaxIndices; ++i)
      if (contains(i)) v.push_back(i);
    return v;
  }

  std::string str() const {
    std::string s = "{";
    bool first = true;
    for (int i : members()) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
    return s + "}";
  }

  std::uint32_t raw() const { return bits_; }
  static IndexSet from_raw(std::uint32_t r) {
    IndexSet s;
    s.bits_ = r;
    return s;
  }

  friend bool operator==(IndexSet a, IndexSet b) { return a.bits_ == b.bits_; }
  friend bool operator!=(IndexSet a, IndexSet b) { return a.bits_ != b.bits_; }
  friend bool operator<(IndexSet a, IndexSet b) { return a.bits_ < b.bits_; }

 private:
  std::uint32_t bits_ = 0;
};

enum class Op { Globally, Until };

// One conjunct after desugaring: either G_[a,b] (x in h1) or the modified until
// (x in h1) U_[a,b] (x in h2), whose witness instant must itself satisfy h1.
struct SubFormula {
  Op op = Op::Globally;
  int a = 0;
  int b = 0;
  geom::Region h1;  // G: invariant set; U: hold set
  geom::Region h2;  // U only: target set
};

// Conjunction of sub-formulae, sorted by window start; indices are 1-based
// positions in `subs`. A zero-conjunct spec (trivially true) can arise from
// remaining-formula extraction but never from the parser.
struct StlSpec {
  int state_dim = 0;
  std::vector<SubFormula> subs;
  int horizon = 0;  // max window end

  int count() const { return static_cast<int>(subs.size()); }
  const SubFormula &sub(int i) const { return subs[static_cast<std::size_t>(i) - 1]; }
};

// Finite state trace with absolute time indexing: states[k] is the state at
// instant start + k.
struct Trace {
  int start = 0;
  std::vector<geom::Vec> states;

  int end() const { return start + static_cast<int>(states.size()) - 1; }
  const geom::Vec &at(int t) const {
    if (t < start || t > end()) throw Error("trace index out of range");
    return states[static_cast<std::size_t>(t - start)];
  }
};

// Index classification at instant t.
struct IndexPartition {
  IndexSet active;        // a_i <= t <= b_i
  IndexSet past;          // b_i < t
  IndexSet future;        // t < a_i
  IndexSet active_until;  // active with op == Until
  IndexSet active_glob;   // active with op == Globally
};

inline IndexPartition effective_indices(const StlSpec &spec, int t) {
  IndexPartition p;
  for (int i = 1; i <= spec.count(); ++i) {
    const SubFormula &f = spec.sub(i);
    if (t > f.b) {
      p.past.insert(i);
    } else if (t < f.a) {
      p.future.insert(i);
    } else {
      p.active.insert(i);
      if (f.op == Op::Until) p.active_until.insert(i);
      else p.active_glob.insert(i);
    }
  }
  return p;
}

}  // namespace stmon::stl
