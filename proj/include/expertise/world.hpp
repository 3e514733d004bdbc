#pragma once

#include <cstdint>
#include <vector>

#include "expertise/bitset.hpp"
#include "expertise/partition.hpp"
#include "expertise/prop.hpp"
#include "expertise/signature.hpp"

namespace expertise {

// A fully decoded world: one valuation per case, one partition id per source.
// The distinguished source always carries the unit partition.
struct World {
  std::vector<Valuation> vals;  // per case
  std::vector<int> parts;       // per source, id into Universe::partition
};

// The space of all worlds over a signature. Partitions of the valuation set
// are materialized once (subject to the partition budget); worlds are indexed
// by a mixed-radix code with the valuation tuple as the most significant
// digits and ordinary-source partitions below, last source varying fastest.
// World enumeration itself is guarded by the world budget.
class Universe {
 public:
  explicit Universe(Signature sig)
      : sig_(std::move(sig)),
        partitions_(enumerate_partitions(sig_.num_valuations(), sig_.limits())) {
    Partition unit = Partition::unit(sig_.num_valuations());
    unit_id_ = -1;
    for (std::size_t i = 0; i < partitions_.size(); ++i)
      if (partitions_[i] == unit) unit_id_ = static_cast<int>(i);

    for (SourceId s = 0; s < static_cast<SourceId>(sig_.num_sources()); ++s)
      if (s != sig_.star()) ordinary_.push_back(s);

    val_tuples_ = 1;
    bool overflow = false;
    for (std::size_t c = 0; c < sig_.num_cases(); ++c)
      overflow |= mul(val_tuples_, sig_.num_valuations());
    part_combos_ = 1;
    for (std::size_t s = 0; s < ordinary_.size(); ++s)
      overflow |= mul(part_combos_, partitions_.size());
    world_count_ = val_tuples_;
    overflow |= mul(world_count_, part_combos_);
    countable_ = !overflow;
  }

  const Signature& sig() const { return sig_; }
  const Limits& limits() const { return sig_.limits(); }
  int num_partitions() const { return static_cast<int>(partitions_.size()); }
  const Partition& partition(int id) const { return partitions_[id]; }
  int unit_partition_id() const { return unit_id_; }
  int find_partition(const Partition& p) const {
    for (std::size_t i = 0; i < partitions_.size(); ++i)
      if (partitions_[i] == p) return static_cast<int>(i);
    return -1;
  }
  const std::vector<SourceId>& ordinary_sources() const { return ordinary_; }

  std::uint64_t valuation_tuple_count() const { return val_tuples_; }
  std::uint64_t partition_combo_count() const { return part_combos_; }

  std::uint64_t world_count() const {
    ensure_enumerable();
    return world_count_;
  }

  void ensure_enumerable() const {
    if (!countable_ || world_count_ > limits().max_worlds)
      throw BudgetExceeded(
          "world count exceeds budget " + std::to_string(limits().max_worlds));
  }

  // Digit extraction. Case 0 is the least significant valuation digit; the
  // last ordinary source is the least significant partition digit.
  Valuation valuation_of(std::uint64_t index, CaseId c) const {
    std::uint64_t vt = index / part_combos_;
    for (CaseId i = 0; i < c; ++i) vt /= sig_.num_valuations();
    return static_cast<Valuation>(vt % sig_.num_valuations());
  }
  int partition_id_of(std::uint64_t index, SourceId s) const {
    if (s == sig_.star()) return unit_id_;
    std::uint64_t pc = index % part_combos_;
    std::uint64_t div = 1;
    for (std::size_t k = ordinary_.size(); k-- > 0;) {
      if (ordinary_[k] == s) return static_cast<int>((pc / div) % partitions_.size());
      div *= partitions_.size();
    }
    throw Error("unknown source");
  }

  World world(std::uint64_t index) const {
    World w;
    w.vals.resize(sig_.num_cases());
    std::uint64_t vt = index / part_combos_;
    for (std::size_t c = 0; c < sig_.num_cases(); ++c) {
      w.vals[c] = static_cast<Valuation>(vt % sig_.num_valuations());
      vt /= sig_.num_valuations();
    }
    w.parts.assign(sig_.num_sources(), unit_id_);
    std::uint64_t pc = index % part_combos_;
    for (std::size_t k = ordinary_.size(); k-- > 0;) {
      w.parts[ordinary_[k]] = static_cast<int>(pc % partitions_.size());
      pc /= partitions_.size();
    }
    return w;
  }

  std::uint64_t index_of(const World& w) const {
    std::uint64_t vt = 0;
    for (std::size_t c = sig_.num_cases(); c-- > 0;)
      vt = vt * sig_.num_valuations() + w.vals[c];
    std::uint64_t pc = 0;
    for (SourceId s : ordinary_) pc = pc * partitions_.size() + w.parts[s];
    return vt * part_combos_ + pc;
  }

  template <typename Fn>
  void for_each_world(Fn&& fn) const {
    ensure_enumerable();
    World w;
    w.vals.assign(sig_.num_cases(), 0);
    w.parts.assign(sig_.num_sources(), 0);
    w.parts[sig_.star()] = unit_id_;
    for (std::uint64_t index = 0;; ++index) {
      fn(index, w);
      // increment partition digits, last ordinary source fastest
      std::size_t k = ordinary_.size();
      while (k > 0) {
        int& d = w.parts[ordinary_[k - 1]];
        if (++d < num_partitions()) break;
        d = 0;
        --k;
      }
      if (k > 0) continue;
      // carry into the valuation tuple, case 0 fastest
      std::size_t c = 0;
      while (c < sig_.num_cases()) {
        if (++w.vals[c] < sig_.num_valuations()) break;
        w.vals[c] = 0;
        ++c;
      }
      if (c == sig_.num_cases()) return;
    }
  }

  Bitset empty_set() const { return Bitset(world_count()); }
  Bitset full_set() const { return Bitset(world_count(), true); }

 private:
  static bool mul(std::uint64_t& acc, std::uint64_t factor) {
    if (factor != 0 && acc > ~std::uint64_t{0} / factor) {
      acc = ~std::uint64_t{0};
      return true;
    }
    acc *= factor;
    return false;
  }

  Signature sig_;
  std::vector<Partition> partitions_;
  std::vector<SourceId> ordinary_;
  int unit_id_;
  std::uint64_t val_tuples_, part_combos_, world_count_;
  bool countable_;
};

// Satisfaction of an expertise-language formula at (world, case). E-atoms do
// not depend on the case; S-atoms check membership of the case valuation in
// the image of the argument's models.
inline bool eval(const Universe& u, const World& w, CaseId c,
                 const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Var:
      return (w.vals[c] >> f.var_id()) & 1;
    case K::Not:
      return !eval(u, w, c, f.left());
    case K::And:
      return eval(u, w, c, f.left()) && eval(u, w, c, f.right());
    case K::Or:
      return eval(u, w, c, f.left()) || eval(u, w, c, f.right());
    case K::Imp:
      return !eval(u, w, c, f.left()) || eval(u, w, c, f.right());
    case K::Iff:
      return eval(u, w, c, f.left()) == eval(u, w, c, f.right());
    case K::Expert: {
      std::uint64_t m = models(f.left(), u.sig()).bits();
      return u.partition(w.parts[f.source()]).image(m) == m;
    }
    case K::Sound: {
      std::uint64_t m = models(f.left(), u.sig()).bits();
      return (u.partition(w.parts[f.source()]).image(m) >> w.vals[c]) & 1;
    }
  }
  return false;
}

// Valid iff satisfied at every (world, case) of the universe.
inline bool is_valid(const Universe& u, const Formula& f) {
  bool ok = true;
  u.for_each_world([&](std::uint64_t, const World& w) {
    if (!ok) return;
    for (CaseId c = 0; c < static_cast<CaseId>(u.sig().num_cases()); ++c)
      if (!eval(u, w, c, f)) {
        ok = false;
        return;
      }
  });
  return ok;
}

inline bool partition_equivalent(const World& a, const World& b) {
  return a.parts == b.parts;
}

// W preceq W' iff each source's partition in W refines its partition in W'.
inline bool world_preceq(const Universe& u, const World& a, const World& b) {
  for (std::size_t s = 0; s < a.parts.size(); ++s)
    if (!u.partition(a.parts[s]).refines(u.partition(b.parts[s])))
      return false;
  return true;
}

// W refines W' at case c iff every source's cell around the c-valuation in W
// sits inside its cell around the c-valuation in W': each source is at least
// as discerning about case c in W as in W'.
inline bool refines_at(const Universe& u, const World& a, const World& b,
                       CaseId c) {
  for (std::size_t s = 0; s < a.parts.size(); ++s) {
    std::uint64_t cell_a = u.partition(a.parts[s]).cell_of(a.vals[c]);
    std::uint64_t cell_b = u.partition(b.parts[s]).cell_of(b.vals[c]);
    if (cell_a & ~cell_b) return false;
  }
  return true;
}

}  // namespace expertise
