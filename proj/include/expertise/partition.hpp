#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "expertise/errors.hpp"
#include "expertise/model_set.hpp"

namespace expertise {

// A partition of the valuation set, stored as a normalized restricted-growth
// string (cell ids appear in first-occurrence order) together with the cell
// masks. The cell-mask table makes images a few mask operations.
class Partition {
 public:
  static Partition unit(int n) {
    std::vector<std::uint8_t> rgs(n);
    for (int i = 0; i < n; ++i) rgs[i] = static_cast<std::uint8_t>(i);
    return Partition(std::move(rgs));
  }
  static Partition one_cell(int n) {
    return Partition(std::vector<std::uint8_t>(n, 0));
  }
  static Partition from_rgs(std::vector<std::uint8_t> rgs) {
    return Partition(normalize(std::move(rgs)));
  }
  static Partition from_cells(const std::vector<ModelSet>& cells) {
    if (cells.empty()) throw Error("partition needs at least one cell");
    int n = cells[0].width();
    std::vector<std::uint8_t> rgs(n, 0xff);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) throw Error("partition cells must be nonempty");
      for (Valuation v : cells[c].valuations()) {
        if (rgs[v] != 0xff) throw Error("partition cells must be disjoint");
        rgs[v] = static_cast<std::uint8_t>(c);
      }
    }
    for (int v = 0; v < n; ++v)
      if (rgs[v] == 0xff) throw Error("partition must cover every valuation");
    return from_rgs(std::move(rgs));
  }

  int ground_size() const { return static_cast<int>(rgs_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  const std::vector<std::uint8_t>& rgs() const { return rgs_; }
  const std::vector<std::uint64_t>& cells() const { return cells_; }

  std::uint64_t cell_of(Valuation v) const { return cells_[rgs_[v]]; }

  // Image of a valuation set: the union of all cells meeting it.
  std::uint64_t image(std::uint64_t mask) const {
    std::uint64_t out = 0;
    for (std::uint64_t cell : cells_)
      if (cell & mask) out |= cell;
    return out;
  }

  bool refines(const Partition& other) const {
    for (std::uint64_t cell : cells_) {
      bool inside = false;
      for (std::uint64_t big : other.cells_) {
        if ((cell & ~big) == 0) {
          inside = true;
          break;
        }
      }
      if (!inside) return false;
    }
    return true;
  }

  bool operator==(const Partition& o) const { return rgs_ == o.rgs_; }
  bool operator!=(const Partition& o) const { return !(*this == o); }

  std::string to_string(const Signature& sig) const {
    std::string out;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (c) out += " | ";
      bool first = true;
      for (int v = 0; v < ground_size(); ++v) {
        if (rgs_[v] != c) continue;
        if (!first) out += ", ";
        out += sig.valuation_name(v);
        first = false;
      }
    }
    return out;
  }

 private:
  explicit Partition(std::vector<std::uint8_t> rgs) : rgs_(std::move(rgs)) {
    int max_cell = -1;
    for (auto c : rgs_) max_cell = std::max(max_cell, static_cast<int>(c));
    cells_.assign(max_cell + 1, 0);
    for (std::size_t v = 0; v < rgs_.size(); ++v)
      cells_[rgs_[v]] |= std::uint64_t{1} << v;
  }

  static std::vector<std::uint8_t> normalize(std::vector<std::uint8_t> rgs) {
    std::vector<int> relabel(rgs.size(), -1);
    int next = 0;
    for (auto& c : rgs) {
      if (relabel[c] < 0) relabel[c] = next++;
      c = static_cast<std::uint8_t>(relabel[c]);
    }
    return rgs;
  }

  std::vector<std::uint8_t> rgs_;
  std::vector<std::uint64_t> cells_;
};

// Image of a model set under a partition.
inline ModelSet pi_image(const Partition& p, ModelSet m) {
  return ModelSet(p.image(m.bits()), m.width());
}

// Bell numbers via the Bell triangle, saturating at cap: any value beyond it
// reports cap + 1.
inline std::uint64_t bell_number(int n,
                                 std::uint64_t cap = ~std::uint64_t{0} >> 1) {
  cap = std::min(cap, ~std::uint64_t{0} >> 1);
  auto sat_add = [cap](std::uint64_t a, std::uint64_t b) {
    if (a > cap || b > cap || a + b > cap) return cap + 1;
    return a + b;
  };
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next;
    next.reserve(i + 1);
    next.push_back(row.back());
    for (std::size_t j = 0; j < row.size(); ++j)
      next.push_back(sat_add(next.back(), row[j]));
    row = std::move(next);
  }
  return std::min<std::uint64_t>(row.front(), cap + 1);
}

// Every set-partition of {0..n-1} exactly once, in lexicographic
// restricted-growth order. Throws BudgetExceeded when Bell(n) is over the
// partition budget.
template <typename Fn>
void for_each_partition(int n, Fn&& fn, const Limits& limits = {}) {
  if (n < 1) throw Error("partition ground set must be nonempty");
  if (bell_number(n, limits.max_partitions) > limits.max_partitions)
    throw BudgetExceeded("Bell(" + std::to_string(n) +
                         ") exceeds partition budget " +
                         std::to_string(limits.max_partitions));
  std::vector<std::uint8_t> rgs(n, 0);
  std::vector<std::uint8_t> maxval(n, 0);  // max of rgs[0..i-1]
  while (true) {
    fn(Partition::from_rgs(rgs));
    // next restricted-growth string in lexicographic order: rgs[i] may grow
    // up to max(rgs[0..i-1]) + 1
    int i = n - 1;
    while (i > 0 && rgs[i] == maxval[i] + 1) --i;
    if (i == 0) return;
    ++rgs[i];
    for (int j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      maxval[j] = std::max<std::uint8_t>(maxval[j - 1], rgs[j - 1]);
    }
  }
}

inline std::vector<Partition> enumerate_partitions(int n,
                                                   const Limits& limits = {}) {
  std::vector<Partition> out;
  for_each_partition(
      n, [&](Partition p) { out.push_back(std::move(p)); }, limits);
  return out;
}

}  // namespace expertise
