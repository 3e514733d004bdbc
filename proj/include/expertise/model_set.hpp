#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "expertise/signature.hpp"

namespace expertise {

// Canonical semantic form of a propositional formula: one bit per valuation
// of the signature, bit k set iff valuation k is a model. Equivalence of
// formulas is equality of masks.
class ModelSet {
 public:
  ModelSet() = default;
  ModelSet(std::uint64_t bits, int width) : bits_(bits), width_(width) {
    assert(width >= 1 && width <= 64);
    assert(width == 64 || bits < (std::uint64_t{1} << width));
  }

  static ModelSet none(const Signature& sig) {
    return ModelSet(0, sig.num_valuations());
  }
  static ModelSet all(const Signature& sig) {
    return ModelSet(full_mask(sig.num_valuations()), sig.num_valuations());
  }
  static ModelSet of_variable(VarId v, const Signature& sig) {
    int n = sig.num_valuations();
    std::uint64_t bits = 0;
    for (int k = 0; k < n; ++k)
      if ((k >> v) & 1) bits |= std::uint64_t{1} << k;
    return ModelSet(bits, n);
  }
  static ModelSet singleton(Valuation v, const Signature& sig) {
    return ModelSet(std::uint64_t{1} << v, sig.num_valuations());
  }

  std::uint64_t bits() const { return bits_; }
  int width() const { return width_; }
  bool empty() const { return bits_ == 0; }
  bool full() const { return bits_ == full_mask(width_); }
  int count() const { return std::popcount(bits_); }
  bool contains(Valuation v) const { return (bits_ >> v) & 1; }

  ModelSet operator~() const {
    return ModelSet(~bits_ & full_mask(width_), width_);
  }
  friend ModelSet operator&(ModelSet a, ModelSet b) {
    assert(a.width_ == b.width_);
    return ModelSet(a.bits_ & b.bits_, a.width_);
  }
  friend ModelSet operator|(ModelSet a, ModelSet b) {
    assert(a.width_ == b.width_);
    return ModelSet(a.bits_ | b.bits_, a.width_);
  }
  friend ModelSet operator-(ModelSet a, ModelSet b) {
    assert(a.width_ == b.width_);
    return ModelSet(a.bits_ & ~b.bits_, a.width_);
  }
  bool is_subset_of(ModelSet o) const {
    assert(width_ == o.width_);
    return (bits_ & ~o.bits_) == 0;
  }
  bool operator==(const ModelSet&) const = default;

  std::vector<Valuation> valuations() const {
    std::vector<Valuation> out;
    for (int k = 0; k < width_; ++k)
      if (contains(k)) out.push_back(k);
    return out;
  }

  std::string to_string(const Signature& sig) const {
    std::string out = "{";
    bool first = true;
    for (Valuation v : valuations()) {
      if (!first) out += ", ";
      out += sig.valuation_name(v);
      first = false;
    }
    return out + "}";
  }

  static std::uint64_t full_mask(int width) {
    return width == 64 ? ~std::uint64_t{0}
                       : (std::uint64_t{1} << width) - 1;
  }

 private:
  std::uint64_t bits_ = 0;
  int width_ = 1;
};

}  // namespace expertise
