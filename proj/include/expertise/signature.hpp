#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "expertise/errors.hpp"

namespace expertise {

using VarId = int;
using CaseId = int;
using SourceId = int;
using Valuation = int;  // index into 0..2^|P|-1, variable i at bit i

// Enumeration budgets. Operations that would exceed them throw
// BudgetExceeded instead of sampling.
struct Limits {
  std::size_t max_variables = 4;
  std::uint64_t max_partitions = 1'000'000;  // cap on Bell(2^|P|)
  std::uint64_t max_worlds = 10'000'000;
  std::uint64_t max_sequences = 10'000'000;  // postulate space instances
};

inline const std::string kStarName = "*";

// The vocabulary of a problem instance: propositional variables, case labels,
// and source names including the distinguished reliable source "*".
class Signature {
 public:
  Signature(std::vector<std::string> variables, std::vector<std::string> cases,
            std::vector<std::string> sources, Limits limits = {})
      : vars_(std::move(variables)),
        cases_(std::move(cases)),
        sources_(std::move(sources)),
        limits_(limits) {
    if (vars_.empty()) throw Error("signature needs at least one variable");
    if (cases_.empty()) throw Error("signature needs at least one case");
    // model sets are 64-bit masks over valuations
    if (vars_.size() > 6)
      throw Error("at most 6 variables are representable");
    if (vars_.size() > limits_.max_variables)
      throw BudgetExceeded("variable count " + std::to_string(vars_.size()) +
                           " exceeds limit " +
                           std::to_string(limits_.max_variables));
    check_unique(vars_, "variable");
    check_unique(cases_, "case");
    check_unique(sources_, "source");
    auto it = std::find(sources_.begin(), sources_.end(), kStarName);
    if (it == sources_.end())
      throw Error("sources must include the reliable source \"*\"");
    star_ = static_cast<SourceId>(it - sources_.begin());
  }

  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_cases() const { return cases_.size(); }
  std::size_t num_sources() const { return sources_.size(); }
  int num_valuations() const { return 1 << vars_.size(); }
  SourceId star() const { return star_; }
  const Limits& limits() const { return limits_; }

  const std::string& variable_name(VarId v) const { return vars_[v]; }
  const std::string& case_name(CaseId c) const { return cases_[c]; }
  const std::string& source_name(SourceId s) const { return sources_[s]; }
  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<std::string>& cases() const { return cases_; }
  const std::vector<std::string>& sources() const { return sources_; }

  VarId find_variable(const std::string& name) const {
    return find(vars_, name);
  }
  CaseId find_case(const std::string& name) const { return find(cases_, name); }
  SourceId find_source(const std::string& name) const {
    return find(sources_, name);
  }

  // Rendering of a valuation in the bar notation ("xy̵"-style) when all
  // variable names are single characters, "!x y" style otherwise.
  std::string valuation_name(Valuation v) const {
    bool single = std::all_of(vars_.begin(), vars_.end(),
                              [](const std::string& s) { return s.size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      bool truth = (v >> i) & 1;
      if (single) {
        out += vars_[i];
        if (!truth) out += "̄";  // combining macron
      } else {
        if (i) out += ' ';
        if (!truth) out += '!';
        out += vars_[i];
      }
    }
    return out;
  }

  bool operator==(const Signature& o) const {
    return vars_ == o.vars_ && cases_ == o.cases_ && sources_ == o.sources_;
  }

 private:
  static void check_unique(const std::vector<std::string>& names,
                           const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
      if (n.empty()) throw Error(std::string(what) + " name must be nonempty");
      if (!seen.insert(n).second)
        throw Error("duplicate " + std::string(what) + " name: " + n);
    }
  }
  static int find(const std::vector<std::string>& names,
                  const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
  }

  std::vector<std::string> vars_, cases_, sources_;
  Limits limits_;
  SourceId star_;
};

}  // namespace expertise
