// Parameter-free random elements: one element carries everything needed to
// evaluate the transition-density estimator at any parameter value, and is
// fully determined by (seed, interval index, element index). Banks hold N
// elements per observation interval; because elements are keyed by index,
// the bank for a smaller N is a prefix of the bank for a larger one, and
// banks can be rebuilt lazily, in parallel, with bit-identical results.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sam/model.hpp"

namespace sam {

struct XiElement {
  double E = 0.0;       // Exp(1) driving the bridge minimum
  double Z = 0.0;       // N(0,1) driving the minimum's time
  double lambda = 0.0;  // parameter-free mark rate (dominates r over the box)
  std::vector<double> times;  // Poisson marks in (0, t), sorted
  std::vector<double> noise;  // 3 x times.size() column-major normals
};

// Everything needed to regenerate a bank deterministically.
struct BankSpec {
  uint64_t seed = 0;
  uint32_t interval_index = 0;
  ObsPair pair{};  // (v, w, t) on the original scale
  const TransformedModel* model = nullptr;
  ParameterBox box;
};

XiElement generate_xi(const BankSpec& spec, uint32_t j);

class XiBank {
 public:
  XiBank() = default;
  // materialize: store the N elements; otherwise regenerate on access.
  XiBank(BankSpec spec, uint32_t n, bool materialize);

  uint32_t size() const { return n_; }
  const BankSpec& spec() const { return spec_; }
  bool materialized() const { return !store_.empty(); }

  // Stored element, or a fresh regeneration when the bank is lazy.
  XiElement get(uint32_t j) const;
  const XiElement* stored(uint32_t j) const;

  void build(int threads = 0);         // OpenMP over elements
  void build_serial();                 // reference implementation

  static XiBank from_elements(BankSpec spec, std::vector<XiElement> elements);

 private:
  BankSpec spec_{};
  uint32_t n_ = 0;
  bool want_store_ = false;
  std::vector<XiElement> store_;
};

struct BankStats {
  double mean_marks = 0.0;
  long max_marks = 0;
  double mean_lambda = 0.0;
  uint64_t elements = 0;
};

BankStats bank_mark_stats(const XiBank& bank);

// Binary cache: contents are keyed by a hash of the spec and N; loading
// verifies the key and fails (returns false) on any mismatch.
bool save_bank_cache(const std::string& path, const XiBank& bank);
bool load_bank_cache(const std::string& path, const BankSpec& spec, uint32_t n,
                     XiBank& out);

}  // namespace sam
