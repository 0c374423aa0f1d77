// Counter-based keyed random streams (Philox4x32-10) and the scalar draws
// built on them. Every consumer addresses randomness by an explicit key, so
// any draw can be regenerated in isolation and results do not depend on
// scheduling or evaluation order.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace sam {

// Purpose tag separating the independent substreams of one logical unit of
// work. Values are part of the key, so renumbering breaks reproducibility.
enum class Purpose : uint32_t {
  exp_draw = 1,
  z_draw = 2,
  poisson = 3,
  noise = 4,
  euler = 5,
  oracle = 6,
  misc = 7,
};

struct StreamKey {
  uint64_t seed = 0;
  uint32_t interval = 0;
  uint32_t replicate = 0;
  uint32_t purpose = 0;
};

inline StreamKey make_key(uint64_t seed, uint32_t interval, uint32_t replicate,
                          Purpose p) {
  return StreamKey{seed, interval, replicate, static_cast<uint32_t>(p)};
}

// One Philox block: counter = (block, purpose, interval, replicate),
// key = seed. Distinct keys give statistically independent streams.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& ctr,
                                   const std::array<uint32_t, 2>& key);

// Inverse standard normal CDF, |rel err| < 1e-15 over (0,1).
double inv_normal_cdf(double p);

// Standard normal CDF (erfc based).
double normal_cdf(double x);

// Sequential view over the stream addressed by one key. Reconstructing a
// Stream from the same key replays the identical sequence.
class Stream {
 public:
  explicit Stream(const StreamKey& k);

  uint32_t next_u32();
  uint64_t next_u64();
  double u01();          // uniform, strictly inside (0,1)
  double gaussian();     // N(0,1) by inversion
  double exponential();  // Exp(1)

 private:
  void refill();

  std::array<uint32_t, 4> ctr_;
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> buf_;
  uint32_t block_ = 0;
  int pos_ = 4;
};

// Poisson count with the given mean: CDF inversion for mean <= 30,
// transformed rejection above. Deterministic per stream state.
long draw_poisson_count(Stream& st, double mean);

// Ordered points of a rate `rate` Poisson process on (0, horizon).
std::vector<double> draw_poisson_process(Stream& st, double rate,
                                         double horizon);

// rows x cols standard normals, laid out column-major (stride `rows` per
// column) so the per-column triples used downstream are contiguous.
std::vector<double> draw_gaussian_matrix(Stream& st, int rows, int cols);

// Derives a child seed for replicate-level fan-out (datasets, banks).
uint64_t mix_seed(uint64_t seed, uint64_t salt);

}  // namespace sam
