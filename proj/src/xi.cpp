#include "sam/xi.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "sam/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sam {

XiElement generate_xi(const BankSpec& spec, uint32_t j) {
  if (spec.model == nullptr) throw std::invalid_argument("generate_xi: no model");
  XiElement xi;
  {
    Stream st(make_key(spec.seed, spec.interval_index, j, Purpose::exp_draw));
    xi.E = st.exponential();
  }
  xi.lambda = spec.model->lambda_bound(xi.E, spec.pair.v, spec.pair.w,
                                       spec.pair.t, spec.box);
  {
    Stream st(make_key(spec.seed, spec.interval_index, j, Purpose::poisson));
    xi.times = xi.lambda > 0.0
                   ? draw_poisson_process(st, xi.lambda, spec.pair.t)
                   : std::vector<double>{};
  }
  {
    Stream st(make_key(spec.seed, spec.interval_index, j, Purpose::z_draw));
    xi.Z = st.gaussian();
  }
  {
    Stream st(make_key(spec.seed, spec.interval_index, j, Purpose::noise));
    xi.noise = draw_gaussian_matrix(st, 3, static_cast<int>(xi.times.size()));
  }
  return xi;
}

XiBank::XiBank(BankSpec spec, uint32_t n, bool materialize)
    : spec_(std::move(spec)), n_(n), want_store_(materialize) {}

XiElement XiBank::get(uint32_t j) const {
  if (j >= n_) throw std::out_of_range("XiBank::get");
  if (!store_.empty()) return store_[j];
  return generate_xi(spec_, j);
}

const XiElement* XiBank::stored(uint32_t j) const {
  if (store_.empty() || j >= n_) return nullptr;
  return &store_[j];
}

void XiBank::build(int threads) {
  if (!want_store_ || !store_.empty()) return;
  store_.resize(n_);
#ifdef _OPENMP
  if (threads != 1) {
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
    for (int64_t j = 0; j < static_cast<int64_t>(n_); ++j)
      store_[static_cast<size_t>(j)] = generate_xi(spec_, static_cast<uint32_t>(j));
    return;
  }
#else
  (void)threads;
#endif
  for (uint32_t j = 0; j < n_; ++j) store_[j] = generate_xi(spec_, j);
}

void XiBank::build_serial() {
  if (!want_store_ || !store_.empty()) return;
  store_.resize(n_);
  for (uint32_t j = 0; j < n_; ++j) store_[j] = generate_xi(spec_, j);
}

XiBank XiBank::from_elements(BankSpec spec, std::vector<XiElement> elements) {
  XiBank b(std::move(spec), static_cast<uint32_t>(elements.size()), true);
  b.store_ = std::move(elements);
  return b;
}

BankStats bank_mark_stats(const XiBank& bank) {
  BankStats s;
  s.elements = bank.size();
  double marks = 0.0, lam = 0.0;
  for (uint32_t j = 0; j < bank.size(); ++j) {
    XiElement xi = bank.get(j);
    long k = static_cast<long>(xi.times.size());
    marks += static_cast<double>(k);
    if (k > s.max_marks) s.max_marks = k;
    lam += xi.lambda;
  }
  if (bank.size() > 0) {
    s.mean_marks = marks / static_cast<double>(bank.size());
    s.mean_lambda = lam / static_cast<double>(bank.size());
  }
  return s;
}

namespace {

uint64_t fnv1a(const void* data, size_t len, uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

uint64_t bank_hash(const BankSpec& spec, uint32_t n) {
  uint64_t h = 0xCBF29CE484222325ull;
  h = fnv1a(&spec.seed, sizeof spec.seed, h);
  h = fnv1a(&spec.interval_index, sizeof spec.interval_index, h);
  h = fnv1a(&spec.pair, sizeof spec.pair, h);
  std::string name = spec.model ? spec.model->name() : "";
  h = fnv1a(name.data(), name.size(), h);
  h = fnv1a(spec.box.lo.data(), spec.box.lo.size() * sizeof(double), h);
  h = fnv1a(spec.box.hi.data(), spec.box.hi.size() * sizeof(double), h);
  h = fnv1a(&n, sizeof n, h);
  return h;
}

constexpr uint64_t kCacheMagic = 0x53414D42414E4B31ull;  // "SAMBANK1"

}  // namespace

bool save_bank_cache(const std::string& path, const XiBank& bank) {
  if (!bank.materialized()) return false;
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) return false;
  uint64_t magic = kCacheMagic;
  uint64_t hash = bank_hash(bank.spec(), bank.size());
  uint64_t n = bank.size();
  bool ok = std::fwrite(&magic, 8, 1, fp) == 1 &&
            std::fwrite(&hash, 8, 1, fp) == 1 && std::fwrite(&n, 8, 1, fp) == 1;
  for (uint32_t j = 0; ok && j < bank.size(); ++j) {
    const XiElement* xi = bank.stored(j);
    uint64_t k = xi->times.size();
    ok = std::fwrite(&xi->E, 8, 1, fp) == 1 &&
         std::fwrite(&xi->Z, 8, 1, fp) == 1 &&
         std::fwrite(&xi->lambda, 8, 1, fp) == 1 &&
         std::fwrite(&k, 8, 1, fp) == 1 &&
         (k == 0 || (std::fwrite(xi->times.data(), 8, k, fp) == k &&
                     std::fwrite(xi->noise.data(), 8, 3 * k, fp) == 3 * k));
  }
  return std::fclose(fp) == 0 && ok;
}

bool load_bank_cache(const std::string& path, const BankSpec& spec, uint32_t n,
                     XiBank& out) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp == nullptr) return false;
  uint64_t magic = 0, hash = 0, count = 0;
  bool ok = std::fread(&magic, 8, 1, fp) == 1 && magic == kCacheMagic &&
            std::fread(&hash, 8, 1, fp) == 1 &&
            hash == bank_hash(spec, n) && std::fread(&count, 8, 1, fp) == 1 &&
            count == n;
  std::vector<XiElement> elements;
  if (ok) {
    elements.resize(n);
    for (uint32_t j = 0; ok && j < n; ++j) {
      XiElement& xi = elements[j];
      uint64_t k = 0;
      ok = std::fread(&xi.E, 8, 1, fp) == 1 && std::fread(&xi.Z, 8, 1, fp) == 1 &&
           std::fread(&xi.lambda, 8, 1, fp) == 1 && std::fread(&k, 8, 1, fp) == 1;
      if (ok && k > 0) {
        xi.times.resize(k);
        xi.noise.resize(3 * k);
        ok = std::fread(xi.times.data(), 8, k, fp) == k &&
             std::fread(xi.noise.data(), 8, 3 * k, fp) == 3 * k;
      }
    }
  }
  std::fclose(fp);
  if (ok) out = XiBank::from_elements(spec, std::move(elements));
  return ok;
}

}  // namespace sam
