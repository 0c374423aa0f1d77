#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "sam/bridge.hpp"
#include "sam/likelihood.hpp"
#include "sam/model.hpp"
#include "sam/xi.hpp"

using namespace sam;

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

const ParameterVector kTheta0 = {0.1, 1000.0, 0.1};

ParameterBox standard_box() {
  return ParameterBox({0.03, 850.0, 0.09}, {0.18, 1200.0, 0.12});
}

std::vector<ObsPair> logistic_pairs() {
  return {{700.0, 810.0, 1.0}, {810.0, 950.0, 1.0}, {950.0, 905.0, 1.0}};
}

bool elements_equal(const XiElement& a, const XiElement& b) {
  return a.E == b.E && a.Z == b.Z && a.lambda == b.lambda &&
         a.times == b.times && a.noise == b.noise;
}

}  // namespace

TEST_CASE("drifted brownian density draws are exact and constant") {
  DriftedBrownianModel m;
  ParameterVector th = {0.5};
  ObsPair pair{0.0, 0.3, 1.0};
  ParameterBox box({-2.0}, {2.0});
  BankSpec spec{77, 0, pair, &m, box};

  double d = pair.w - pair.v - th[0] * pair.t;
  double closed = std::exp(-d * d / (2.0 * pair.t)) /
                  std::sqrt(kTwoPi * pair.t);

  double first = eval_L(m, th, pair, generate_xi(spec, 0));
  CHECK(first == doctest::Approx(closed).epsilon(1e-14));
  for (uint32_t j = 1; j < 500; ++j)
    CHECK(eval_L(m, th, pair, generate_xi(spec, j)) == first);
}

TEST_CASE("density draws stay within the positive part bound") {
  LogisticGrowthModel m;
  ObsPair pair{900.0, 1000.0, 1.0};
  BankSpec spec{78, 0, pair, &m, standard_box()};
  // a in [0, 1] forces 0 <= L <= prefactor; read the prefactor off a
  // markless element, for which a is exactly one.
  double pref = -1.0;
  for (uint32_t j = 0; j < 2000; ++j) {
    XiElement xi = generate_xi(spec, j);
    if (xi.times.empty()) {
      double l0 = eval_L(m, kTheta0, pair, xi);
      if (pref < 0.0)
        pref = l0;
      else
        CHECK(l0 == pref);
    }
  }
  REQUIRE(pref > 0.0);
  for (uint32_t j = 0; j < 2000; ++j) {
    double L = eval_L(m, kTheta0, pair, generate_xi(spec, j));
    CHECK(L >= 0.0);
    CHECK(L <= pref * (1.0 + 1e-12));
  }
}

TEST_CASE("density draw matches a from-scratch recomputation") {
  LogisticGrowthModel m;
  ObsPair pair{900.0, 1000.0, 1.0};

  auto manual_eval = [&](const BankSpec& spec, uint32_t j,
                         const ParameterVector& th) {
    XiElement xi = generate_xi(spec, j);
    double x = m.eta(pair.v, th), y = m.eta(pair.w, th);
    double pref = std::fabs(m.eta_du(pair.w, th)) *
                  std::exp(-(y - x) * (y - x) / (2.0 * pair.t) +
                           m.A(y, th) - m.A(x, th) - m.l_bound(th) * pair.t) /
                  std::sqrt(kTwoPi * pair.t);
    MinSplit ms = split_at_minimum(BridgeFrame{x, y, pair.t}, xi.E, xi.Z);
    double w[2];
    for (int branch = 0; branch < 2; ++branch) {
      auto chi = chi_values(BridgeFrame{x, y, pair.t}, ms, branch, xi.times,
                            xi.noise);
      double p = 1.0;
      for (double c : chi) p *= 1.0 - m.phi(c, th) / xi.lambda;
      w[branch] = p;
    }
    return std::pair<double, size_t>(
        pref * (ms.p1 * w[0] + (1.0 - ms.p1) * w[1]), xi.times.size());
  };

  // Ordinary mark loads exercise the direct product path.
  BankSpec spec{79, 0, pair, &m, standard_box()};
  size_t with_marks = 0;
  for (uint32_t j = 0; j < 300; ++j) {
    auto [manual, n_marks] = manual_eval(spec, j, kTheta0);
    with_marks += n_marks > 0;
    CHECK(eval_L(m, kTheta0, pair, generate_xi(spec, j)) ==
          doctest::Approx(manual).epsilon(1e-12));
  }
  CHECK(with_marks > 100);

  // A box with a tiny diffusion floor inflates the dominating rate, so the
  // mark count crosses the log-space accumulation threshold.
  ParameterBox wide({0.03, 850.0, 0.01}, {0.18, 1200.0, 0.12});
  BankSpec spec2{80, 0, pair, &m, wide};
  size_t heavy = 0;
  for (uint32_t j = 0; j < 20; ++j) {
    auto [manual, n_marks] = manual_eval(spec2, j, kTheta0);
    heavy += n_marks > static_cast<size_t>(kLogSpaceMarks);
    CHECK(eval_L(m, kTheta0, pair, generate_xi(spec2, j)) ==
          doctest::Approx(manual).epsilon(1e-12));
  }
  CHECK(heavy == 20);
}

TEST_CASE("a stored rate below the envelope is rejected") {
  LogisticGrowthModel m;
  ObsPair pair{900.0, 1000.0, 1.0};
  XiElement xi;
  xi.E = 1.0;
  xi.Z = 0.5;
  xi.lambda = 1e-6;  // far below r_sup at any minimum for theta0
  xi.times = {0.5};
  xi.noise = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(eval_L(m, kTheta0, pair, xi), std::runtime_error);
}

TEST_CASE("surface evaluation: parallel equals serial bit for bit") {
  LogisticGrowthModel m;
  LikelihoodSurface surf(m, standard_box(), logistic_pairs(), 81, 400,
                         LikelihoodSurface::kStore, 0);
  for (const ParameterVector& th :
       {kTheta0, ParameterVector{0.05, 900.0, 0.11}}) {
    for (size_t i = 0; i < surf.intervals(); ++i)
      CHECK(surf.eval_LN(i, th, 4) == surf.eval_LN_serial(i, th));
    CHECK(surf.loglik(th, 4) == surf.loglik_serial(th));
    CHECK(std::isfinite(surf.loglik(th)));

    auto g4 = surf.fd_gradient(th, 1e-4, 4);
    auto g1 = surf.fd_gradient(th, 1e-4, 1);
    CHECK(g4 == g1);
    Mat s4 = surf.score_spread(th, 1e-4, 4);
    Mat s1 = surf.score_spread(th, 1e-4, 1);
    CHECK(s4.a == s1.a);
    Mat h4 = surf.fd_hessian(th, 1e-4, 4);
    Mat h1 = surf.fd_hessian(th, 1e-4, 1);
    CHECK(h4.a == h1.a);
  }
}

TEST_CASE("lazy and stored banks give identical surfaces") {
  LogisticGrowthModel m;
  LikelihoodSurface stored(m, standard_box(), logistic_pairs(), 82, 300,
                           LikelihoodSurface::kStore, 0);
  LikelihoodSurface lazy(m, standard_box(), logistic_pairs(), 82, 300,
                         LikelihoodSurface::kLazy, 0);
  CHECK(stored.bank(0).materialized());
  CHECK(!lazy.bank(0).materialized());
  for (const ParameterVector& th :
       {kTheta0, ParameterVector{0.17, 1150.0, 0.095}})
    CHECK(stored.loglik(th) == lazy.loglik(th));
}

TEST_CASE("gradient of the zero-variance surface matches the closed form") {
  DriftedBrownianModel m;
  ParameterBox box({-2.0}, {2.0});
  std::vector<ObsPair> pairs = {{0.0, 0.3, 1.0}, {0.3, -0.1, 0.5}};
  LikelihoodSurface surf(m, box, pairs, 83, 100);
  ParameterVector th = {0.3};
  double expect = 0.0, sum_t = 0.0;
  for (const auto& p : pairs) {
    expect += p.w - p.v - th[0] * p.t;
    sum_t += p.t;
  }
  (void)sum_t;
  auto g = surf.fd_gradient(th);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == doctest::Approx(expect).epsilon(1e-7));
  // The observed information of a Gaussian likelihood is the total time.
  Mat h = surf.fd_hessian(th);
  CHECK(-h.at(0, 0) == doctest::Approx(sum_t).epsilon(1e-6));
  // Stencil points must stay inside the box.
  CHECK_THROWS_AS(surf.fd_gradient({2.0}), std::domain_error);
}

TEST_CASE("banks nest across sizes and regenerate identically") {
  LogisticGrowthModel m;
  BankSpec spec{84, 2, {700.0, 840.0, 1.0}, &m, standard_box()};
  XiBank small(spec, 50, true);
  small.build();
  XiBank big(spec, 200, true);
  big.build();
  for (uint32_t j = 0; j < 50; ++j)
    CHECK(elements_equal(small.get(j), big.get(j)));
  // Lazy access and per-index regeneration agree with the stored copies.
  XiBank lazy(spec, 200, false);
  for (uint32_t j = 0; j < 200; j += 7) {
    CHECK(elements_equal(lazy.get(j), big.get(j)));
    CHECK(elements_equal(generate_xi(spec, j), big.get(j)));
  }
  CHECK(lazy.stored(0) == nullptr);
  CHECK(big.stored(0) != nullptr);
  CHECK_THROWS(big.get(200));
}

TEST_CASE("bank cache round-trips and rejects mismatched requests") {
  namespace fs = std::filesystem;
  LogisticGrowthModel m;
  BankSpec spec{85, 1, {800.0, 930.0, 1.0}, &m, standard_box()};
  XiBank bank(spec, 120, true);
  bank.build();

  fs::path path = fs::temp_directory_path() / "samlik_test_bank.bin";
  REQUIRE(save_bank_cache(path.string(), bank));

  XiBank loaded;
  REQUIRE(load_bank_cache(path.string(), spec, 120, loaded));
  REQUIRE(loaded.size() == 120);
  for (uint32_t j = 0; j < 120; ++j)
    CHECK(elements_equal(loaded.get(j), bank.get(j)));

  XiBank reject;
  CHECK(!load_bank_cache(path.string(), spec, 121, reject));
  BankSpec other = spec;
  other.seed = 86;
  CHECK(!load_bank_cache(path.string(), other, 120, reject));
  BankSpec shifted = spec;
  shifted.pair.w = 931.0;
  CHECK(!load_bank_cache(path.string(), shifted, 120, reject));
  CHECK(!load_bank_cache((fs::temp_directory_path() / "absent.bin").string(),
                         spec, 120, reject));
  fs::remove(path);
}

TEST_CASE("adopted banks reproduce the self-built surface") {
  LogisticGrowthModel m;
  ParameterBox box = standard_box();
  std::vector<ObsPair> pairs = logistic_pairs();
  LikelihoodSurface self_built(m, box, pairs, 87, 150,
                               LikelihoodSurface::kStore, 0);
  std::vector<XiBank> banks;
  for (size_t i = 0; i < pairs.size(); ++i) {
    BankSpec spec{87, static_cast<uint32_t>(i), pairs[i], &m, box};
    banks.emplace_back(spec, 150, true);
    banks.back().build();
  }
  LikelihoodSurface adopted(m, box, pairs, std::move(banks));
  CHECK(adopted.bank_size() == 150);
  CHECK(adopted.seed() == 87);
  CHECK(adopted.loglik(kTheta0) == self_built.loglik(kTheta0));

  // Mismatched bank sets are rejected.
  std::vector<XiBank> wrong;
  wrong.emplace_back(BankSpec{87, 0, pairs[0], &m, box}, 150, true);
  CHECK_THROWS(LikelihoodSurface(m, box, pairs, std::move(wrong)));
}

TEST_CASE("mark statistics aggregate over a bank") {
  LogisticGrowthModel m;
  BankSpec spec{88, 0, {1000.0, 1040.0, 1.0}, &m, standard_box()};
  XiBank bank(spec, 4000, true);
  bank.build();
  BankStats st = bank_mark_stats(bank);
  CHECK(st.elements == 4000);
  CHECK(st.mean_lambda >= 2.0);  // rate floor for this box
  CHECK(st.mean_marks > 0.5);
  CHECK(st.max_marks >= 1);
  // Mean marks tracks mean lambda times the horizon for a Poisson load.
  CHECK(st.mean_marks == doctest::Approx(st.mean_lambda).epsilon(0.1));
}
