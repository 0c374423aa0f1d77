#include <cmath>
#include <vector>

#include "doctest.h"
#include "sam/model.hpp"

using namespace sam;

namespace {

const ParameterVector kTheta0 = {0.1, 1000.0, 0.1};

ParameterBox standard_box() {
  return ParameterBox({0.03, 850.0, 0.09}, {0.18, 1200.0, 0.12});
}

}  // namespace

TEST_CASE("parameter box validates its bounds") {
  CHECK_THROWS(ParameterBox({}, {}));
  CHECK_THROWS(ParameterBox({0.0, 1.0}, {1.0}));
  CHECK_THROWS(ParameterBox({1.0}, {1.0}));            // lo == hi
  CHECK_THROWS(ParameterBox({2.0}, {1.0}));            // lo > hi
  CHECK_THROWS(ParameterBox({0.0}, {LogisticGrowthModel::kInf}));

  ParameterBox b({0.0, 10.0}, {1.0, 30.0});
  CHECK(b.dim() == 2);
  CHECK(b.width(1) == 20.0);
  CHECK(b.midpoint() == ParameterVector{0.5, 20.0});
  CHECK(b.contains({0.5, 10.0}));
  CHECK(!b.contains({0.5, 31.0}));
  CHECK(b.contains({0.5, 30.5}, 1.0));
}

TEST_CASE("logistic closed forms at the reference point") {
  LogisticGrowthModel m;
  CHECK(m.dim() == 3);
  CHECK(m.l_bound(kTheta0) == doctest::Approx(-0.04875).epsilon(1e-12));
  CHECK(m.alpha(0.0, kTheta0) == doctest::Approx(-0.949).epsilon(1e-12));
  CHECK(m.A(0.0, kTheta0) == 0.0);

  // A is the antiderivative of alpha.
  for (double x : {-30.0, -5.0, 0.0, 4.0, 60.0}) {
    double h = 1e-5 * std::max(1.0, std::abs(x));
    double num = (m.A(x + h, kTheta0) - m.A(x - h, kTheta0)) / (2 * h);
    CHECK(num == doctest::Approx(m.alpha(x, kTheta0)).epsilon(1e-7));
    double numd = (m.alpha(x + h, kTheta0) - m.alpha(x - h, kTheta0)) / (2 * h);
    CHECK(numd == doctest::Approx(m.alpha_du(x, kTheta0)).epsilon(1e-6));
  }
}

TEST_CASE("logistic transform round-trips and maps the state space to R") {
  LogisticGrowthModel m;
  for (double u : {1e-6, 0.5, 1.0, 700.0, 1e8}) {
    double x = m.eta(u, kTheta0);
    CHECK(m.eta_inv(x, kTheta0) == doctest::Approx(u).epsilon(1e-12));
    // eta_du matches the numeric slope.
    double h = 1e-6 * u;
    double num = (m.eta(u + h, kTheta0) - m.eta(u - h, kTheta0)) / (2 * h);
    CHECK(num == doctest::Approx(m.eta_du(u, kTheta0)).epsilon(1e-6));
  }
  StateSpace ts = m.transformed_space(kTheta0);
  CHECK(ts.lo == -LogisticGrowthModel::kInf);
  CHECK(ts.hi == LogisticGrowthModel::kInf);
  CHECK(ts.lo < ts.hi);
}

TEST_CASE("logistic phi equals the generic (alpha^2 + alpha')/2 - l") {
  LogisticGrowthModel m;
  std::vector<ParameterVector> thetas = {
      kTheta0, {0.03, 850.0, 0.09}, {0.18, 1200.0, 0.12}, {0.11, 912.0, 0.115}};
  for (const auto& th : thetas) {
    for (double x = -40.0; x <= 120.0; x += 2.5) {
      double generic =
          0.5 * (m.alpha(x, th) * m.alpha(x, th) + m.alpha_du(x, th)) -
          m.l_bound(th);
      CHECK(std::abs(m.phi(x, th) - generic) <= 1e-12 * std::max(1.0, generic));
      CHECK(m.phi(x, th) >= 0.0);
    }
  }
}

TEST_CASE("r_sup dominates phi on right half-lines") {
  LogisticGrowthModel m;
  std::vector<double> grid;
  for (double x = -40.0; x <= 120.0; x += 1.0) grid.push_back(x);
  for (const auto& th :
       {kTheta0, ParameterVector{0.17, 860.0, 0.095}}) {
    for (size_t i = 0; i < grid.size(); ++i) {
      double r = m.r_sup(grid[i], th);
      for (size_t j = i; j < grid.size(); ++j)
        CHECK(r >= m.phi(grid[j], th) - 1e-12);
      // Tail value is the limit of phi as x -> +infinity.
      CHECK(r >= 0.5 * (th[0] / th[2]) * (th[0] / th[2]) - 1e-12);
    }
  }
}

TEST_CASE("dominating rate hits its closed-form value at the anchor point") {
  ParameterBox box = standard_box();
  // prefactor 0.18^2 / (2 * 0.09^2) = 2 and the bracket clips at 1 here.
  CHECK(logistic_lambda(1.0, 1000.0, 1000.0, 1.0, box) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // Monotone in E: more driving noise can only deepen the minimum.
  double prev = 0.0;
  for (double E : {0.0, 0.5, 1.0, 5.0, 20.0}) {
    double lam = logistic_lambda(E, 1000.0, 1080.0, 1.0, box);
    CHECK(lam >= prev);
    prev = lam;
  }
  CHECK_THROWS(logistic_lambda(1.0, -1.0, 1000.0, 1.0, box));
}

TEST_CASE("dominating rate covers r_sup at sampled minima across the box") {
  LogisticGrowthModel m;
  ParameterBox box = standard_box();
  std::vector<double> grid;
  for (double x = -20.0; x <= 80.0; x += 1.0) grid.push_back(x);
  ConditionReport rep =
      check_conditions(m, box, grid, ObsPair{700.0, 900.0, 1.0});
  CHECK(rep.box_error.empty());
  CHECK(rep.lambda_checked);
  CHECK(rep.ok());

  ParameterBox bad({-0.1, 850.0, 0.09}, {0.18, 1200.0, 0.12});
  ConditionReport rep2 = check_conditions(m, bad, grid);
  CHECK(!rep2.box_error.empty());
  CHECK(!rep2.ok());
}

TEST_CASE("drifted brownian model is the phi == 0 reference") {
  DriftedBrownianModel m;
  ParameterVector th = {0.7};
  CHECK(m.dim() == 1);
  CHECK(m.eta(3.25, th) == 3.25);
  CHECK(m.alpha(-2.0, th) == 0.7);
  CHECK(m.A(2.0, th) == doctest::Approx(1.4));
  CHECK(m.phi(5.0, th) == 0.0);
  CHECK(m.r_sup(-1.0, th) == 0.0);
  CHECK(m.l_bound(th) == doctest::Approx(0.245));
  CHECK(m.lambda_bound(1.0, 0.0, 1.0, 1.0, ParameterBox({-1.0}, {1.0})) == 0.0);
}

TEST_CASE("model factory resolves names") {
  CHECK(make_model("logistic")->name() == "logistic");
  CHECK(make_model("brownian")->name() == "brownian");
  CHECK_THROWS(make_model("no-such-model"));
}
