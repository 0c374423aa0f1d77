#include "sam/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sam/bridge.hpp"
#include "sam/rng.hpp"

namespace sam {

ParameterBox::ParameterBox(std::vector<double> lo_, std::vector<double> hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("ParameterBox: mismatched or empty bounds");
  for (size_t k = 0; k < lo.size(); ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || !(lo[k] < hi[k]))
      throw std::invalid_argument("ParameterBox: need finite lo < hi");
  }
}

bool ParameterBox::contains(const ParameterVector& th, double tol) const {
  if (th.size() != lo.size()) return false;
  for (size_t k = 0; k < lo.size(); ++k)
    if (th[k] < lo[k] - tol || th[k] > hi[k] + tol) return false;
  return true;
}

ParameterVector ParameterBox::midpoint() const {
  ParameterVector m(lo.size());
  for (size_t k = 0; k < lo.size(); ++k) m[k] = 0.5 * (lo[k] + hi[k]);
  return m;
}

double TransformedModel::phi(double x, const ParameterVector& th) const {
  double a = alpha(x, th);
  return 0.5 * (a * a + alpha_du(x, th)) - l_bound(th);
}

StateSpace TransformedModel::transformed_space(const ParameterVector& th) const {
  StateSpace s = state_space();
  auto map_end = [&](double u, double sign) {
    if (!std::isfinite(u)) {
      // eta is monotone; probe the direction of the matching infinity.
      return sign * LogisticGrowthModel::kInf;
    }
    return eta(u, th);
  };
  double a, b;
  // Determine monotonicity from the derivative at an interior point.
  double probe = std::isfinite(s.lo) && std::isfinite(s.hi)
                     ? 0.5 * (s.lo + s.hi)
                     : (std::isfinite(s.lo) ? s.lo + 1.0
                                            : (std::isfinite(s.hi) ? s.hi - 1.0 : 0.0));
  bool increasing = eta_du(probe, th) > 0.0;
  if (increasing) {
    a = map_end(s.lo, -1.0);
    b = map_end(s.hi, 1.0);
  } else {
    a = map_end(s.hi, -1.0);
    b = map_end(s.lo, 1.0);
  }
  return {a, b};
}

std::string TransformedModel::check_box(const ParameterBox& box) const {
  if (box.dim() != dim()) return "box dimension does not match the model";
  return {};
}

// ------------------------- logistic growth -------------------------

double LogisticGrowthModel::eta(double u, const ParameterVector& th) const {
  return -std::log(u) / th[2];
}

double LogisticGrowthModel::eta_du(double u, const ParameterVector& th) const {
  return -1.0 / (th[2] * u);
}

double LogisticGrowthModel::eta_inv(double x, const ParameterVector& th) const {
  return std::exp(-th[2] * x);
}

double LogisticGrowthModel::alpha(double x, const ParameterVector& th) const {
  double delta = th[0], c = th[1], sigma = th[2];
  return 0.5 * sigma - delta / sigma +
         (delta / (sigma * c)) * std::exp(-sigma * x);
}

double LogisticGrowthModel::alpha_du(double x, const ParameterVector& th) const {
  double delta = th[0], c = th[1], sigma = th[2];
  return -(delta / c) * std::exp(-sigma * x);
}

double LogisticGrowthModel::A(double x, const ParameterVector& th) const {
  double delta = th[0], c = th[1], sigma = th[2];
  return (0.5 * sigma - delta / sigma) * x +
         (delta / (sigma * sigma * c)) * (1.0 - std::exp(-sigma * x));
}

double LogisticGrowthModel::l_bound(const ParameterVector& th) const {
  double delta = th[0], sigma = th[2];
  return sigma * sigma / 8.0 - 0.5 * delta;
}

double LogisticGrowthModel::phi(double x, const ParameterVector& th) const {
  double delta = th[0], c = th[1], sigma = th[2];
  double k = (delta / (sigma * c)) * std::exp(-sigma * x);
  double diff = k - delta / sigma;
  return 0.5 * diff * diff;
}

double LogisticGrowthModel::r_sup(double x, const ParameterVector& th) const {
  // phi is a quadratic in the decreasing quantity k(z); on [x, inf) its sup
  // sits at one of the two ends of the k-range.
  double delta = th[0], sigma = th[2];
  double tail = 0.5 * (delta / sigma) * (delta / sigma);
  return std::max(phi(x, th), tail);
}

double LogisticGrowthModel::lambda_bound(double E, double v, double w, double t,
                                         const ParameterBox& box) const {
  return logistic_lambda(E, v, w, t, box);
}

double LogisticGrowthModel::drift_b(double u, const ParameterVector& th) const {
  return th[0] * u * (1.0 - u / th[1]);
}

double LogisticGrowthModel::diff_sigma(double u, const ParameterVector& th) const {
  return th[2] * u;
}

std::string LogisticGrowthModel::check_box(const ParameterBox& box) const {
  if (box.dim() != 3) return "box dimension does not match the model";
  if (!(box.lo[0] > 0.0 && box.lo[1] > 0.0 && box.lo[2] > 0.0))
    return "degenerate box: all lower bounds must be positive";
  return {};
}

double logistic_lambda(double E, double v, double w, double t,
                       const ParameterBox& box) {
  if (box.dim() != 3) throw std::invalid_argument("logistic_lambda: box dim != 3");
  if (!(v > 0.0 && w > 0.0 && t > 0.0 && E >= 0.0))
    throw std::domain_error("logistic_lambda: need v, w, t positive and E >= 0");
  double delta_u = box.hi[0], c_l = box.lo[1];
  double sigma_l = box.lo[2], sigma_u = box.hi[2];
  double lr = std::log(w / v);
  double q = std::log(v * w) +
             std::sqrt(2.0 * t * sigma_u * sigma_u * E + lr * lr);
  double ratio = std::exp(0.5 * q) / c_l - 1.0;
  double bracket = std::max(ratio * ratio, 1.0);
  return (delta_u * delta_u / (2.0 * sigma_l * sigma_l)) * bracket;
}

std::unique_ptr<TransformedModel> make_model(const std::string& name) {
  if (name == "logistic") return std::make_unique<LogisticGrowthModel>();
  if (name == "brownian") return std::make_unique<DriftedBrownianModel>();
  throw std::invalid_argument("make_model: unknown model '" + name + "'");
}

ConditionReport check_conditions(const TransformedModel& model,
                                 const ParameterBox& box,
                                 const std::vector<double>& u_grid,
                                 std::optional<ObsPair> pair) {
  ConditionReport rep;
  rep.box_error = model.check_box(box);
  if (!rep.box_error.empty()) return rep;
  if (u_grid.empty())
    throw std::invalid_argument("check_conditions: empty grid");

  // theta grid: corners plus midpoints, 3 levels per coordinate.
  int d = box.dim();
  int combos = 1;
  for (int k = 0; k < d; ++k) combos *= 3;
  std::vector<ParameterVector> thetas;
  thetas.reserve(static_cast<size_t>(combos));
  for (int c = 0; c < combos; ++c) {
    ParameterVector th(static_cast<size_t>(d));
    int rem = c;
    for (int k = 0; k < d; ++k) {
      int level = rem % 3;
      rem /= 3;
      th[static_cast<size_t>(k)] =
          level == 0 ? box.lo[static_cast<size_t>(k)]
                     : (level == 1 ? 0.5 * (box.lo[static_cast<size_t>(k)] +
                                            box.hi[static_cast<size_t>(k)])
                                   : box.hi[static_cast<size_t>(k)]);
    }
    thetas.push_back(std::move(th));
  }

  std::vector<double> grid = u_grid;
  std::sort(grid.begin(), grid.end());

  double phi_min = LogisticGrowthModel::kInf;
  double r_margin = LogisticGrowthModel::kInf;
  for (const auto& th : thetas) {
    double right_max = -LogisticGrowthModel::kInf;
    for (size_t i = grid.size(); i-- > 0;) {
      double p = model.phi(grid[i], th);
      phi_min = std::min(phi_min, p);
      right_max = std::max(right_max, p);
      r_margin = std::min(r_margin, model.r_sup(grid[i], th) - right_max);
    }
  }
  rep.phi_min = phi_min;
  rep.r_margin = r_margin;

  if (pair) {
    rep.lambda_checked = true;
    double margin = LogisticGrowthModel::kInf;
    Stream st(make_key(0xC0D1710Full, 0, 0, Purpose::misc));
    for (int i = 0; i < 1000; ++i) {
      double E = st.exponential();
      ParameterVector th(static_cast<size_t>(d));
      for (int k = 0; k < d; ++k) {
        th[static_cast<size_t>(k)] =
            box.lo[static_cast<size_t>(k)] +
            box.width(k) * st.u01();
      }
      double lam = model.lambda_bound(E, pair->v, pair->w, pair->t, box);
      double x = model.eta(pair->v, th);
      double y = model.eta(pair->w, th);
      BridgeMin bm = bridge_minimum(BridgeFrame{x, y, pair->t}, E);
      margin = std::min(margin, lam - model.r_sup(bm.m, th));
    }
    rep.lambda_margin = margin;
  }
  return rep;
}

}  // namespace sam
