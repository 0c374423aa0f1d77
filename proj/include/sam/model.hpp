// Scalar diffusion models after the unit-diffusion transform, plus the
// parameter-box plumbing. A model exposes the transformed drift alpha, its
// antiderivative A, the lower bound l on (alpha^2 + alpha')/2, the residual
// phi = (alpha^2 + alpha')/2 - l >= 0, the right-tail envelope
// r(u) = sup_{z >= u} phi(z), and a parameter-free rate bound lambda that
// dominates r at the bridge minimum uniformly over the box.
#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sam {

using ParameterVector = std::vector<double>;

struct ParameterBox {
  std::vector<double> lo, hi;

  ParameterBox() = default;
  ParameterBox(std::vector<double> lo_, std::vector<double> hi_);

  int dim() const { return static_cast<int>(lo.size()); }
  double width(int k) const { return hi[k] - lo[k]; }
  bool contains(const ParameterVector& th, double tol = 0.0) const;
  ParameterVector midpoint() const;
};

struct StateSpace {
  double lo, hi;  // open interval, may be infinite
};

struct ObsPair {
  double v, w, t;  // consecutive observations (original scale) and their gap
};

class TransformedModel {
 public:
  virtual ~TransformedModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;

  // Unit-diffusion transform and its derivative/inverse (u on the original
  // scale, x on the transformed scale).
  virtual double eta(double u, const ParameterVector& th) const = 0;
  virtual double eta_du(double u, const ParameterVector& th) const = 0;
  virtual double eta_inv(double x, const ParameterVector& th) const = 0;

  // Transformed drift, its derivative, and antiderivative with A(0) = 0.
  virtual double alpha(double x, const ParameterVector& th) const = 0;
  virtual double alpha_du(double x, const ParameterVector& th) const = 0;
  virtual double A(double x, const ParameterVector& th) const = 0;

  virtual double l_bound(const ParameterVector& th) const = 0;

  virtual double phi(double x, const ParameterVector& th) const;

  // sup of phi over [x, infinity).
  virtual double r_sup(double x, const ParameterVector& th) const = 0;

  // Parameter-free dominating rate: lambda >= r_sup(min, th) for every th in
  // the box, where min is the bridge minimum implied by (E, v, w, t, th).
  virtual double lambda_bound(double E, double v, double w, double t,
                              const ParameterBox& box) const = 0;

  // Original-scale SDE coefficients.
  virtual double drift_b(double u, const ParameterVector& th) const = 0;
  virtual double diff_sigma(double u, const ParameterVector& th) const = 0;

  virtual StateSpace state_space() const = 0;

  // Transformed-scale image of the state space (ordered).
  StateSpace transformed_space(const ParameterVector& th) const;

  // Empty string when the box is admissible, else a diagnostic.
  virtual std::string check_box(const ParameterBox& box) const;
};

// dV = delta V (1 - V/c) ds + sigma V dB on (0, inf); th = (delta, c, sigma).
class LogisticGrowthModel : public TransformedModel {
 public:
  std::string name() const override { return "logistic"; }
  int dim() const override { return 3; }
  double eta(double u, const ParameterVector& th) const override;
  double eta_du(double u, const ParameterVector& th) const override;
  double eta_inv(double x, const ParameterVector& th) const override;
  double alpha(double x, const ParameterVector& th) const override;
  double alpha_du(double x, const ParameterVector& th) const override;
  double A(double x, const ParameterVector& th) const override;
  double l_bound(const ParameterVector& th) const override;
  double phi(double x, const ParameterVector& th) const override;
  double r_sup(double x, const ParameterVector& th) const override;
  double lambda_bound(double E, double v, double w, double t,
                      const ParameterBox& box) const override;
  double drift_b(double u, const ParameterVector& th) const override;
  double diff_sigma(double u, const ParameterVector& th) const override;
  StateSpace state_space() const override { return {0.0, kInf}; }
  std::string check_box(const ParameterBox& box) const override;

  static constexpr double kInf = std::numeric_limits<double>::infinity();
};

// dV = mu ds + dB on R; th = (mu). phi == 0, so every bridge proposal is
// accepted and the density estimator is exact; kept as the zero-variance
// reference model.
class DriftedBrownianModel : public TransformedModel {
 public:
  std::string name() const override { return "brownian"; }
  int dim() const override { return 1; }
  double eta(double u, const ParameterVector&) const override { return u; }
  double eta_du(double, const ParameterVector&) const override { return 1.0; }
  double eta_inv(double x, const ParameterVector&) const override { return x; }
  double alpha(double, const ParameterVector& th) const override { return th[0]; }
  double alpha_du(double, const ParameterVector&) const override { return 0.0; }
  double A(double x, const ParameterVector& th) const override { return th[0] * x; }
  double l_bound(const ParameterVector& th) const override {
    return 0.5 * th[0] * th[0];
  }
  double phi(double, const ParameterVector&) const override { return 0.0; }
  double r_sup(double, const ParameterVector&) const override { return 0.0; }
  double lambda_bound(double, double, double, double,
                      const ParameterBox&) const override {
    return 0.0;
  }
  double drift_b(double, const ParameterVector& th) const override { return th[0]; }
  double diff_sigma(double, const ParameterVector&) const override { return 1.0; }
  StateSpace state_space() const override {
    return {-LogisticGrowthModel::kInf, LogisticGrowthModel::kInf};
  }
};

std::unique_ptr<TransformedModel> make_model(const std::string& name);

// Dominating rate for the logistic model, also usable standalone.
double logistic_lambda(double E, double v, double w, double t,
                       const ParameterBox& box);

struct ConditionReport {
  std::string box_error;      // empty when the box is admissible
  double phi_min = 0.0;       // min of phi over the u x theta grid
  double r_margin = 0.0;      // min over grid of r(u) - max_{z >= u} phi(z)
  double lambda_margin = 0.0; // min over draws of lambda - r_sup(min)
  bool lambda_checked = false;
  bool ok(double tol = 1e-9) const {
    return box_error.empty() && phi_min >= -tol && r_margin >= -tol &&
           (!lambda_checked || lambda_margin >= -tol);
  }
};

// Grid diagnostic of the model conditions: phi >= 0, r dominates phi on
// right half-lines, and (when an observation pair is supplied) lambda
// dominates r at the sampled minimum for 1000 keyed (E, theta) draws.
ConditionReport check_conditions(const TransformedModel& model,
                                 const ParameterBox& box,
                                 const std::vector<double>& u_grid,
                                 std::optional<ObsPair> pair = {});

}  // namespace sam
