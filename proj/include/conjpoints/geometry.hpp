#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "conjpoints/sds.hpp"

namespace conjpoints {

enum class Causal { kSpacelike, kTimelike };

const char* to_string(Causal c);
/// "spacelike" or "timelike"; throws PreconditionError otherwise.
Causal parse_causal(const std::string& s);

/// Metric e^Omega (g + s dx_{n+1}^2) on R^{n+1} with
/// Omega(x) = s x^T g R(x_{n+1}) x, x the first n coordinates, s = +1 for the
/// spacelike and -1 for the timelike variant.  Calibrated so that the Jacobi
/// equation along the x_{n+1} axis reads v'' = R v (checked against the
/// oscillator, whose conjugate instants sit at multiples of pi).
struct ConformalMetric {
  int n = 0;
  SymmetricForm g;
  MatrixFn R;
  /// dR/dt when known; central differences otherwise.
  MatrixFn dR;
  UniformGrid grid;
  Causal causal = Causal::kSpacelike;

  double omega_sign() const { return causal == Causal::kSpacelike ? 1.0 : -1.0; }
  double dx_sign() const { return omega_sign(); }

  double omega(const Eigen::VectorXd& x) const;
  Eigen::VectorXd omega_gradient(const Eigen::VectorXd& x) const;
  /// (n+1) x (n+1) Gram matrix at x.
  Eigen::MatrixXd metric(const Eigen::VectorXd& x) const;
  /// Flat metric g0 = g + s dx^2.
  Eigen::MatrixXd flat() const;
  /// n_minus of g0.
  int index_of_metric() const;
  /// Point (0, ..., 0, t) of the axis.
  Eigen::VectorXd axis_point(double t) const;
};

ConformalMetric metric_from_morse_sturm(const MorseSturm& ms, Causal causal);

/// gamma[k](i, j) = Gamma^k_ij.
using Christoffel = std::vector<Eigen::MatrixXd>;

/// Levi-Civita symbols with metric derivatives by central differences of
/// step h.  Throws NumericalError when the metric is numerically degenerate.
Christoffel christoffel(const ConformalMetric& m, const Eigen::VectorXd& x, double h);
/// Closed form for a conformally flat metric:
/// Gamma^k_ij = (delta^k_i d_j Omega + delta^k_j d_i Omega - g0_ij g0^{kl} d_l Omega) / 2.
Christoffel christoffel_exact(const ConformalMetric& m, const Eigen::VectorXd& x);
double christoffel_sup(const Christoffel& c);
double christoffel_distance(const Christoffel& a, const Christoffel& b);

/// max over the grid of |Gamma^.(n+1, n+1)| on the axis (the geodesic
/// equation residual of t -> t e_{n+1}).
double geodesic_residual(const ConformalMetric& m, const UniformGrid& grid, double h);

/// max over the grid of |Gamma| on the axis.
double max_christoffel_on_axis(const ConformalMetric& m, const UniformGrid& grid, double h);

struct JacobiRoundTrip {
  double mismatch = 0.0;       ///< sup |R_rec - R| / sup |R| (absolute if R = 0)
  double abs_mismatch = 0.0;
  MorseSturm recovered;        ///< sampled on the grid
};

/// Recovers R(t) = g^{-1} Hess(Omega) / (2 s) on the axis, with Omega read back
/// as log(metric_{n+1,n+1} / s) and the Hessian by second differences of step h.
JacobiRoundTrip jacobi_roundtrip(const ConformalMetric& m, const MorseSturm& ms,
                                 const UniformGrid& grid, double h);

/// log2(e_h / e_{h/2}); +infinity when both errors are at rounding level.
double observed_order(double e_h, double e_half, double floor = 1e-13);

struct GeometryReport {
  double h = 0.0;
  double max_christoffel_on_axis = 0.0;
  double max_christoffel_on_axis_half = 0.0;   ///< at h / 2
  double geodesic_residual = 0.0;
  double geodesic_residual_half = 0.0;
  /// Stencil error of christoffel() against the closed form at off-axis
  /// probe points, where it does not vanish by symmetry.  Probes and the
  /// inertia sweep stay within the normal radius where |Omega| <= 0.1.
  double offaxis_stencil_error = 0.0;
  double offaxis_stencil_error_half = 0.0;
  double offaxis_order = 0.0;
  double curvature_mismatch = 0.0;
  double curvature_mismatch_half = 0.0;
  int index_of_metric = 0;
  bool inertia_constant = false;
};

/// Runs every check above at h and h / 2, plus a metric inertia sweep over
/// `inertia_samples` pseudo-random points near the axis.
GeometryReport verify_geometry(const ConformalMetric& m, const MorseSturm& ms,
                               const UniformGrid& grid, double h = 1e-3,
                               int inertia_samples = 200);

}  // namespace conjpoints
