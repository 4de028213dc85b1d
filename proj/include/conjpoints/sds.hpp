#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conjpoints/grid.hpp"
#include "conjpoints/symform.hpp"
#include "conjpoints/symplectic.hpp"

namespace conjpoints {

using CoefficientFn = std::function<SpBlocks(double)>;
using MatrixFn = std::function<Eigen::MatrixXd(double)>;

inline constexpr int kDefaultGridN = 4096;

/// Linear system v' = A v + B alpha, alpha' = C v - A^T alpha on [a, b] with
/// coefficient curve X(t) in sp(2n), either given analytically or sampled on
/// the grid and interpolated piecewise-quintically.
class SympDiffSystem {
 public:
  SympDiffSystem() = default;

  static SympDiffSystem analytic(int n, UniformGrid grid, CoefficientFn coeff,
                                 std::string analytic_id = {});
  static SympDiffSystem sampled(int n, UniformGrid grid, const std::vector<SpBlocks>& samples);

  int n() const { return n_; }
  const UniformGrid& grid() const { return grid_; }
  double a() const { return grid_.a(); }
  double b() const { return grid_.b(); }

  bool is_sampled() const { return sampled_; }
  const std::string& analytic_id() const { return analytic_id_; }

  SpBlocks coefficients(double t) const;
  Eigen::MatrixXd matrix(double t) const;
  /// Coefficients at grid index k (the stored sample for sampled systems).
  SpBlocks grid_coefficients(int k) const;
  /// dX/dt: the interpolant's derivative for sampled systems, a fourth-order
  /// central difference of the evaluator otherwise.
  Eigen::MatrixXd matrix_derivative(double t) const;

  /// Same system on a different grid (analytic systems only).
  SympDiffSystem regridded(int N) const;

 private:
  int n_ = 0;
  UniformGrid grid_;
  bool sampled_ = false;
  std::string analytic_id_;
  CoefficientFn coeff_;
  MatrixInterpolant interp_;
};

struct Nondegeneracy {
  bool nondegenerate = false;
  int index = 0;             ///< n_minus of B when nondegenerate
  std::optional<int> first_failure;  ///< grid index where B degenerates or changes inertia
};

/// B(t) invertible with constant inertia across the grid.
Nondegeneracy check_nondegenerate(const SympDiffSystem& x, double zero_tol = kDefaultZeroTol);

/// Morse-Sturm system v'' = R v with R g-symmetric: A = 0, B = g^{-1},
/// C = g R.
struct MorseSturm {
  SymmetricForm g;
  MatrixFn R;
  UniformGrid grid;
  /// Present when R comes from grid samples (it is then their interpolant).
  std::optional<std::vector<Eigen::MatrixXd>> R_samples;

  static MorseSturm sampled(SymmetricForm g, UniformGrid grid, std::vector<Eigen::MatrixXd> R);

  int n() const { return g.dim(); }
  /// max over the grid of ||gR - (gR)^T||.
  double symmetry_defect() const;
  SympDiffSystem to_system() const;
};

/// Morse-Sturm data of a system with A = 0 and B constant (within tol, relative
/// to 1 + |B|); throws PreconditionError otherwise.  Sampled systems give
/// sampled R on their grid.
MorseSturm as_morse_sturm(const SympDiffSystem& x, double tol = 1e-10);

/// Isomorphism phi(t) = [[Z, 0], [Z^{-T} W, Z^{-T}]] between systems.
struct IsoPair {
  MatrixFn Z;
  MatrixFn W;
  /// Derivatives; when empty they are taken by central differences.
  MatrixFn dZ;
  MatrixFn dW;

  static IsoPair identity(int n);
  static IsoPair sampled(UniformGrid grid, std::vector<Eigen::MatrixXd> Z,
                         std::vector<Eigen::MatrixXd> W);

  Eigen::MatrixXd phi(double t) const;
  Eigen::MatrixXd Z_derivative(double t, double h) const;
  Eigen::MatrixXd W_derivative(double t, double h) const;
};

// ---------------------------------------------------------------------------
// Fundamental matrix

struct IntegrationOptions {
  double reproject_tol = 1e-10;
  double drift_ceiling = 1e-6;
};

struct FundamentalSolution {
  UniformGrid grid;
  std::vector<Eigen::MatrixXd> phi;
  double max_drift = 0.0;
  int reprojections = 0;
};

/// Phi' = X Phi, Phi(a) = Id by classical RK4 on the system grid.  A step
/// whose symplectic drift exceeds reproject_tol gets one correction
/// Phi <- Phi - 1/2 J^{-1} Phi^{-T} (Phi^T J Phi - J).
FundamentalSolution fundamental_matrix(const SympDiffSystem& x, IntegrationOptions opts = {});

/// Phi(t) for t off the grid: one RK4 step from the nearest grid point at or
/// below t.
Eigen::MatrixXd fundamental_at(const SympDiffSystem& x, const FundamentalSolution& sol,
                               double t);
/// One RK4 step of signed length s from sol.phi[k].
Eigen::MatrixXd fundamental_from_node(const SympDiffSystem& x, const FundamentalSolution& sol,
                                      int k, double s);

// ---------------------------------------------------------------------------
// Conjugate instants

struct DetectOptions {
  double zero_tol = 1e-7;   ///< on d / max|d|
  double rank_tol = 1e-8;
  double t_tol = 1e-10;     ///< bisection refinement
  std::optional<double> exclusion_radius;  ///< default 5 (b - a) / N
  double crossing_tol = 1e-6;  ///< relative zero band of the crossing form
  int max_isolated_run = 3;    ///< longer sub-threshold runs become clusters
  IntegrationOptions integration;
};

struct ConjugateInstant {
  double t = 0.0;
  int multiplicity = 0;
  std::optional<int> signature;  ///< empty when unavailable
  bool regular = false;          ///< crossing form nondegenerate
};

struct Cluster {
  double lo = 0.0;
  double hi = 0.0;
};

struct ConjugateReport {
  std::vector<ConjugateInstant> instants;
  std::vector<Cluster> clusters;
  std::vector<double> times;
  std::vector<double> d_trace;   ///< raw d(t) on the grid
  double d_scale = 0.0;          ///< max |d| over the grid
  double exclusion_radius = 0.0;
  double scan_start = 0.0;       ///< first scanned instant (exclusion plus the tail of the zero at a)
  double zero_tol = 0.0;
  double max_drift = 0.0;
  std::string signature_convention;
};

extern const char* const kSignatureConvention;

/// d(t) = det of the upper-right n x n block of Phi(t).
double conjugate_determinant(const Eigen::MatrixXd& phi);

ConjugateReport conjugate_instants(const SympDiffSystem& x, const DetectOptions& opts = {});
ConjugateReport conjugate_instants(const SympDiffSystem& x, const FundamentalSolution& sol,
                                   const DetectOptions& opts = {});

struct CrossingData {
  int multiplicity = 0;
  int signature = 0;
  bool regular = false;
};

/// Multiplicity dim(xi(t) cap L0) and signature of the crossing form, i.e.
/// xi'(t) restricted to the intersection.
CrossingData crossing_data(const SympDiffSystem& x, double t, double rank_tol = 1e-6,
                           double crossing_tol = 1e-6);

/// Sum of crossing signatures; throws UnavailableError unless every crossing
/// is isolated with a nondegenerate crossing form.
int maslov_regular(const SympDiffSystem& x, const DetectOptions& opts = {});

// ---------------------------------------------------------------------------
// Isomorphisms and reduction

SympDiffSystem apply_isomorphism(const SympDiffSystem& x, const IsoPair& iso);

struct Reduction {
  SympDiffSystem system;
  IsoPair iso;
  double max_A_residual = 0.0;     ///< sup |A~|
  double max_B_defect = 0.0;       ///< sup ||Z B Z^T - B(a)||
  double max_group_defect = 0.0;   ///< sup ||(BW - A)B + B(BW - A)^T||
};

/// Transports X to a system with B~ == B(a) using W = 0 and
/// Z' = -1/2 Z B' B^{-1}, Z(a) = Id.
Reduction flatten_B(const SympDiffSystem& x);

struct MorseSturmReduction {
  MorseSturm ms;
  SympDiffSystem system;  ///< the transported system (A~ = 0, B~ = B(a))
  IsoPair iso;            ///< composite of both stages
  double max_A_residual = 0.0;
  double max_B_defect = 0.0;
  double max_group_defect = 0.0;
};

/// Both stages: flatten_B, then W = 1/2 (B^{-1} A + A^T B^{-1}) and
/// Z' = Z (B W - A).
MorseSturmReduction to_morse_sturm(const SympDiffSystem& x);

}  // namespace conjpoints
