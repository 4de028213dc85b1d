#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "conjpoints/grid.hpp"
#include "conjpoints/sds.hpp"
#include "conjpoints/symform.hpp"
#include "conjpoints/symplectic.hpp"

namespace conjpoints {

/// (V, omega, xi): a curve of Lagrangians sampled on a uniform grid.
class AbstractSystem {
 public:
  AbstractSystem() = default;
  /// Validates every frame as Lagrangian.
  AbstractSystem(UniformGrid grid, std::vector<Eigen::MatrixXd> frames,
                 std::string provenance = {});

  int n() const { return n_; }
  const UniformGrid& grid() const { return grid_; }
  const std::vector<Eigen::MatrixXd>& frames() const { return frames_; }
  LagrangianFrame frame(int k) const { return LagrangianFrame(frames_.at(k)); }
  const std::string& provenance() const { return provenance_; }

  /// Same curve with every frame mapped by a fixed linear map of R^2n.
  AbstractSystem transformed(const Eigen::MatrixXd& m) const;

 private:
  int n_ = 0;
  UniformGrid grid_;
  std::vector<Eigen::MatrixXd> frames_;
  std::string provenance_;
};

/// xi(t) = Phi(t)^{-1}(L0), framed by Phi(t)^{-1} [0; Id].
AbstractSystem xi_from_system(const SympDiffSystem& x, IntegrationOptions opts = {});
AbstractSystem xi_from_system(const SympDiffSystem& x, const FundamentalSolution& sol);

/// xi'(t_k) as a form on xi(t_k), in the basis of the stored frame columns,
/// from central differences of chart values.  The chart is centered at
/// xi(t_k); the complement defaults to J applied to the orthonormalized frame.
/// order 4 uses the five-point central stencil, shifted off-centre on the
/// nodes next to the ends.
SymmetricForm xi_derivative_form(const AbstractSystem& s, int k,
                                 const std::optional<LagrangianFrame>& complement = {},
                                 int order = 4);
/// Same at time t, which must be an interior grid node.
SymmetricForm xi_derivative_form(const AbstractSystem& s, double t,
                                 const std::optional<LagrangianFrame>& complement = {},
                                 int order = 4);

/// Push-forward of a form on L0 = Phi(t)(xi(t)) to xi(t), in the basis of
/// `frame` (columns spanning xi(t)).
SymmetricForm pushforward(const SymmetricForm& form_on_l0, const Eigen::MatrixXd& phi,
                          const Eigen::MatrixXd& frame);

/// max over interior grid nodes of ||xi'(t) - pushforward(-B(t))|| / (1 + ||B(t)||)
/// in the basis Phi(t)^{-1} [0; Id] of xi(t).  xi'(t) comes from the
/// five-point central difference of chart values with step h / substeps,
/// the off-grid Phi by single RK4 steps from the node.
double pushforward_law_defect(const SympDiffSystem& x, const FundamentalSolution& sol,
                              int substeps = 8);

struct AbstractIndex {
  bool nondegenerate = false;
  int index = 0;  ///< n_minus of -xi'
  std::optional<int> first_failure;
};

AbstractIndex abstract_index(const AbstractSystem& s, double zero_tol = kDefaultZeroTol,
                             int order = 4);

/// Orthonormal frames of xi, each aligned to its predecessor by the
/// orthogonal Procrustes factor.
std::vector<Eigen::MatrixXd> aligned_frames(const AbstractSystem& s);

/// psi(t) = J U(t)^T with U = (F | -J F), F the aligned frame; psi(t) maps
/// xi(t) onto L0 and is symplectic and orthogonal.
std::vector<Eigen::MatrixXd> realization_psi(const AbstractSystem& s);

/// X(t) = Phi'(t) Phi(t)^{-1} with Phi = psi(t) psi(a)^{-1}, by central
/// differences of the given order (2 or 4), projected onto sp(2n).  Requires
/// xi(a) = L0.
SympDiffSystem realize_system(const AbstractSystem& s, int order = 4);

/// Instants where xi(t) meets xi(a): zeros of det(F(a)^T J F(t)) on the
/// aligned frames, located by linear interpolation.
ConjugateReport abstract_conjugate_instants(const AbstractSystem& s,
                                            const DetectOptions& opts = {});

}  // namespace conjpoints
