#include "conjpoints/symform.hpp"

#include <cmath>
#include <numbers>

#include "conjpoints/errors.hpp"

namespace conjpoints {

SymmetricForm::SymmetricForm(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw PreconditionError("SymmetricForm: matrix is not square");
  m_ = 0.5 * (m + m.transpose());
}

SymmetricForm SymmetricForm::Zero(int n) { return SymmetricForm(Eigen::MatrixXd::Zero(n, n)); }

SymmetricForm SymmetricForm::Identity(int n) {
  return SymmetricForm(Eigen::MatrixXd::Identity(n, n));
}

SymmetricForm SymmetricForm::Diagonal(const Eigen::VectorXd& d) {
  return SymmetricForm(Eigen::MatrixXd(d.asDiagonal()));
}

Eigen::VectorXd SymmetricForm::eigenvalues() const {
  if (m_.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

SymmetricForm SymmetricForm::congruent(const Eigen::MatrixXd& z) const {
  return SymmetricForm(z.transpose() * m_ * z);
}

Inertia inertia(const SymmetricForm& s, double zero_tol) {
  if (zero_tol < 0) throw PreconditionError("inertia: zero_tol must be nonnegative");
  Inertia out;
  const Eigen::VectorXd ev = s.eigenvalues();
  const double scale = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) {
    out.n_zero = static_cast<int>(ev.size());
    return out;
  }
  const double band = zero_tol * scale;
  for (double v : ev) {
    if (v > band) {
      ++out.n_plus;
    } else if (v < -band) {
      ++out.n_minus;
    } else {
      ++out.n_zero;
    }
  }
  return out;
}

double distance_to_degenerate(const SymmetricForm& s) {
  const Eigen::VectorXd ev = s.eigenvalues();
  return ev.size() ? ev.cwiseAbs().minCoeff() : 0.0;
}

FixedInertiaCoords2::FixedInertiaCoords2(Inertia in) : inertia_(in) {
  if (in.n_zero != 0 || in.n_plus + in.n_minus != 2) {
    throw PreconditionError("FixedInertiaCoords2: needs a nondegenerate 2x2 inertia");
  }
  // Slot order: (1,1) puts the positive eigenvalue first.
  sign_first_ = in.n_plus > 0 ? 1.0 : -1.0;
  sign_second_ = in.n_minus > 0 ? -1.0 : 1.0;
}

Eigen::Vector3d FixedInertiaCoords2::to_coords(const SymmetricForm& s, double theta_hint) const {
  if (s.dim() != 2) throw PreconditionError("FixedInertiaCoords2: form is not 2x2");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.matrix());
  const Eigen::Vector2d ev = es.eigenvalues();
  const Eigen::Matrix2d vec = es.eigenvectors();
  // Eigen sorts ascending.  For (1,1) and (2,0) the first slot is the larger
  // eigenvalue when signs differ and the smaller magnitude otherwise.
  int first = 0;
  if (sign_first_ > 0 && sign_second_ < 0) {
    first = 1;
  } else if (sign_first_ < 0 && sign_second_ < 0) {
    first = 1;
  }
  const int second = 1 - first;
  if (ev(first) * sign_first_ <= 0 || ev(second) * sign_second_ <= 0) {
    throw PreconditionError("FixedInertiaCoords2: form has the wrong inertia");
  }
  double theta = std::atan2(vec(1, first), vec(0, first));
  const double pi = std::numbers::pi;
  theta += pi * std::round((theta_hint - theta) / pi);
  return {std::log(std::abs(ev(first))), std::log(std::abs(ev(second))), theta};
}

SymmetricForm FixedInertiaCoords2::from_coords(const Eigen::Vector3d& k) const {
  const double c = std::cos(k(2));
  const double s = std::sin(k(2));
  Eigen::Vector2d e1(c, s);
  Eigen::Vector2d e2(-s, c);
  Eigen::Matrix2d m = sign_first_ * std::exp(k(0)) * e1 * e1.transpose() +
                      sign_second_ * std::exp(k(1)) * e2 * e2.transpose();
  return SymmetricForm(Eigen::MatrixXd(m));
}

std::vector<SymmetricForm> index_path(const SymmetricForm& s0, const SymmetricForm& s1,
                                      int steps) {
  if (s0.dim() != 2 || s1.dim() != 2) {
    throw PreconditionError("index_path: only 2x2 forms are supported");
  }
  if (steps < 1) throw PreconditionError("index_path: steps must be positive");
  const Inertia i0 = inertia(s0);
  const Inertia i1 = inertia(s1);
  if (i0.n_zero != 0 || i1.n_zero != 0) {
    throw PreconditionError("index_path: endpoints must be nondegenerate");
  }
  if (!(i0 == i1)) throw PreconditionError("index_path: endpoint inertias differ");

  const FixedInertiaCoords2 coords(i0);
  const Eigen::Vector3d k0 = coords.to_coords(s0);
  const Eigen::Vector3d k1 = coords.to_coords(s1, k0(2));
  std::vector<SymmetricForm> out;
  out.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    const double lam = static_cast<double>(i) / steps;
    if (i == 0) {
      out.push_back(s0);
    } else if (i == steps) {
      out.push_back(s1);
    } else {
      out.push_back(coords.from_coords((1.0 - lam) * k0 + lam * k1));
    }
  }
  return out;
}

}  // namespace conjpoints
