#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "netgame/errors.hpp"
#include "netgame/game.hpp"

namespace netgame {

/// Solution of a sphere-constrained quadratic maximization. For PSD M the
/// objective is convex, so the maximizer sits on the boundary and satisfies
/// (M z + q) = 2 * lambda * z with lambda >= lambda_max(M) / 2.
struct SphereMaxResult {
  Vector z;              ///< maximizer
  double lambda = 0.0;   ///< KKT multiplier of the squared-norm constraint
  bool hard_case = false;  ///< an explicit top-eigenvector component was needed
  int iterations = 0;    ///< secular-equation iterations
};

namespace detail {

/// Secular function || (2*lambda*I - M)^{-1} q ||^2 - r2 evaluated in the
/// eigenbasis, together with its derivative. Entries of `qt` that are exactly
/// zero are skipped, which keeps deflated top components out of the sum.
inline void secular_eval(const Vector& w, const Vector& qt, double r2, double lam,
                         double& phi, double& dphi) {
  phi = -r2;
  dphi = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (qt(i) == 0.0) continue;
    const double denom = 2.0 * lam - w(i);
    const double t = qt(i) / denom;
    phi += t * t;
    dphi += -4.0 * t * t / denom;
  }
}

/// Eigenbasis coefficients qt_i / (2*lambda - w_i).
inline Vector secular_coefficients(const Vector& w, const Vector& qt, double lam) {
  Vector zt = Vector::Zero(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (qt(i) == 0.0) continue;
    zt(i) = qt(i) / (2.0 * lam - w(i));
  }
  return zt;
}

/// Completes a boundary solution whose top-eigenspace coefficients are not
/// determined by the secular equation: zeroes the coefficients of the top set
/// and assigns the whole remaining norm to the last top coordinate. The sign
/// follows q's component on that eigenvector when present; otherwise the
/// eigenvector's first coordinate of noticeable magnitude is made positive.
inline Vector complete_top(const Matrix& v, Vector zt, Eigen::Index top_begin, double r2,
                           double q_top_coeff) {
  const Eigen::Index d = zt.size();
  for (Eigen::Index i = top_begin; i < d; ++i) zt(i) = 0.0;
  const double t = std::sqrt(std::max(0.0, r2 - zt.squaredNorm()));
  double sign = 1.0;
  if (q_top_coeff != 0.0) {
    sign = q_top_coeff > 0.0 ? 1.0 : -1.0;
  } else {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(v(i, d - 1)) > 1e-14) {
        sign = v(i, d - 1) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
  }
  zt(d - 1) = sign * t;
  return v * zt;
}

}  // namespace detail

/// Global maximizer of f(z) = z' M z / 2 + q' z over ||z||^2 <= r2, given the
/// eigendecomposition of the symmetric PSD matrix M. The KKT multiplier is
/// found by a safeguarded Newton iteration on the secular equation, bracketed
/// inside (lambda_max/2, lambda_max/2 + ||q|| / (2 sqrt(r2)) + lambda_max]
/// and expanded geometrically if needed. When q is orthogonal to the top
/// eigenspace (within 1e-12 * ||q||) and the secular path cannot reach the
/// sphere, the multiplier locks to lambda_max/2 and a top-eigenvector
/// component makes up the remaining norm.
inline SphereMaxResult sphere_max(const Eigen::SelfAdjointEigenSolver<Matrix>& eig,
                                  const Vector& q, double r2) {
  const Vector& w = eig.eigenvalues();
  const Matrix& v = eig.eigenvectors();
  const Eigen::Index d = w.size();

  SphereMaxResult result;
  if (d == 0) {
    result.z = Vector::Zero(0);
    return result;
  }
  if (q.size() != d) throw StructuralError("sphere_max: q length does not match M");
  if (r2 < 0.0) throw PreconditionError("sphere_max: negative squared radius");
  if (w.minCoeff() < -1e-10)
    throw PreconditionError("sphere_max: M is not positive semidefinite");

  const double w_top = w(d - 1);
  const Vector qt_full = v.transpose() * q;
  const double q_norm = q.norm();

  // Top eigenspace and the hard-case orthogonality test.
  const double eps_deg = 1e-12 * std::max(1.0, std::abs(w_top));
  double q_top_sq = 0.0;
  Eigen::Index top_begin = d;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    if (w_top - w(i) > eps_deg) break;
    q_top_sq += qt_full(i) * qt_full(i);
    top_begin = i;
  }
  const bool orthogonal_top = std::sqrt(q_top_sq) <= 1e-12 * q_norm;

  if (r2 == 0.0) {
    result.z = Vector::Zero(d);
    result.lambda = w_top / 2.0;
    result.hard_case = orthogonal_top;
    return result;
  }

  Vector qt = qt_full;
  if (orthogonal_top) {
    for (Eigen::Index i = top_begin; i < d; ++i) qt(i) = 0.0;
    // Norm reachable with the multiplier at its lower limit.
    double reach = 0.0;
    for (Eigen::Index i = 0; i < top_begin; ++i) {
      const double t = qt(i) / (w_top - w(i));
      reach += t * t;
    }
    if (reach <= r2) {
      const double lam = w_top / 2.0;
      result.z = detail::complete_top(v, detail::secular_coefficients(w, qt, lam),
                                      top_begin, r2, qt_full(d - 1));
      result.lambda = lam;
      result.hard_case = true;
      return result;
    }
  }

  // Bracket the secular root. phi decreases from +inf (or reach - r2 > 0 in
  // the deflated case) to -r2.
  const double pole = w_top / 2.0;
  double eps = 1e-12 * std::max(1.0, std::abs(w_top));
  double lo = pole + eps;
  double phi, dphi;
  detail::secular_eval(w, qt, r2, lo, phi, dphi);
  while (phi < 0.0 && eps > 1e-300) {
    eps /= 8.0;
    lo = pole + eps;
    detail::secular_eval(w, qt, r2, lo, phi, dphi);
  }
  if (phi < 0.0) {
    // The boundary is unreachable in floating point: q's top component is too
    // small to matter. Treat as a hard case anchored at the pole.
    result.z = detail::complete_top(v, detail::secular_coefficients(w, qt, lo), top_begin,
                                    r2, qt_full(d - 1));
    result.lambda = lo;
    result.hard_case = true;
    return result;
  }

  double hi = pole + q_norm / (2.0 * std::sqrt(r2)) + std::max(w_top, 0.0) + eps;
  {
    double phi_hi, dphi_hi;
    detail::secular_eval(w, qt, r2, hi, phi_hi, dphi_hi);
    int expand = 0;
    while (phi_hi > 0.0 && expand++ < 200) {
      hi = lo + 2.0 * (hi - lo);
      detail::secular_eval(w, qt, r2, hi, phi_hi, dphi_hi);
    }
    if (phi_hi > 0.0)
      throw NumericalError("sphere_max: failed to bracket the secular root");
  }

  // Safeguarded Newton on phi(lambda); the bracket keeps lo on the phi > 0
  // side and hi on the phi <= 0 side.
  double lam = 0.5 * (lo + hi);
  const double tol = 1e-12 * r2;
  int it = 0;
  for (; it < 200; ++it) {
    detail::secular_eval(w, qt, r2, lam, phi, dphi);
    if (std::isfinite(phi) && std::abs(phi) <= tol) break;
    if (!std::isfinite(phi) || phi > 0.0)
      lo = lam;
    else
      hi = lam;
    if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(lo), std::abs(hi))) {
      // Bracket exhausted without meeting the phi tolerance: the root hugs the
      // pole and phi cannot be evaluated finely enough there. The coefficients
      // away from the top eigenspace are well conditioned; rebuild the top
      // coefficient from the norm budget instead.
      result.z = detail::complete_top(v, detail::secular_coefficients(w, qt, hi),
                                      top_begin, r2, qt_full(d - 1));
      result.lambda = hi;
      result.hard_case = true;
      result.iterations = it;
      return result;
    }
    double next = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(phi) && std::isfinite(dphi) && dphi != 0.0)
      next = lam - phi / dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lam = next;
  }

  result.z = v * detail::secular_coefficients(w, qt, lam);
  // The phi tolerance leaves a ~1e-12 relative radius error; land exactly on
  // the sphere so boundary quantities (budget usage, closed-form solutions)
  // hold to machine precision.
  const double norm = result.z.norm();
  if (norm > 0.0) result.z *= std::sqrt(r2) / norm;
  result.lambda = lam;
  result.hard_case = false;
  result.iterations = it;
  return result;
}

/// Convenience overload that eigendecomposes M first. Throws StructuralError
/// for a non-square or asymmetric M.
inline SphereMaxResult sphere_max(const Matrix& m, const Vector& q, double r2) {
  if (m.rows() != m.cols()) throw StructuralError("sphere_max: M is not square");
  if (m.size() == 0) return SphereMaxResult{Vector::Zero(0), 0.0, false, 0};
  if ((m - m.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw StructuralError("sphere_max: M is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success)
    throw NumericalError("sphere_max: eigensolver failed");
  return sphere_max(eig, q, r2);
}

}  // namespace netgame
