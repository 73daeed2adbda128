#include "omnitraj/spline.hpp"

#include <algorithm>
#include <cmath>

namespace omnitraj::spline {

Eigen::VectorXd basis(int s, int order, double t) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(2 * s);
  double tn = 1.0;
  for (int m = order; m < 2 * s; ++m) {
    double f = 1.0;  // m! / (m - order)!
    for (int j = m - order + 1; j <= m; ++j) f *= j;
    beta(m) = f * tn;
    tn *= t;
  }
  return beta;
}

Eigen::MatrixXd gram(int s, double T) {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2 * s, 2 * s);
  Eigen::VectorXd f(2 * s);
  for (int m = s; m < 2 * s; ++m) {
    double fm = 1.0;  // m! / (m - s)!
    for (int j = m - s + 1; j <= m; ++j) fm *= j;
    f(m) = fm;
  }
  for (int m = s; m < 2 * s; ++m)
    for (int n = s; n < 2 * s; ++n) {
      const int p = m + n - 2 * s + 1;
      E(m, n) = f(m) * f(n) * std::pow(T, p) / p;
    }
  return E;
}

void BandedLU::resize(int n, int kl, int ku) {
  n_ = n;
  kl_ = kl;
  ku_ = ku;
  ab_ = Eigen::MatrixXd::Zero(2 * kl + ku + 1, n);
  piv_.assign(n, 0);
  factored_ = false;
}

void BandedLU::factorize() {
  for (int k = 0; k < n_; ++k) {
    const int rmax = std::min(n_ - 1, k + kl_);
    int p = k;
    for (int r = k + 1; r <= rmax; ++r)
      if (std::abs((*this)(r, k)) > std::abs((*this)(p, k))) p = r;
    if (std::abs((*this)(p, k)) < 1e-300)
      throw SingularSystem("banded LU: zero pivot at column " + std::to_string(k));
    piv_[k] = p;
    const int cmax = std::min(n_ - 1, k + ku_ + kl_);
    if (p != k)
      for (int c = k; c <= cmax; ++c) std::swap((*this)(k, c), (*this)(p, c));
    const double inv = 1.0 / (*this)(k, k);
    for (int r = k + 1; r <= rmax; ++r) {
      const double m = ((*this)(r, k) *= inv);
      if (m != 0.0)
        for (int c = k + 1; c <= cmax; ++c) (*this)(r, c) -= m * (*this)(k, c);
    }
  }
  factored_ = true;
}

void BandedLU::solveInPlace(Eigen::Ref<Eigen::MatrixXd> B) const {
  for (int k = 0; k < n_; ++k) {
    if (piv_[k] != k) B.row(k).swap(B.row(piv_[k]));
    const int rmax = std::min(n_ - 1, k + kl_);
    for (int r = k + 1; r <= rmax; ++r) B.row(r) -= (*this)(r, k) * B.row(k);
  }
  for (int k = n_ - 1; k >= 0; --k) {
    const int cmax = std::min(n_ - 1, k + ku_ + kl_);
    for (int c = k + 1; c <= cmax; ++c) B.row(k) -= (*this)(k, c) * B.row(c);
    B.row(k) /= (*this)(k, k);
  }
}

void BandedLU::solveTransposeInPlace(Eigen::Ref<Eigen::MatrixXd> B) const {
  // U^T y = b by forward substitution, then undo the pivoted L factors.
  for (int k = 0; k < n_; ++k) {
    const int cmin = std::max(0, k - ku_ - kl_);
    for (int c = cmin; c < k; ++c) B.row(k) -= (*this)(c, k) * B.row(c);
    B.row(k) /= (*this)(k, k);
  }
  for (int k = n_ - 1; k >= 0; --k) {
    const int rmax = std::min(n_ - 1, k + kl_);
    for (int r = k + 1; r <= rmax; ++r) B.row(k) -= (*this)(r, k) * B.row(r);
    if (piv_[k] != k) B.row(k).swap(B.row(piv_[k]));
  }
}

Trajectory::Trajectory(int s, Eigen::VectorXd durations, Eigen::MatrixXd coeffs)
    : s_(s), durations_(std::move(durations)), coeffs_(std::move(coeffs)) {
  const int M = static_cast<int>(durations_.size());
  knots_.resize(M + 1);
  knots_(0) = 0.0;
  for (int i = 0; i < M; ++i) knots_(i + 1) = knots_(i) + durations_(i);
}

int Trajectory::locate(double t, double* local) const {
  const double total = duration();
  if (t < -1e-9 || t > total + 1e-9)
    throw OutOfDomain("trajectory: time " + std::to_string(t) + " outside [0, " +
                      std::to_string(total) + "]");
  t = std::clamp(t, 0.0, total);
  const double* begin = knots_.data();
  const double* end = begin + knots_.size();
  int piece = static_cast<int>(std::upper_bound(begin, end, t) - begin) - 1;
  piece = std::clamp(piece, 0, pieces() - 1);
  if (local) *local = t - knots_(piece);
  return piece;
}

Eigen::Matrix<double, 6, 1> Trajectory::derivative(double t, int order) const {
  double local = 0.0;
  const int piece = locate(t, &local);
  return pieceCoefficients(piece).transpose() * basis(s_, order, local);
}

MincoSpline::MincoSpline(int s, int pieces, BoundaryCondition bc)
    : s_(s), M_(pieces), bc_(std::move(bc)) {
  if (s_ < 2) throw std::invalid_argument("minco: order must be at least 2");
  if (M_ < 1) throw std::invalid_argument("minco: needs at least one piece");
  if (bc_.start.rows() != 6 || bc_.start.cols() != s_ || bc_.end.rows() != 6 ||
      bc_.end.cols() != s_)
    throw std::invalid_argument("minco: boundary stacks must be 6 x s");
}

Trajectory MincoSpline::solve(const Eigen::MatrixXd& waypoints,
                              const Eigen::VectorXd& durations) {
  if (waypoints.rows() != 6 || waypoints.cols() != M_ - 1)
    throw std::invalid_argument("minco: waypoints must be 6 x (pieces - 1)");
  if (static_cast<int>(durations.size()) != M_)
    throw std::invalid_argument("minco: need one duration per piece");
  T_ = durations;
  for (int i = 0; i < M_; ++i) {
    if (!(T_(i) > 0.0))
      throw NonPositiveDuration("minco: duration " + std::to_string(i) +
                                " is not positive");
    if (T_(i) < 1e-6) {
      T_(i) = 1e-6;
      ++clamp_events_;
    }
  }

  const int n = 2 * s_ * M_;
  A_.resize(n, 2 * s_, 2 * s_);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 6);

  double fact = 1.0;
  for (int j = 0; j < s_; ++j) {
    A_(j, j) = fact;  // beta^{(j)}(0) has the single entry j!
    fact *= j + 1;
    b.row(j) = bc_.start.col(j).transpose();
  }
  for (int i = 0; i + 1 < M_; ++i) {
    const int r0 = s_ + 2 * s_ * i;
    const int c0 = 2 * s_ * i;
    const int cn = 2 * s_ * (i + 1);
    // Continuity of orders s .. 2s-2 (the orders above the shared derivative
    // stack), then the waypoint value row, then continuity of orders 0 .. s-1.
    for (int j = 0; j + 1 < s_; ++j) {
      const int o = s_ + j;
      const Eigen::VectorXd beta = basis(s_, o, T_(i));
      // beta^{(o)} vanishes on powers below o; skipping them keeps every
      // write inside the band.
      for (int m = o; m < 2 * s_; ++m) A_(r0 + j, c0 + m) = beta(m);
      double of = 1.0;
      for (int v = 2; v <= o; ++v) of *= v;
      A_(r0 + j, cn + o) = -of;
    }
    const Eigen::VectorXd beta0 = basis(s_, 0, T_(i));
    for (int m = 0; m < 2 * s_; ++m) A_(r0 + s_ - 1, c0 + m) = beta0(m);
    b.row(r0 + s_ - 1) = waypoints.col(i).transpose();
    for (int m = 0; m < 2 * s_; ++m) A_(r0 + s_, c0 + m) = beta0(m);
    A_(r0 + s_, cn) = -1.0;
    for (int j = 1; j < s_; ++j) {
      const Eigen::VectorXd beta = basis(s_, j, T_(i));
      for (int m = j; m < 2 * s_; ++m) A_(r0 + s_ + j, c0 + m) = beta(m);
      double of = 1.0;
      for (int v = 2; v <= j; ++v) of *= v;
      A_(r0 + s_ + j, cn + j) = -of;
    }
  }
  const int rend = n - s_;
  const int cend = 2 * s_ * (M_ - 1);
  for (int j = 0; j < s_; ++j) {
    const Eigen::VectorXd beta = basis(s_, j, T_(M_ - 1));
    for (int m = j; m < 2 * s_; ++m) A_(rend + j, cend + m) = beta(m);
    b.row(rend + j) = bc_.end.col(j).transpose();
  }

  A_.factorize();
  A_.solveInPlace(b);
  coeffs_ = std::move(b);
  solved_ = true;
  return Trajectory(s_, T_, coeffs_);
}

void MincoSpline::propagateGradient(const Eigen::MatrixXd& grad_coeffs,
                                    const Eigen::VectorXd& grad_T_direct,
                                    Eigen::MatrixXd& grad_waypoints,
                                    Eigen::VectorXd& grad_T) const {
  if (!solved_) throw std::logic_error("minco: propagateGradient before solve");
  Eigen::MatrixXd lambda = grad_coeffs;  // adjoint: A^T lambda = dL/dc
  A_.solveTransposeInPlace(lambda);

  grad_waypoints.resize(6, M_ - 1);
  for (int i = 0; i + 1 < M_; ++i)
    grad_waypoints.col(i) = lambda.row(s_ + 2 * s_ * i + s_ - 1).transpose();

  grad_T = grad_T_direct;
  // Each row that evaluates the basis at T_i contributes -lambda_r . d(row)/dT_i
  // . c_i, and d(row)/dT_i is the next-higher derivative basis at T_i.
  for (int i = 0; i < M_; ++i) {
    const auto Ci = coeffs_.middleRows(2 * s_ * i, 2 * s_);
    auto add = [&](int row, int order) {
      const Eigen::VectorXd beta = basis(s_, order + 1, T_(i));
      grad_T(i) -= lambda.row(row).dot((Ci.transpose() * beta).transpose());
    };
    if (i + 1 < M_) {
      const int r0 = s_ + 2 * s_ * i;
      for (int j = 0; j + 1 < s_; ++j) add(r0 + j, s_ + j);
      add(r0 + s_ - 1, 0);
      add(r0 + s_, 0);
      for (int j = 1; j < s_; ++j) add(r0 + s_ + j, j);
    } else {
      const int rend = 2 * s_ * M_ - s_;
      for (int j = 0; j < s_; ++j) add(rend + j, j);
    }
  }
}

double smoothnessCost(const Trajectory& traj, Eigen::MatrixXd& grad_coeffs,
                      Eigen::VectorXd& grad_T) {
  const int s = traj.order();
  const int M = traj.pieces();
  grad_coeffs = Eigen::MatrixXd::Zero(2 * s * M, 6);
  grad_T = Eigen::VectorXd::Zero(M);
  double J = 0.0;
  for (int i = 0; i < M; ++i) {
    const double T = traj.durations()(i);
    const auto C = traj.pieceCoefficients(i);
    const Eigen::MatrixXd E = gram(s, T);
    const Eigen::MatrixXd EC = E * C;
    J += EC.cwiseProduct(C).sum();
    grad_coeffs.middleRows(2 * s * i, 2 * s) = 2.0 * EC;
    grad_T(i) = (C.transpose() * basis(s, s, T)).squaredNorm();
  }
  return J;
}

}  // namespace omnitraj::spline
