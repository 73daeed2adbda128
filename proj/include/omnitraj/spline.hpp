#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace omnitraj::spline {

struct NonPositiveDuration : std::runtime_error {
  explicit NonPositiveDuration(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& msg) : std::runtime_error(msg) {}
};

struct OutOfDomain : std::runtime_error {
  explicit OutOfDomain(const std::string& msg) : std::runtime_error(msg) {}
};

// beta^{(order)}(t) for the monomial basis (1, t, ..., t^{2s-1}).
Eigen::VectorXd basis(int s, int order, double t);

// Integral of beta^{(s)} beta^{(s)T} over [0, T]; the control-effort Gram.
Eigen::MatrixXd gram(int s, double T);

// General banded LU with partial pivoting (LAPACK-style band storage, fill
// widens the upper band from ku to ku + kl).  Row index r, column c valid for
// -(ku + kl) <= r - c <= kl after fill.
class BandedLU {
 public:
  void resize(int n, int kl, int ku);
  double& operator()(int r, int c) { return ab_(r - c + kl_ + ku_, c); }
  double operator()(int r, int c) const { return ab_(r - c + kl_ + ku_, c); }
  void factorize();  // throws SingularSystem on a vanishing pivot
  void solveInPlace(Eigen::Ref<Eigen::MatrixXd> B) const;
  void solveTransposeInPlace(Eigen::Ref<Eigen::MatrixXd> B) const;
  int size() const { return n_; }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  Eigen::MatrixXd ab_;  // (2 kl + ku + 1) x n
  std::vector<int> piv_;
  bool factored_ = false;
};

// Boundary derivative stacks: 6 x s matrices whose column j is the order-j
// derivative of (p; sigma) at the corresponding trajectory end.
struct BoundaryCondition {
  Eigen::MatrixXd start, end;
};

// Piecewise degree-(2s-1) polynomial over 6 channels (position + attitude
// chart), stored as stacked per-piece coefficient blocks (2s x 6 each) in the
// local time of each piece.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(int s, Eigen::VectorXd durations, Eigen::MatrixXd coeffs);

  int order() const { return s_; }
  int pieces() const { return static_cast<int>(durations_.size()); }
  double duration() const { return knots_(knots_.size() - 1); }
  const Eigen::VectorXd& durations() const { return durations_; }
  const Eigen::VectorXd& knots() const { return knots_; }
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }
  Eigen::Ref<const Eigen::MatrixXd> pieceCoefficients(int i) const {
    return coeffs_.middleRows(2 * s_ * i, 2 * s_);
  }

  // Piece index for absolute time t (pieces are right-open, the last is
  // closed); `local` receives t relative to the piece start.
  int locate(double t, double* local) const;
  // Order-`order` derivative of the 6-channel curve at absolute time t.
  Eigen::Matrix<double, 6, 1> derivative(double t, int order) const;
  Eigen::Vector3d position(double t) const { return derivative(t, 0).head<3>(); }
  Eigen::Vector3d sigma(double t) const { return derivative(t, 0).tail<3>(); }

 private:
  int s_ = 0;
  Eigen::VectorXd durations_, knots_;
  Eigen::MatrixXd coeffs_;
};

// Minimum-control-effort piecewise polynomial through given waypoints: the
// unique degree-(2s-1) spline matching the boundary stacks, interpolating the
// waypoints, and C^{2s-2} at the knots.  Coefficients come from one banded
// solve per spatial channel; the adjoint of the same factorization transports
// coefficient-space gradients back to waypoints and durations.
class MincoSpline {
 public:
  MincoSpline(int s, int pieces, BoundaryCondition bc);

  // waypoints: 6 x (M-1) knot values; durations: M positive piece lengths
  // (values below 1e-6 are clamped, counted in clampEvents()).
  Trajectory solve(const Eigen::MatrixXd& waypoints, const Eigen::VectorXd& durations);

  // grad_coeffs: (2 s M) x 6 cost gradient w.r.t. coefficients; grad_T_direct:
  // explicit duration dependence of the cost.  Outputs the total waypoint and
  // duration gradients.  Requires a preceding solve().
  void propagateGradient(const Eigen::MatrixXd& grad_coeffs,
                         const Eigen::VectorXd& grad_T_direct,
                         Eigen::MatrixXd& grad_waypoints, Eigen::VectorXd& grad_T) const;

  int clampEvents() const { return clamp_events_; }

 private:
  int s_, M_;
  BoundaryCondition bc_;
  BandedLU A_;
  Eigen::MatrixXd coeffs_;
  Eigen::VectorXd T_;
  int clamp_events_ = 0;
  bool solved_ = false;
};

// J = sum_i integral of |z^(s)|^2 over piece i; accumulates exact gradients
// into grad_coeffs ((2 s M) x 6) and grad_T (M), both resized and zeroed.
double smoothnessCost(const Trajectory& traj, Eigen::MatrixXd& grad_coeffs,
                      Eigen::VectorXd& grad_T);

}  // namespace omnitraj::spline
