#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace omnitraj::detail {

// Dense two-phase primal simplex with Bland's rule for
//   max c.x  subject to  A x <= b,  x >= 0.
// Sized for corridor-geometry programs (a few hundred rows at most).
// Returns false when the program is infeasible.  Throws on an unbounded
// objective; callers cap their variables instead of relying on detection.
class Simplex {
 public:
  enum class Outcome { Optimal, Infeasible, Unbounded };

  static Outcome solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& c, Eigen::VectorXd& x) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    // Columns: n structural, m slack, up to m artificial, then the RHS.
    int art = 0;
    for (int i = 0; i < m; ++i)
      if (b(i) < 0.0) ++art;
    const int slack0 = n;
    const int art0 = n + m;
    const int cols = n + m + art + 1;

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, cols);
    std::vector<int> basis(m);
    int next_art = art0;
    for (int i = 0; i < m; ++i) {
      const double sgn = b(i) < 0.0 ? -1.0 : 1.0;
      T.block(i, 0, 1, n) = sgn * A.row(i);
      T(i, slack0 + i) = sgn;
      T(i, cols - 1) = sgn * b(i);
      if (b(i) < 0.0) {
        T(i, next_art) = 1.0;
        basis[i] = next_art++;
      } else {
        basis[i] = slack0 + i;
      }
    }

    if (art > 0) {
      // Phase 1: minimize the artificial sum.
      Eigen::VectorXd obj = Eigen::VectorXd::Zero(cols - 1);
      obj.segment(art0, art).setConstant(-1.0);
      if (!iterate(T, basis, obj, cols - 1)) throw std::runtime_error("simplex: phase-1 unbounded");
      double infeas = 0.0;
      for (int i = 0; i < m; ++i)
        if (basis[i] >= art0) infeas += T(i, cols - 1);
      if (infeas > 1e-7) return Outcome::Infeasible;
      purgeArtificials(T, basis, art0);
    }

    Eigen::VectorXd obj = Eigen::VectorXd::Zero(cols - 1);
    obj.head(n) = c;
    if (!iterate(T, basis, obj, art0)) return Outcome::Unbounded;

    x = Eigen::VectorXd::Zero(n);
    const int rows = static_cast<int>(T.rows());
    for (int i = 0; i < rows; ++i)
      if (basis[i] < n) x(basis[i]) = T(i, T.cols() - 1);
    return Outcome::Optimal;
  }

 private:
  static constexpr double kTol = 1e-9;

  // Runs pivots until optimal (true) or unbounded (false).  Only columns
  // below `allowed` may enter the basis.
  static bool iterate(Eigen::MatrixXd& T, std::vector<int>& basis,
                      const Eigen::VectorXd& obj, int allowed) {
    const int m = static_cast<int>(T.rows());
    const int rhs = static_cast<int>(T.cols()) - 1;
    const int cap = 200 * (m + rhs);
    for (int iter = 0; iter < cap; ++iter) {
      // Reduced costs priced from scratch; tiny tableaux make this cheap.
      int enter = -1;
      for (int j = 0; j < allowed && enter < 0; ++j) {
        double r = obj(j);
        for (int i = 0; i < m; ++i) r -= obj(basis[i]) * T(i, j);
        if (r > kTol) enter = j;  // Bland: first improving index
      }
      if (enter < 0) return true;

      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (T(i, enter) <= kTol) continue;
        const double ratio = T(i, rhs) / T(i, enter);
        if (leave < 0 || ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(T, basis, leave, enter);
    }
    throw std::runtime_error("simplex: iteration cap hit");
  }

  static void pivot(Eigen::MatrixXd& T, std::vector<int>& basis, int row, int col) {
    T.row(row) /= T(row, col);
    const int m = static_cast<int>(T.rows());
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = T(i, col);
      if (f != 0.0) T.row(i) -= f * T.row(row);
    }
    basis[row] = col;
  }

  // After phase 1, drive zero-valued artificials out of the basis; rows that
  // cannot pivot are linearly dependent and get dropped.
  static void purgeArtificials(Eigen::MatrixXd& T, std::vector<int>& basis, int art0) {
    std::vector<int> keep;
    const int m = static_cast<int>(T.rows());
    for (int i = 0; i < m; ++i) {
      if (basis[i] < art0) {
        keep.push_back(i);
        continue;
      }
      int col = -1;
      for (int j = 0; j < art0 && col < 0; ++j)
        if (std::abs(T(i, j)) > kTol) col = j;
      if (col >= 0) {
        pivot(T, basis, i, col);
        keep.push_back(i);
      }
    }
    if (static_cast<int>(keep.size()) == m) return;
    Eigen::MatrixXd T2(keep.size(), T.cols());
    std::vector<int> b2(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
      T2.row(i) = T.row(keep[i]);
      b2[i] = basis[keep[i]];
    }
    T.swap(T2);
    basis.swap(b2);
  }
};

}  // namespace omnitraj::detail
