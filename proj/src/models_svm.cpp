#include <cmath>
#include <vector>

#include "ae/models.hpp"

namespace ae {
namespace models {

namespace {

MatrixXd rbf_kernel_matrix(const MatrixXd& X, double gamma) {
  const VectorXd sq = X.rowwise().squaredNorm();
  MatrixXd K = -2.0 * (X * X.transpose());
  K.colwise() += sq;
  K.rowwise() += sq.transpose();
  return (-gamma * K.array()).exp();
}

// Platt's SMO on the precomputed kernel matrix.
class SmoSolver {
 public:
  SmoSolver(const MatrixXd& K, const VectorXi& y, double C, double tol)
      : K_(K), y_(y), C_(C), tol_(tol), n_(y.size()) {
    alpha_ = VectorXd::Zero(n_);
    // f(x_i) = 0 initially, so E_i = -y_i.
    errors_ = -y.cast<double>();
  }

  void solve(int max_passes) {
    int num_changed = 0;
    bool examine_all = true;
    int sweeps = 0;
    while ((num_changed > 0 || examine_all) && sweeps < max_passes) {
      num_changed = 0;
      if (examine_all) {
        for (Index i = 0; i < n_; ++i) num_changed += examine(i);
      } else {
        for (Index i = 0; i < n_; ++i)
          if (alpha_[i] > 0 && alpha_[i] < C_) num_changed += examine(i);
      }
      if (examine_all) {
        examine_all = false;
      } else if (num_changed == 0) {
        examine_all = true;
        ++sweeps;  // count only full sweeps so progress resets the budget
      }
    }
  }

  const VectorXd& alpha() const { return alpha_; }
  double bias() const { return b_; }

 private:
  int examine(Index i2) {
    const double y2 = y_[i2], alph2 = alpha_[i2], e2 = errors_[i2];
    const double r2 = e2 * y2;
    const bool violated = (r2 < -tol_ && alph2 < C_) || (r2 > tol_ && alph2 > 0);
    if (!violated) return 0;

    // Second-choice heuristic: maximize |E1 - E2| over non-bound points.
    Index best = -1;
    double best_gap = -1;
    for (Index i = 0; i < n_; ++i) {
      if (i == i2 || alpha_[i] <= 0 || alpha_[i] >= C_) continue;
      const double gap = std::abs(errors_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best >= 0 && take_step(best, i2)) return 1;

    // Then all non-bound points, then everything, from a rotating start.
    for (Index off = 0; off < n_; ++off) {
      const Index i1 = (rotate_ + off) % n_;
      if (alpha_[i1] > 0 && alpha_[i1] < C_ && take_step(i1, i2)) {
        rotate_ = i1 + 1;
        return 1;
      }
    }
    for (Index off = 0; off < n_; ++off) {
      const Index i1 = (rotate_ + off) % n_;
      if (take_step(i1, i2)) {
        rotate_ = i1 + 1;
        return 1;
      }
    }
    return 0;
  }

  bool take_step(Index i1, Index i2) {
    if (i1 == i2) return false;
    const double alph1 = alpha_[i1], alph2 = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = errors_[i1], e2 = errors_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, alph2 - alph1);
      hi = std::min(C_, C_ + alph2 - alph1);
    } else {
      lo = std::max(0.0, alph1 + alph2 - C_);
      hi = std::min(C_, alph1 + alph2);
    }
    if (lo >= hi) return false;

    const double k11 = K_(i1, i1), k12 = K_(i1, i2), k22 = K_(i2, i2);
    const double eta = k11 + k22 - 2 * k12;
    double a2;
    if (eta > 0) {
      a2 = alph2 + y2 * (e1 - e2) / eta;
      a2 = std::clamp(a2, lo, hi);
    } else {
      // Degenerate curvature: evaluate the objective at both clip ends.
      const double f1 = y1 * (e1 + b_) - alph1 * k11 - s * alph2 * k12;
      const double f2 = y2 * (e2 + b_) - s * alph1 * k12 - alph2 * k22;
      const double l1 = alph1 + s * (alph2 - lo);
      const double h1 = alph1 + s * (alph2 - hi);
      const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
      const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
      if (obj_lo < obj_hi - 1e-12) {
        a2 = lo;
      } else if (obj_lo > obj_hi + 1e-12) {
        a2 = hi;
      } else {
        return false;
      }
    }
    if (std::abs(a2 - alph2) < 1e-12 * (a2 + alph2 + 1e-12)) return false;
    const double a1 = alph1 + s * (alph2 - a2);

    const double d1 = y1 * (a1 - alph1), d2 = y2 * (a2 - alph2);
    const double b1 = e1 + d1 * k11 + d2 * k12 + b_;
    const double b2 = e2 + d1 * k12 + d2 * k22 + b_;
    double b_new;
    if (a1 > 0 && a1 < C_) {
      b_new = b1;
    } else if (a2 > 0 && a2 < C_) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }
    const double db = b_new - b_;

    for (Index i = 0; i < n_; ++i) errors_[i] += d1 * K_(i1, i) + d2 * K_(i2, i) - db;
    alpha_[i1] = a1;
    alpha_[i2] = a2;
    b_ = b_new;
    return true;
  }

  const MatrixXd& K_;
  const VectorXi& y_;
  const double C_, tol_;
  const Index n_;
  VectorXd alpha_, errors_;
  double b_ = 0;
  Index rotate_ = 0;
};

}  // namespace

SvmModel svm_train(const MatrixXd& X, const VectorXi& y, double C, double gamma,
                   const SvmTrainOptions& opts) {
  const Index n = X.rows();
  if (n < 2 || y.size() != n) throw DataError("svm_train: need >= 2 labeled rows");
  bool has_pos = false, has_neg = false;
  for (Index i = 0; i < n; ++i) {
    if (y[i] == 1) has_pos = true;
    else if (y[i] == -1) has_neg = true;
    else throw DataError("svm_train: labels must be -1/+1");
  }
  if (!has_pos || !has_neg) throw DataError("svm_train: both classes must be present");
  if (!(C > 0) || !(gamma > 0)) throw DataError("svm_train: C and gamma must be positive");

  const MatrixXd K = rbf_kernel_matrix(X, gamma);
  SmoSolver solver(K, y, C, opts.tol);
  solver.solve(opts.max_passes);

  const VectorXd& alpha = solver.alpha();
  std::vector<Index> sv;
  for (Index i = 0; i < n; ++i)
    if (alpha[i] > 0) sv.push_back(i);

  SvmModel m;
  m.gamma = gamma;
  m.C = C;
  // SMO's error update convention gives f(x) = sum alpha_y K - b.
  m.bias = -solver.bias();
  m.support_x.resize(static_cast<Index>(sv.size()), X.cols());
  m.alpha_y.resize(static_cast<Index>(sv.size()));
  for (size_t i = 0; i < sv.size(); ++i) {
    m.support_x.row(static_cast<Index>(i)) = X.row(sv[i]);
    m.alpha_y[static_cast<Index>(i)] = alpha[sv[i]] * y[sv[i]];
  }
  return m;
}

double svm_decision(const SvmModel& m, const VectorXd& x) {
  if (x.size() != m.support_x.cols()) throw DataError("svm_decision: dimension mismatch");
  double f = m.bias;
  for (Index i = 0; i < m.support_x.rows(); ++i) {
    const double d2 = (m.support_x.row(i).transpose() - x).squaredNorm();
    f += m.alpha_y[i] * std::exp(-m.gamma * d2);
  }
  return f;
}

int svm_predict(const SvmModel& m, const VectorXd& x) {
  return svm_decision(m, x) >= 0 ? 1 : -1;
}

VectorXi svm_predict(const SvmModel& m, const MatrixXd& X) {
  VectorXi out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) out[i] = svm_predict(m, X.row(i).transpose());
  return out;
}

}  // namespace models
}  // namespace ae
