#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "ae/models.hpp"

namespace ae {
namespace models {

// ---------------------------------------------------------------- KNN

KnnModel knn_fit(const MatrixXd& X, const VectorXi& y, int k) {
  if (X.rows() != y.size()) throw DataError("knn_fit: row/label count mismatch");
  if (k < 1 || k > X.rows()) throw DataError("knn_fit: k must be in [1, n_rows]");
  return {X, y, k};
}

int knn_predict(const KnnModel& m, const VectorXd& x) {
  if (x.size() != m.train_x.cols()) throw DataError("knn_predict: dimension mismatch");
  const Index n = m.train_x.rows();
  std::vector<std::pair<double, Index>> dist(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    dist[static_cast<size_t>(i)] = {(m.train_x.row(i).transpose() - x).squaredNorm(), i};
  std::partial_sort(dist.begin(), dist.begin() + m.k, dist.end());

  std::map<int, std::pair<int, double>> votes;  // label -> (count, summed distance)
  for (int j = 0; j < m.k; ++j) {
    const auto& [d, i] = dist[static_cast<size_t>(j)];
    auto& v = votes[m.train_y[i]];
    v.first += 1;
    v.second += std::sqrt(d);
  }
  int best = votes.begin()->first;
  for (const auto& [label, v] : votes) {
    const auto& bv = votes[best];
    if (v.first > bv.first || (v.first == bv.first && v.second < bv.second)) best = label;
    // equal count and distance: std::map order keeps the lower label id
  }
  return best;
}

VectorXi knn_predict(const KnnModel& m, const MatrixXd& X) {
  VectorXi out(X.rows());
  for (Index i = 0; i < X.rows(); ++i) out[i] = knn_predict(m, X.row(i).transpose());
  return out;
}

// ---------------------------------------------------------------- PCA

PcaModel pca_fit(const MatrixXd& X, Index d) {
  const Index n = X.rows(), p = X.cols();
  if (d < 1 || d > std::min(n - 1, p)) throw DataError("pca_fit: d must be in [1, min(n-1, p)]");
  PcaModel m;
  m.mean = X.colwise().mean();
  const MatrixXd centered = X.rowwise() - m.mean.transpose();
  const MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("pca_fit: eigendecomposition failed");

  // Eigen returns ascending eigenvalues; take the top d in descending order.
  m.components.resize(d, p);
  m.explained_variance.resize(d);
  for (Index j = 0; j < d; ++j) {
    const Index src = p - 1 - j;
    VectorXd v = eig.eigenvectors().col(src);
    Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0) v = -v;  // deterministic sign
    m.components.row(j) = v.transpose();
    m.explained_variance[j] = std::max(0.0, eig.eigenvalues()[src]);
  }
  return m;
}

MatrixXd pca_transform(const PcaModel& m, const MatrixXd& X) {
  if (X.cols() != m.mean.size()) throw DataError("pca_transform: dimension mismatch");
  return (X.rowwise() - m.mean.transpose()) * m.components.transpose();
}

MatrixXd pca_inverse_transform(const PcaModel& m, const MatrixXd& Z) {
  return (Z * m.components).rowwise() + m.mean.transpose();
}

// ------------------------------------------------------- evaluation

VectorXd permutation_importance(const PredictFn& predict, const MatrixXd& X, const VectorXi& y,
                                int n_repeats, uint64_t seed) {
  if (X.rows() != y.size()) throw DataError("permutation_importance: row/label mismatch");
  if (n_repeats < 1) throw DataError("permutation_importance: n_repeats must be >= 1");
  const double baseline = accuracy(y, predict(X));
  const Index n = X.rows();

  std::mt19937_64 rng(seed);
  VectorXd importance(X.cols());
  std::vector<Index> perm(static_cast<size_t>(n));
  for (Index j = 0; j < X.cols(); ++j) {
    double drop_sum = 0;
    for (int r = 0; r < n_repeats; ++r) {
      std::iota(perm.begin(), perm.end(), Index{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      MatrixXd Xp = X;
      for (Index i = 0; i < n; ++i) Xp(i, j) = X(perm[static_cast<size_t>(i)], j);
      drop_sum += baseline - accuracy(y, predict(Xp));
    }
    importance[j] = drop_sum / n_repeats;
  }
  return importance;
}

BinaryConfusion confusion_matrix(const VectorXi& y_true, const VectorXi& y_pred) {
  if (y_true.size() != y_pred.size()) throw DataError("confusion_matrix: length mismatch");
  BinaryConfusion c;
  c.counts.setZero();
  for (Index i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i] > 0 ? 1 : 0;
    const int p = y_pred[i] > 0 ? 1 : 0;
    c.counts(t, p) += 1;
  }
  const double total = y_true.size();
  c.accuracy = (c.counts(0, 0) + c.counts(1, 1)) / total;
  const int n0 = c.counts(0, 0) + c.counts(0, 1);
  const int n1 = c.counts(1, 0) + c.counts(1, 1);
  c.recall_class0 = n0 > 0 ? static_cast<double>(c.counts(0, 0)) / n0 : 0.0;
  c.recall_class1 = n1 > 0 ? static_cast<double>(c.counts(1, 1)) / n1 : 0.0;
  return c;
}

double accuracy(const VectorXi& y_true, const VectorXi& y_pred) {
  if (y_true.size() != y_pred.size()) throw DataError("accuracy: length mismatch");
  Index hits = 0;
  for (Index i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_pred[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

// ------------------------------------------------------------ splits

namespace {

std::map<int, std::vector<Index>> by_class(const VectorXi& y) {
  std::map<int, std::vector<Index>> groups;
  for (Index i = 0; i < y.size(); ++i) groups[y[i]].push_back(i);
  return groups;
}

}  // namespace

Split stratified_split(const VectorXi& y, double test_frac, uint64_t seed) {
  if (!(test_frac > 0 && test_frac < 1)) throw DataError("stratified_split: bad test_frac");
  std::mt19937_64 rng(seed);
  Split s;
  for (auto& [label, idx] : by_class(y)) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_test = static_cast<size_t>(
        std::lround(test_frac * static_cast<double>(idx.size())));
    for (size_t i = 0; i < idx.size(); ++i)
      (i < n_test ? s.test : s.train).push_back(idx[i]);
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<int> stratified_folds(const VectorXi& y, int n_folds, uint64_t seed) {
  if (n_folds < 2) throw DataError("stratified_folds: need at least 2 folds");
  std::mt19937_64 rng(seed);
  std::vector<int> fold(static_cast<size_t>(y.size()), 0);
  for (auto& [label, idx] : by_class(y)) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (size_t i = 0; i < idx.size(); ++i)
      fold[static_cast<size_t>(idx[i])] = static_cast<int>(i % static_cast<size_t>(n_folds));
  }
  return fold;
}

MatrixXd rows(const MatrixXd& X, const std::vector<Index>& idx) {
  MatrixXd out(static_cast<Index>(idx.size()), X.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = X.row(idx[i]);
  return out;
}

VectorXi rows(const VectorXi& y, const std::vector<Index>& idx) {
  VectorXi out(static_cast<Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = y[idx[i]];
  return out;
}

}  // namespace models
}  // namespace ae
