#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ae/types.hpp"

namespace ae {
namespace models {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// ---------------------------------------------------------------- KNN

struct KnnModel {
  MatrixXd train_x;  // standardized rows
  VectorXi train_y;
  int k = 1;
};

KnnModel knn_fit(const MatrixXd& X, const VectorXi& y, int k);

/// Majority label of the k nearest rows under Euclidean distance. Vote ties
/// break to the smaller summed distance, then to the lower label id.
int knn_predict(const KnnModel& m, const VectorXd& x);
VectorXi knn_predict(const KnnModel& m, const MatrixXd& X);

// ---------------------------------------------------------------- PCA

struct PcaModel {
  VectorXd mean;
  MatrixXd components;         // d x p, orthonormal rows
  VectorXd explained_variance;  // non-increasing
};

PcaModel pca_fit(const MatrixXd& X, Index d);
MatrixXd pca_transform(const PcaModel& m, const MatrixXd& X);
MatrixXd pca_inverse_transform(const PcaModel& m, const MatrixXd& Z);

// ---------------------------------------------------------------- SVM

/// RBF-kernel SVM trained with sequential minimal optimization.
/// Labels are -1/+1.
struct SvmModel {
  MatrixXd support_x;
  VectorXd alpha_y;  // alpha_i * y_i per support vector
  double bias = 0;
  double gamma = 0;
  double C = 0;
};

struct SvmTrainOptions {
  double tol = 1e-3;
  int max_passes = 200;  // examine-all sweeps without progress cap
};

SvmModel svm_train(const MatrixXd& X, const VectorXi& y, double C, double gamma,
                   const SvmTrainOptions& opts = {});

/// Decision value f(x) = sum_i alpha_y_i K(x_i, x) + b.
double svm_decision(const SvmModel& m, const VectorXd& x);
int svm_predict(const SvmModel& m, const VectorXd& x);
VectorXi svm_predict(const SvmModel& m, const MatrixXd& X);

// ---------------------------------------------------------------- GMM

struct GmmModel {
  int n_components = 0;
  VectorXd weights;               // sum to 1
  std::vector<VectorXd> means;
  std::vector<MatrixXd> covariances;  // full, SPD after regularization
  std::vector<double> log_likelihood_trace;
  double log_likelihood = 0;  // final total log-likelihood
};

struct GmmOptions {
  int n_init = 10;
  double reg_covar = 1e-6;
  int max_iter = 200;
  double tol = 1e-6;  // on mean log-likelihood improvement
};

GmmModel gmm_fit_em(const MatrixXd& X, int k, uint64_t seed, const GmmOptions& opts = {});

/// Per-row responsibilities (rows sum to 1).
MatrixXd gmm_responsibilities(const GmmModel& m, const MatrixXd& X);
VectorXi gmm_predict(const GmmModel& m, const MatrixXd& X);
double gmm_log_likelihood(const GmmModel& m, const MatrixXd& X);

/// BIC = -2 logL + p ln n with p = (K-1) + K d + K d(d+1)/2.
double gmm_bic(const GmmModel& m, const MatrixXd& X);

struct BicSweep {
  int best_k = 0;
  std::vector<int> ks;
  std::vector<double> bic;
};

BicSweep select_k_by_bic(const MatrixXd& X, int k_min, int k_max, uint64_t seed,
                         const GmmOptions& opts = {});

// ------------------------------------------------------- evaluation

using PredictFn = std::function<VectorXi(const MatrixXd&)>;

/// Mean accuracy drop over n_repeats per permuted column.
VectorXd permutation_importance(const PredictFn& predict, const MatrixXd& X, const VectorXi& y,
                                int n_repeats, uint64_t seed);

/// counts(i, j) = #rows with true class i and predicted class j, classes 0/1.
struct BinaryConfusion {
  Eigen::Matrix2i counts;
  double accuracy = 0;
  double recall_class0 = 0;
  double recall_class1 = 0;
};

BinaryConfusion confusion_matrix(const VectorXi& y_true, const VectorXi& y_pred);
double accuracy(const VectorXi& y_true, const VectorXi& y_pred);

// ------------------------------------------------------------ splits

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Stratified split preserving the class ratio within one sample per class.
Split stratified_split(const VectorXi& y, double test_frac, uint64_t seed);

/// Stratified k-fold assignment: fold id per row.
std::vector<int> stratified_folds(const VectorXi& y, int n_folds, uint64_t seed);

MatrixXd rows(const MatrixXd& X, const std::vector<Index>& idx);
VectorXi rows(const VectorXi& y, const std::vector<Index>& idx);

}  // namespace models
}  // namespace ae
