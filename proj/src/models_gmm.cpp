#include <cmath>
#include <limits>
#include <random>

#include "ae/models.hpp"

namespace ae {
namespace models {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

struct CholComponent {
  Eigen::LLT<MatrixXd> llt;
  double log_det = 0;
};

CholComponent factor_covariance(const MatrixXd& cov, double reg_covar) {
  MatrixXd c = cov;
  double reg = reg_covar;
  for (int attempt = 0; attempt < 8; ++attempt) {
    CholComponent f;
    f.llt.compute(c);
    if (f.llt.info() == Eigen::Success) {
      f.log_det = 2.0 * f.llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      return f;
    }
    reg *= 10.0;
    c = cov + reg * MatrixXd::Identity(cov.rows(), cov.cols());
  }
  throw NumericalError("gmm: covariance not positive definite after regularization");
}

// Rowwise log N(x; mu, Sigma) for one component.
VectorXd log_gaussian(const MatrixXd& X, const VectorXd& mu, const CholComponent& f) {
  const MatrixXd centered = X.rowwise() - mu.transpose();
  const MatrixXd solved = f.llt.matrixL().solve(centered.transpose());
  const VectorXd quad = solved.colwise().squaredNorm();
  const double d = static_cast<double>(X.cols());
  return (-0.5 * (quad.array() + d * kLog2Pi + f.log_det)).matrix();
}

// Draw from [0, total) and walk the cumulative weights; avoids
// std::discrete_distribution, whose draw sequence is implementation-defined.
Index weighted_pick(const VectorXd& weights, double total, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, total);
  double r = u(rng);
  for (Index i = 0; i < weights.size(); ++i) {
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  return weights.size() - 1;
}

std::vector<VectorXd> kmeanspp_centers(const MatrixXd& X, int k, std::mt19937_64& rng) {
  const Index n = X.rows();
  std::vector<VectorXd> centers;
  std::uniform_int_distribution<Index> first(0, n - 1);
  centers.push_back(X.row(first(rng)).transpose());
  VectorXd d2 = (X.rowwise() - centers[0].transpose()).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = d2.sum();
    Index pick;
    if (total > 0) {
      pick = weighted_pick(d2, total, rng);
    } else {
      pick = first(rng);
    }
    centers.push_back(X.row(pick).transpose());
    d2 = d2.cwiseMin((X.rowwise() - centers.back().transpose()).rowwise().squaredNorm());
  }
  return centers;
}

struct EmState {
  VectorXd weights;
  std::vector<VectorXd> means;
  std::vector<MatrixXd> covs;
};

EmState initial_state(const MatrixXd& X, int k, double reg_covar, std::mt19937_64& rng) {
  const Index n = X.rows(), d = X.cols();
  const auto centers = kmeanspp_centers(X, k, rng);

  // Hard assignment to the nearest seed center.
  std::vector<std::vector<Index>> groups(static_cast<size_t>(k));
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      const double dist = (X.row(i).transpose() - centers[static_cast<size_t>(j)]).squaredNorm();
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    groups[static_cast<size_t>(best)].push_back(i);
  }

  EmState st;
  st.weights.resize(k);
  for (int j = 0; j < k; ++j) {
    auto& g = groups[static_cast<size_t>(j)];
    st.weights[j] = std::max<double>(1.0, static_cast<double>(g.size()));
    VectorXd mu = centers[static_cast<size_t>(j)];
    MatrixXd cov = MatrixXd::Zero(d, d);
    if (!g.empty()) {
      mu.setZero();
      for (Index i : g) mu += X.row(i).transpose();
      mu /= static_cast<double>(g.size());
      for (Index i : g) {
        const VectorXd c = X.row(i).transpose() - mu;
        cov += c * c.transpose();
      }
      cov /= static_cast<double>(g.size());
    }
    cov += reg_covar * MatrixXd::Identity(d, d);
    // Guard against single-point groups collapsing the covariance.
    if (cov.trace() < d * reg_covar * 10) cov += MatrixXd::Identity(d, d);
    st.means.push_back(mu);
    st.covs.push_back(cov);
  }
  st.weights /= st.weights.sum();
  return st;
}

double e_step(const MatrixXd& X, const EmState& st, double reg_covar, MatrixXd& resp) {
  const Index n = X.rows();
  const int k = static_cast<int>(st.weights.size());
  MatrixXd log_prob(n, k);
  for (int j = 0; j < k; ++j) {
    const CholComponent f = factor_covariance(st.covs[static_cast<size_t>(j)], reg_covar);
    log_prob.col(j) = log_gaussian(X, st.means[static_cast<size_t>(j)], f).array() +
                      std::log(st.weights[j]);
  }
  double total = 0;
  resp.resize(n, k);
  for (Index i = 0; i < n; ++i) {
    const double mx = log_prob.row(i).maxCoeff();
    const double lse = mx + std::log((log_prob.row(i).array() - mx).exp().sum());
    resp.row(i) = (log_prob.row(i).array() - lse).exp();
    total += lse;
  }
  return total;
}

void m_step(const MatrixXd& X, const MatrixXd& resp, double reg_covar, EmState& st) {
  const Index n = X.rows(), d = X.cols();
  const int k = static_cast<int>(resp.cols());
  for (int j = 0; j < k; ++j) {
    const VectorXd r = resp.col(j);
    const double nj = r.sum() + 1e-12;
    st.weights[j] = nj / static_cast<double>(n);
    const VectorXd mu = (X.transpose() * r) / nj;
    const MatrixXd centered = X.rowwise() - mu.transpose();
    const MatrixXd cov =
        (centered.transpose() * r.asDiagonal() * centered) / nj +
        reg_covar * MatrixXd::Identity(d, d);
    st.means[static_cast<size_t>(j)] = mu;
    st.covs[static_cast<size_t>(j)] = cov;
  }
  st.weights /= st.weights.sum();
}

}  // namespace

GmmModel gmm_fit_em(const MatrixXd& X, int k, uint64_t seed, const GmmOptions& opts) {
  const Index n = X.rows();
  if (k < 1) throw DataError("gmm_fit_em: k must be >= 1");
  if (n < k) throw DataError("gmm_fit_em: fewer rows than components");

  GmmModel best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int init = 0; init < std::max(1, opts.n_init); ++init) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(init));
    EmState st = initial_state(X, k, opts.reg_covar, rng);

    std::vector<double> trace;
    MatrixXd resp;
    double prev = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
      const double ll = e_step(X, st, opts.reg_covar, resp);
      trace.push_back(ll);
      if (std::isfinite(prev) &&
          std::abs(ll - prev) / static_cast<double>(n) < opts.tol) break;
      prev = ll;
      m_step(X, resp, opts.reg_covar, st);
    }

    const double final_ll = trace.back();
    if (final_ll > best_ll) {
      best_ll = final_ll;
      best.n_components = k;
      best.weights = st.weights;
      best.means = st.means;
      best.covariances = st.covs;
      best.log_likelihood_trace = trace;
      best.log_likelihood = final_ll;
    }
  }
  return best;
}

MatrixXd gmm_responsibilities(const GmmModel& m, const MatrixXd& X) {
  EmState st{m.weights, m.means, m.covariances};
  MatrixXd resp;
  e_step(X, st, 0.0, resp);
  return resp;
}

VectorXi gmm_predict(const GmmModel& m, const MatrixXd& X) {
  const MatrixXd resp = gmm_responsibilities(m, X);
  VectorXi labels(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    Index j;
    resp.row(i).maxCoeff(&j);
    labels[i] = static_cast<int>(j);
  }
  return labels;
}

double gmm_log_likelihood(const GmmModel& m, const MatrixXd& X) {
  EmState st{m.weights, m.means, m.covariances};
  MatrixXd resp;
  return e_step(X, st, 0.0, resp);
}

double gmm_bic(const GmmModel& m, const MatrixXd& X) {
  const double n = static_cast<double>(X.rows());
  const double d = static_cast<double>(X.cols());
  const double k = m.n_components;
  const double p = (k - 1) + k * d + k * d * (d + 1) / 2.0;
  return -2.0 * gmm_log_likelihood(m, X) + p * std::log(n);
}

BicSweep select_k_by_bic(const MatrixXd& X, int k_min, int k_max, uint64_t seed,
                         const GmmOptions& opts) {
  if (k_min < 1 || k_max < k_min) throw DataError("select_k_by_bic: bad k range");
  BicSweep sweep;
  double best = std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    const GmmModel m = gmm_fit_em(X, k, seed + static_cast<uint64_t>(k) * 7919ULL, opts);
    const double bic = gmm_bic(m, X);
    sweep.ks.push_back(k);
    sweep.bic.push_back(bic);
    if (bic < best) {
      best = bic;
      sweep.best_k = k;
    }
  }
  return sweep;
}

}  // namespace models
}  // namespace ae
