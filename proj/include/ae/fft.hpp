#pragma once

#include <complex>
#include <unsupported/Eigen/FFT>

#include "ae/types.hpp"

namespace ae {

using Eigen::VectorXcd;

/// Thin wrapper over Eigen's FFT. Plans are cached per size inside the
/// instance, so keep one Fft per worker thread.
class Fft {
 public:
  VectorXcd forward(const ArrayXd& x) {
    Eigen::VectorXd tmp = x.matrix();
    VectorXcd out;
    impl_.fwd(out, tmp);
    return out;
  }

  VectorXcd forward(const VectorXcd& x) {
    VectorXcd out;
    impl_.fwd(out, x);
    return out;
  }

  VectorXcd inverse(const VectorXcd& X) {
    VectorXcd out;
    impl_.inv(out, X);
    return out;
  }

  /// Inverse transform of a conjugate-symmetric spectrum, real output.
  ArrayXd inverse_real(const VectorXcd& X) {
    Eigen::VectorXd out;
    impl_.inv(out, X);
    return out.array();
  }

 private:
  Eigen::FFT<double> impl_;
};

}  // namespace ae
