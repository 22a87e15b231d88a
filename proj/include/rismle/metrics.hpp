// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include <rismle/errors.hpp>

namespace rismle {

// Rate of the reflected link for a given configuration; snr_data is the data
// transmit power over the receiver noise power.
inline double spectral_efficiency(const Eigen::VectorXcd& theta, const Eigen::VectorXcd& h,
                                  const Eigen::VectorXcd& g, std::complex<double> d,
                                  double snr_data)
{
    const std::complex<double> field = theta.cwiseProduct(h).cwiseProduct(g).sum() + d;
    return std::log2(1.0 + snr_data * std::norm(field));
}

inline double spectral_efficiency(const Eigen::VectorXcd& theta, const Eigen::MatrixXcd& bs_ris,
                                  const Eigen::VectorXcd& g, const Eigen::VectorXcd& d,
                                  double snr_data)
{
    const Eigen::VectorXcd field = bs_ris * g.cwiseProduct(theta) + d;
    return std::log2(1.0 + snr_data * field.squaredNorm());
}

// Rate with ideal phase alignment of every reflected path and the direct one.
inline double capacity_single(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g,
                              std::complex<double> d, double snr_data)
{
    const double amplitude = h.cwiseProduct(g).cwiseAbs().sum() + std::abs(d);
    return std::log2(1.0 + snr_data * amplitude * amplitude);
}

template <typename VecA, typename VecB>
double nmse(const Eigen::MatrixBase<VecA>& estimate, const Eigen::MatrixBase<VecB>& truth)
{
    const double ref = truth.squaredNorm();
    if (ref == 0.0)
        throw undefined_metric_error("nmse: zero-norm reference");
    return (estimate - truth).squaredNorm() / ref;
}

} // namespace rismle
