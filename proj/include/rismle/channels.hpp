// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

#include <rismle/geometry.hpp>
#include <rismle/rng.hpp>

namespace rismle {

// Line-of-sight user-RIS channel: g = sqrt(beta) e^{j omega} a(point).
struct LosChannel {
    double beta = 1.0;   // power gain to the reference element
    double omega = 0.0;  // phase at the reference element
    ChannelPoint point;
};

struct RicianSpec {
    double k_factor_db = 0.0;
    Eigen::MatrixXcd correlation; // Hermitian PSD, unit diagonal
};

inline Eigen::VectorXcd dense_los(const ArrayGeometry& g, const LosChannel& los)
{
    if (!(los.beta >= 0.0))
        throw std::invalid_argument("LOS gain must be nonnegative");
    return std::sqrt(los.beta) * std::polar(1.0, los.omega) * array_response(g, los.point);
}

inline std::complex<double> sample_direct(Rng& rng, double variance)
{
    if (!(variance >= 0.0))
        throw std::invalid_argument("direct-channel variance must be nonnegative");
    if (variance == 0.0)
        return {0.0, 0.0};
    return std::sqrt(variance) * rng.cnormal();
}

inline Eigen::VectorXcd sample_direct_vector(Rng& rng, double variance, int m)
{
    Eigen::VectorXcd d(m);
    for (int i = 0; i < m; ++i)
        d[i] = sample_direct(rng, variance);
    return d;
}

// Isotropic-scattering spatial correlation over the element lattice:
// entry (n, m) = sinc(2 ||pos_n - pos_m|| / lambda).
inline Eigen::MatrixXcd sinc_correlation(const ArrayGeometry& g)
{
    const auto t = element_offsets(g);
    const int n = g.size();
    Eigen::MatrixXcd r(n, n);
    for (int a = 0; a < n; ++a) {
        r(a, a) = 1.0;
        for (int b = a + 1; b < n; ++b) {
            const double dist = std::hypot(t.i[a] - t.i[b], t.k[a] - t.k[b]);
            const double x = 2.0 * dist / g.wavelength;
            const double pix = std::numbers::pi * x;
            const double v = x == 0.0 ? 1.0 : std::sin(pix) / pix;
            r(a, b) = v;
            r(b, a) = v;
        }
    }
    return r;
}

// Factor F with F F^H equal to the correlation after clipping negative
// eigenvalues at zero. Rejects matrices that are meaningfully indefinite.
inline Eigen::MatrixXcd correlation_factor(const Eigen::MatrixXcd& correlation)
{
    if (correlation.rows() != correlation.cols())
        throw std::invalid_argument("correlation matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(correlation);
    if (es.info() != Eigen::Success)
        throw std::invalid_argument("correlation eigendecomposition failed");
    const double top = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() < -1e-8 * std::max(top, 1.0))
        throw std::invalid_argument("correlation matrix is not positive semidefinite");
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * clipped.cwiseSqrt().asDiagonal();
}

// Rician composite around a LOS mean with spatially correlated Rayleigh
// scattering; the factor argument must come from correlation_factor.
inline Eigen::VectorXcd sample_rician(Rng& rng, const ArrayGeometry& g,
                                      const LosChannel& los, const RicianSpec& spec,
                                      const Eigen::MatrixXcd& factor)
{
    const double k = std::pow(10.0, spec.k_factor_db / 10.0);
    const Eigen::VectorXcd scatter =
        std::sqrt(los.beta) * (factor * rng.cnormal_vector(static_cast<int>(factor.cols())));
    return std::sqrt(k / (k + 1.0)) * dense_los(g, los) +
           std::sqrt(1.0 / (k + 1.0)) * scatter;
}

inline Eigen::VectorXcd sample_rician(Rng& rng, const ArrayGeometry& g,
                                      const LosChannel& los, const RicianSpec& spec)
{
    return sample_rician(rng, g, los, spec, correlation_factor(spec.correlation));
}

// Rician BS-RIS channel around a rank-1 LOS mean; every antenna row gets an
// independent scattering draw with the RIS-side spatial correlation. Drawn
// once per coherence block and treated as known by the estimators.
inline Eigen::MatrixXcd sample_rician_bs_ris(Rng& rng, const Eigen::MatrixXcd& los,
                                             double k_factor_db,
                                             const Eigen::MatrixXcd& factor)
{
    const double k = std::pow(10.0, k_factor_db / 10.0);
    Eigen::MatrixXcd scatter(los.rows(), los.cols());
    for (int r = 0; r < los.rows(); ++r)
        scatter.row(r) =
            (factor * rng.cnormal_vector(static_cast<int>(factor.cols()))).transpose();
    return std::sqrt(k / (k + 1.0)) * los + std::sqrt(1.0 / (k + 1.0)) * scatter;
}

// Known BS-RIS channel: unit-modulus LOS from a fixed BS direction. Rows are
// BS antennas (half-wavelength ULA), columns are RIS elements; m = 1 gives
// the single-antenna row vector h^T.
inline Eigen::MatrixXcd synth_bs_ris(const ArrayGeometry& g, int m,
                                     double bs_azimuth = 0.0, double bs_elevation = 0.0,
                                     double bs_array_sine = 0.0)
{
    if (m < 1)
        throw std::invalid_argument("antenna count must be at least 1");
    const Eigen::VectorXcd ris_side = far_field_response(g, bs_azimuth, bs_elevation);
    const Eigen::VectorXcd bs_side =
        ula_factor(m, g.wavelength / 2.0, g.wavelength, bs_array_sine);
    return bs_side * ris_side.transpose();
}

} // namespace rismle
