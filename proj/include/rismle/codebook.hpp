// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#ifndef RISMLE_CODEBOOK_HPP
#define RISMLE_CODEBOOK_HPP

#include <rismle/geometry.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rismle {

struct AnglePair {
    double azimuth = 0.0;
    double elevation = 0.0;
};

// Beam separation in the coordinates that factor the response inner product:
// omega_sep is a difference of elevation sines, lambda_sep a difference of
// azimuth-sine times cos-elevation products.
struct BeamSeparation {
    double omega_sep = 0.0;
    double lambda_sep = 0.0;
};

namespace detail {

// |sin(pi count spacing x / lambda) / (count sin(pi spacing x / lambda))|
// with the removable singularities at x = m lambda/spacing evaluated as 1.
inline double array_factor_gain(int count, double spacing, double lambda, double x)
{
    const double den = std::sin(std::numbers::pi * spacing * x / lambda);
    if (std::abs(den) < 1e-13)
        return 1.0;
    return std::abs(std::sin(std::numbers::pi * count * spacing * x / lambda) /
                    (count * den));
}

} // namespace detail

// Normalized coherent-gain factors of the vertical and horizontal apertures
// at the given separation. Both land in [0, 1]; exact nulls occur at integer
// multiples of lambda/(count*spacing) that are not full periods.
inline std::pair<double, double> separation_gains(const ArrayGeometry& g,
                                                  const BeamSeparation& sep)
{
    check_geometry(g);
    return {detail::array_factor_gain(g.n_v, g.delta_v, g.wavelength, sep.omega_sep),
            detail::array_factor_gain(g.n_h, g.delta_h, g.wavelength, sep.lambda_sep)};
}

// Minimal set of mutually orthogonal beam directions, with the reflection
// configurations steering them through a known BS-RIS phase profile.
struct Codebook {
    std::vector<Eigen::VectorXcd> configs;
    std::vector<AnglePair> angle_pairs;
    AnglePair reference_pair;

    int size() const { return static_cast<int>(configs.size()); }
};

// Spatial degrees of freedom of the aperture; the codebook size approaches
// this for large arrays.
inline double dof_estimate(const ArrayGeometry& g)
{
    check_geometry(g);
    return std::numbers::pi / (g.wavelength * g.wavelength) * (g.n_h * g.delta_h) *
           (g.n_v * g.delta_v);
}

namespace detail {

// True when x is congruent to an accepted value modulo the alias period.
inline bool aliased(const std::vector<double>& accepted, double x, double period)
{
    for (double v : accepted)
        if (std::abs(std::remainder(x - v, period)) < 1e-9)
            return true;
    return false;
}

} // namespace detail

// Orthogonal codebook anchored at a reference direction. Elevation rings
// step the elevation sine by lambda/(N_V delta_V); within each ring the
// azimuth-sine times cos-elevation product steps by lambda/(N_H delta_H).
// Steps are enumerated as 0, +1, -1, +2, ... and candidates that alias an
// accepted beam (offset by a multiple of lambda/spacing) are dropped, which
// keeps the response Gram matrix a scaled identity.
inline Codebook build_codebook(const ArrayGeometry& g, const Eigen::VectorXcd& bs_ris,
                               const AnglePair& reference)
{
    check_geometry(g);
    check_angles(reference.azimuth, reference.elevation);
    if (g.delta_h > g.wavelength / 2 + 1e-12 || g.delta_v > g.wavelength / 2 + 1e-12)
        throw std::invalid_argument("codebook construction needs spacing of at most half "
                                    "a wavelength");
    if (bs_ris.size() != g.size())
        throw std::invalid_argument("BS-RIS channel length does not match the geometry");

    const double period_v = g.wavelength / g.delta_v;
    const double period_h = g.wavelength / g.delta_h;
    const double sin_el1 = std::sin(reference.elevation);
    const double base_u = std::sin(reference.azimuth) * std::cos(reference.elevation);

    Eigen::VectorXcd comp(g.size());
    for (int n = 0; n < g.size(); ++n)
        comp[n] = std::polar(1.0, -std::arg(bs_ris[n]));

    Codebook book;
    book.reference_pair = reference;

    std::vector<double> ring_sines;
    const int kmax = g.n_v / 2;
    for (int step = 0; step <= 2 * kmax; ++step) {
        const int k = (step + 1) / 2 * (step % 2 == 1 ? 1 : -1);
        const double s = k * g.wavelength / (g.n_v * g.delta_v) + sin_el1;
        if (std::abs(s) > 1.0 + 1e-12 || detail::aliased(ring_sines, s, period_v))
            continue;
        ring_sines.push_back(std::clamp(s, -1.0, 1.0));
    }

    for (double s_el : ring_sines) {
        const double elevation = std::asin(s_el);
        const double cos_el = std::cos(elevation);
        std::vector<AnglePair> ring;
        if (cos_el < 1e-9) {
            // polar cap: the response no longer depends on azimuth
            ring.push_back(AnglePair{reference.azimuth, elevation});
        } else {
            std::vector<double> ring_u;
            for (int step = 0; step <= 2 * (g.n_h - 1); ++step) {
                const int l = (step + 1) / 2 * (step % 2 == 1 ? 1 : -1);
                const double u = base_u + l * g.wavelength / (g.n_h * g.delta_h);
                if (std::abs(u) > cos_el + 1e-12 || detail::aliased(ring_u, u, period_h))
                    continue;
                ring_u.push_back(u);
                ring.push_back(
                    AnglePair{std::asin(std::clamp(u / cos_el, -1.0, 1.0)), elevation});
            }
        }
        for (const AnglePair& pair : ring) {
            Eigen::VectorXcd a = far_field_response(g, pair.azimuth, pair.elevation);
            book.angle_pairs.push_back(pair);
            book.configs.push_back(comp.cwiseProduct(a.conjugate()));
        }
    }
    return book;
}

// Unit-modulus DFT matrix of order n; columns of the (N+1)-point version make
// the stacked pilot system of the least-squares baseline unitary up to scale.
inline Eigen::MatrixXcd dft_codebook(int n)
{
    if (n < 1)
        throw std::invalid_argument("DFT codebook order must be at least one");
    Eigen::MatrixXcd f(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            f(r, c) = std::polar(
                1.0, -2.0 * std::numbers::pi *
                         static_cast<double>(static_cast<long long>(r) * c % n) / n);
    return f;
}

} // namespace rismle

#endif
