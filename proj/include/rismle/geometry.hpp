// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <rismle/errors.hpp>

namespace rismle {

inline constexpr double speed_of_light = 299792458.0;

inline double wavelength_for(double carrier_hz)
{
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("carrier frequency must be positive");
    return speed_of_light / carrier_hz;
}

// Uniform planar array in the y-z plane. Element 1 is the reference at the
// origin; indexing is row-major (horizontal index runs fastest).
struct ArrayGeometry {
    int n_h = 1;
    int n_v = 1;
    double delta_h = 0.0;
    double delta_v = 0.0;
    double wavelength = 0.0;

    int size() const { return n_h * n_v; }
    double wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }
};

inline void check_geometry(const ArrayGeometry& g)
{
    if (g.n_h < 1 || g.n_v < 1)
        throw std::invalid_argument("array must have at least one element per axis");
    if (!(g.delta_h > 0.0) || !(g.delta_v > 0.0))
        throw std::invalid_argument("element spacings must be positive");
    if (!(g.wavelength > 0.0))
        throw std::invalid_argument("wavelength must be positive");
}

struct ElementOffset {
    double i = 0.0; // horizontal, meters
    double k = 0.0; // vertical, meters
};

inline ElementOffset element_offset(const ArrayGeometry& g, int n)
{
    check_geometry(g);
    if (n < 1 || n > g.size())
        throw std::invalid_argument("element index out of range: " + std::to_string(n));
    const int nh = (n - 1) % g.n_h;      // zero-based horizontal index
    const int nv = (n - 1) / g.n_h;      // zero-based vertical index
    return {nh * g.delta_h, nv * g.delta_v};
}

// Per-element offsets and their squared norms, laid out in element order.
struct OffsetTable {
    Eigen::VectorXd i;
    Eigen::VectorXd k;
    Eigen::VectorXd sq; // i^2 + k^2
};

inline OffsetTable element_offsets(const ArrayGeometry& g)
{
    check_geometry(g);
    const int n = g.size();
    OffsetTable t;
    t.i.resize(n);
    t.k.resize(n);
    for (int e = 0; e < n; ++e) {
        t.i[e] = (e % g.n_h) * g.delta_h;
        t.k[e] = (e / g.n_h) * g.delta_v;
    }
    t.sq = t.i.array().square() + t.k.array().square();
    return t;
}

// Source location seen from the reference element. A non-finite distance is
// the far-field sentinel: the response depends on angles only.
struct ChannelPoint {
    double azimuth = 0.0;
    double elevation = 0.0;
    double distance = std::numeric_limits<double>::infinity();

    static ChannelPoint far_field(double azimuth, double elevation)
    {
        return {azimuth, elevation, std::numeric_limits<double>::infinity()};
    }

    bool is_far_field() const { return !std::isfinite(distance); }
};

inline void check_angles(double azimuth, double elevation)
{
    constexpr double half_pi = std::numbers::pi / 2;
    if (!(azimuth >= -half_pi && azimuth <= half_pi))
        throw std::invalid_argument("azimuth outside the visible half-space");
    if (!(elevation >= -half_pi && elevation <= half_pi))
        throw std::invalid_argument("elevation outside the visible half-space");
}

namespace detail {

inline void near_field_phases(const ArrayGeometry& g, const OffsetTable& t, double azimuth,
                              double elevation, double r, Eigen::VectorXd& phase)
{
    const double u = std::sin(azimuth) * std::cos(elevation);
    const double w = std::sin(elevation);
    // r - r_n = (r^2 - r_n^2) / (r + r_n); avoids cancellation at large r
    Eigen::ArrayXd proj = u * t.i.array() + w * t.k.array();
    Eigen::ArrayXd rn = (r * r - 2.0 * r * proj + t.sq.array()).sqrt();
    phase = (g.wavenumber() * (2.0 * r * proj - t.sq.array()) / (rn + r)).matrix();
}

inline void far_field_phases(const ArrayGeometry& g, const OffsetTable& t, double azimuth,
                             double elevation, Eigen::VectorXd& phase)
{
    const double u = std::sin(azimuth) * std::cos(elevation);
    const double w = std::sin(elevation);
    phase = (g.wavenumber() * (u * t.i.array() + w * t.k.array())).matrix();
}

inline Eigen::VectorXcd unit_phasor(const Eigen::VectorXd& phase)
{
    Eigen::VectorXcd out(phase.size());
    out.real() = phase.array().cos();
    out.imag() = phase.array().sin();
    return out;
}

// Response written into a preallocated column; the table must match the
// geometry. Hot path for grid construction.
inline void response_into(const ArrayGeometry& g, const OffsetTable& t,
                          const ChannelPoint& p, Eigen::Ref<Eigen::VectorXcd> out)
{
    Eigen::VectorXd phase;
    if (p.is_far_field())
        far_field_phases(g, t, p.azimuth, p.elevation, phase);
    else
        near_field_phases(g, t, p.azimuth, p.elevation, p.distance, phase);
    out.real() = phase.array().cos();
    out.imag() = phase.array().sin();
}

} // namespace detail

inline Eigen::VectorXcd near_field_response(const ArrayGeometry& g, const ChannelPoint& p)
{
    check_geometry(g);
    check_angles(p.azimuth, p.elevation);
    if (!std::isfinite(p.distance) || !(p.distance > 0.0))
        throw std::invalid_argument("near-field evaluation needs a positive finite distance");
    Eigen::VectorXd phase;
    detail::near_field_phases(g, element_offsets(g), p.azimuth, p.elevation, p.distance,
                              phase);
    return detail::unit_phasor(phase);
}

inline Eigen::VectorXcd far_field_response(const ArrayGeometry& g, double azimuth,
                                           double elevation)
{
    check_geometry(g);
    check_angles(azimuth, elevation);
    Eigen::VectorXd phase;
    detail::far_field_phases(g, element_offsets(g), azimuth, elevation, phase);
    return detail::unit_phasor(phase);
}

inline Eigen::VectorXcd array_response(const ArrayGeometry& g, const ChannelPoint& p)
{
    if (p.is_far_field())
        return far_field_response(g, p.azimuth, p.elevation);
    return near_field_response(g, p);
}

// Far-field response of a uniform linear factor with the given sine argument.
// The planar far-field response factors as kron(vertical, horizontal).
inline Eigen::VectorXcd ula_factor(int count, double spacing, double wavelength,
                                   double sine)
{
    if (count < 1 || !(spacing > 0.0) || !(wavelength > 0.0))
        throw std::invalid_argument("invalid linear factor parameters");
    const double step = 2.0 * std::numbers::pi / wavelength * spacing * sine;
    Eigen::VectorXcd out(count);
    for (int m = 0; m < count; ++m)
        out[m] = std::polar(1.0, step * m);
    return out;
}

struct FieldBoundaries {
    double bjornson = 0.0;
    double near_far_border = 0.0;
    double fraunhofer = 0.0;
};

inline FieldBoundaries field_boundaries(const ArrayGeometry& g)
{
    check_geometry(g);
    if (g.size() == 1)
        return {}; // point aperture
    const double w = std::hypot(g.n_h * g.delta_h, g.n_v * g.delta_v);
    FieldBoundaries b;
    b.bjornson = 2.0 * w;
    b.fraunhofer = 2.0 * w * w / g.wavelength;
    b.near_far_border = b.fraunhofer / 10.0;
    return b;
}

} // namespace rismle
