// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#ifndef RISMLE_WIDEBEAM_HPP
#define RISMLE_WIDEBEAM_HPP

#include <rismle/codebook.hpp>
#include <rismle/errors.hpp>
#include <rismle/geometry.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rismle {

// Partition of the RIS into contiguous row blocks, with the orthogonal beam
// directions available to each block. Element spacing lambda/2^x gives blocks
// of 2^{x-1} rows, so every block has exactly the aperture whose beamwidth
// tiles the visible region with subris_count beams.
struct WideBeamPlan {
    ArrayGeometry geom;
    int spacing_exponent = 1; // x in delta = lambda/2^x
    int subris_rows = 1;      // rows per block, 2^{x-1}
    int subris_count = 0;     // S blocks
    int subris_size = 0;      // N_S elements per block
    std::vector<AnglePair> per_subris_pairs; // sub-array codebook, build order

    ArrayGeometry subris_geometry() const
    {
        return ArrayGeometry{geom.n_h, subris_rows, geom.delta_h, geom.delta_v,
                             geom.wavelength};
    }
};

// Two initial pilot configurations.
struct InitConfigs {
    Eigen::VectorXcd theta1;
    Eigen::VectorXcd theta2;
};

inline WideBeamPlan plan_subris(const ArrayGeometry& g)
{
    check_geometry(g);
    if (g.n_h != g.n_v)
        throw unsupported_geometry_error("wide beams require a square RIS");
    if (std::abs(g.delta_h - g.delta_v) > 1e-15)
        throw unsupported_geometry_error("wide beams require equal spacings");
    const double ratio = g.wavelength / g.delta_h;
    const int x = static_cast<int>(std::lround(std::log2(ratio)));
    if (x < 1 || std::abs(ratio - std::ldexp(1.0, x)) > 1e-9 * ratio)
        throw unsupported_geometry_error("spacing must be lambda over a power of two");

    WideBeamPlan plan;
    plan.geom = g;
    plan.spacing_exponent = x;
    plan.subris_rows = 1 << (x - 1);
    if (g.n_v % plan.subris_rows != 0)
        throw unsupported_geometry_error("sub-RIS rows must tile the array height");
    plan.subris_count = g.n_v / plan.subris_rows;
    plan.subris_size = plan.subris_rows * g.n_h;

    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(plan.subris_size);
    Codebook sub = build_codebook(plan.subris_geometry(), ones,
                                  AnglePair{std::numbers::pi / 2, 0.0});
    plan.per_subris_pairs = sub.angle_pairs;
    if (static_cast<int>(plan.per_subris_pairs.size()) < plan.subris_count)
        throw unsupported_geometry_error("sub-RIS codebook smaller than the block count");
    return plan;
}

namespace detail {

inline std::vector<AnglePair> azimuth_sorted(const std::vector<AnglePair>& pairs)
{
    std::vector<AnglePair> out = pairs;
    std::stable_sort(out.begin(), out.end(), [](const AnglePair& a, const AnglePair& b) {
        return a.azimuth < b.azimuth;
    });
    return out;
}

inline void check_compensation(const WideBeamPlan& plan, const Eigen::VectorXcd& bs_ris)
{
    if (bs_ris.size() != plan.geom.size())
        throw std::invalid_argument("BS-RIS channel length does not match the geometry");
}

inline Eigen::VectorXcd phase_compensation(const Eigen::VectorXcd& bs_ris)
{
    Eigen::VectorXcd comp(bs_ris.size());
    for (int n = 0; n < bs_ris.size(); ++n)
        comp[n] = std::polar(1.0, -std::arg(bs_ris[n]));
    return comp;
}

// Steers consecutive blocks of `block_rows` rows at the listed pairs, in
// order. A final shorter block (odd split) reuses the last pair.
inline Eigen::VectorXcd blockwise_beam(const WideBeamPlan& plan,
                                       const std::vector<AnglePair>& pairs, int block_rows)
{
    const ArrayGeometry& g = plan.geom;
    Eigen::VectorXcd theta(g.size());
    int row = 0;
    std::size_t idx = 0;
    while (row < g.n_v) {
        const int rows = std::min(block_rows, g.n_v - row);
        const AnglePair pair = pairs[std::min(idx, pairs.size() - 1)];
        ArrayGeometry block{g.n_h, rows, g.delta_h, g.delta_v, g.wavelength};
        theta.segment(row * g.n_h, rows * g.n_h) =
            far_field_response(block, pair.azimuth, pair.elevation).conjugate();
        row += rows;
        ++idx;
    }
    return theta;
}

} // namespace detail

// Near-isotropic beam: each sub-RIS steers one codebook direction, so the
// union of the per-block beams tiles the visible region. Pairs are assigned
// by ascending azimuth to ascending block index.
inline Eigen::VectorXcd isotropic_beam(const WideBeamPlan& plan,
                                       const Eigen::VectorXcd& bs_ris)
{
    detail::check_compensation(plan, bs_ris);
    if (static_cast<int>(plan.per_subris_pairs.size()) < plan.subris_count)
        throw std::invalid_argument("plan has fewer pairs than sub-RIS blocks");
    std::vector<AnglePair> pairs = detail::azimuth_sorted(plan.per_subris_pairs);
    pairs.resize(plan.subris_count);
    return detail::phase_compensation(bs_ris)
        .cwiseProduct(detail::blockwise_beam(plan, pairs, plan.subris_rows));
}

// Two beams that each cover one azimuth half-space: the sorted pair list is
// split at the median and each half steers doubled blocks (two sub-RISs per
// pair), trading coverage for 3 dB of per-direction gain.
inline InitConfigs half_space_beams(const WideBeamPlan& plan, const Eigen::VectorXcd& bs_ris)
{
    detail::check_compensation(plan, bs_ris);
    std::vector<AnglePair> pairs = detail::azimuth_sorted(plan.per_subris_pairs);
    if (pairs.size() < 2)
        throw std::invalid_argument("need at least two pairs to split");
    const std::size_t half = pairs.size() / 2;
    const std::size_t per_beam =
        std::min<std::size_t>(std::max(plan.subris_count / 2, 1), half);
    std::vector<AnglePair> left(pairs.begin(), pairs.begin() + per_beam);
    std::vector<AnglePair> right(pairs.begin() + half, pairs.begin() + half + per_beam);

    Eigen::VectorXcd comp = detail::phase_compensation(bs_ris);
    InitConfigs out;
    out.theta1 = comp.cwiseProduct(detail::blockwise_beam(plan, left, 2 * plan.subris_rows));
    out.theta2 = comp.cwiseProduct(detail::blockwise_beam(plan, right, 2 * plan.subris_rows));
    return out;
}

// First two pilot configurations from a previous fix: the codebook entries
// most correlated with the previous configuration, ties by codebook order.
inline InitConfigs smart_init(const Codebook& book, const Eigen::VectorXcd& previous)
{
    if (book.size() < 2)
        throw std::invalid_argument("smart initialization needs at least two codebook "
                                    "entries");
    if (previous.size() != book.configs.front().size())
        throw std::invalid_argument("previous configuration has the wrong length");

    int first = -1, second = -1;
    double v1 = -1.0, v2 = -1.0;
    for (int i = 0; i < book.size(); ++i) {
        const double c = std::abs(previous.dot(book.configs[i]));
        if (c > v1) {
            second = first;
            v2 = v1;
            first = i;
            v1 = c;
        } else if (c > v2) {
            second = i;
            v2 = c;
        }
    }
    return InitConfigs{book.configs[first], book.configs[second]};
}

} // namespace rismle

#endif
