// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <rismle/adaptive.hpp>
#include <rismle/estimator.hpp>
#include <rismle/geometry.hpp>
#include <rismle/widebeam.hpp>

namespace rismle {

// Pilot configuration l of the non-parametric baseline: row l of the
// (N+1)-point DFT with the constant column left out, so that stacking the
// configurations next to the direct-path ones-column gives a square
// invertible system at L = N+1.
inline Eigen::VectorXcd dft_pilot_config(int n, int l)
{
    if (n < 1 || l < 0 || l > n)
        throw std::invalid_argument("dft_pilot_config: index out of range");
    const int size = n + 1;
    Eigen::VectorXcd theta(n);
    for (int k = 0; k < n; ++k) {
        const long long turns = static_cast<long long>(l) * (k + 1) % size;
        theta[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(turns) /
                                       static_cast<double>(size));
    }
    return theta;
}

struct LsEstimate {
    Eigen::VectorXcd g_hat;
    std::complex<double> d_hat;
    bool rank_deficient = false;
};

// Minimum-norm least-squares fit of y = sqrt(P) [B D_h, 1][g; d] + w.
inline LsEstimate ls_estimate(const PilotRecord& rec, const Eigen::VectorXcd& h)
{
    if (rec.antennas() != 1)
        throw std::invalid_argument("ls_estimate expects a single-antenna record");
    if (rec.pilots() < 1)
        throw std::invalid_argument("ls_estimate needs at least one pilot");
    const int l = rec.pilots(), n = rec.elements();
    Eigen::MatrixXcd a(l, n + 1);
    a.leftCols(n) = rec.configs * h.asDiagonal();
    a.col(n).setOnes();
    a *= std::sqrt(rec.pilot_power);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(a);
    cod.setThreshold(1e-10);
    const Eigen::VectorXcd x = cod.solve(rec.samples.row(0).transpose());

    LsEstimate out;
    out.g_hat = x.head(n);
    out.d_hat = x[n];
    out.rank_deficient = cod.rank() < std::min(l, n + 1);
    return out;
}

// One cell of the quaternary beam-training tree, axis-aligned in
// (sin azimuth, sin elevation) space.
struct HierNode {
    int level = 0;
    double u_lo = -1.0, u_hi = 1.0;
    double w_lo = -1.0, w_hi = 1.0;
    Eigen::VectorXcd config;
};

// levels[k] holds the 4^k nodes of depth k in Z-order: the children of
// levels[k][i] are levels[k + 1][4 i .. 4 i + 3].
struct HierTree {
    ArrayGeometry geom;
    int depth = 0;
    std::vector<std::vector<HierNode>> levels;
};

namespace detail {

inline AnglePair direction_in_cell(double u, double w)
{
    w = std::clamp(w, -1.0, 1.0);
    const double el = std::asin(w);
    const double span = std::cos(el);
    const double s = span > 0.0 ? std::clamp(u / span, -1.0, 1.0) : 0.0;
    return {std::asin(s), el};
}

// Wide beam covering one tree cell. Blocks grow with depth so that the
// per-block elevation beamwidth matches the cell height, and each block
// takes one azimuth slot; the slots tile the cell width because the block
// azimuth beamwidth equals the cell width divided by the block count.
inline Eigen::VectorXcd cell_beam(const WideBeamPlan& plan, const Eigen::VectorXcd& comp,
                                  const HierNode& cell)
{
    const ArrayGeometry& g = plan.geom;
    const int rows = std::min(plan.subris_rows << cell.level, g.n_v);
    const int blocks = std::max(g.n_v / rows, 1);
    const double w_mid = 0.5 * (cell.w_lo + cell.w_hi);
    std::vector<AnglePair> pairs;
    pairs.reserve(blocks);
    for (int b = 0; b < blocks; ++b) {
        const double u = cell.u_lo + (cell.u_hi - cell.u_lo) * (b + 0.5) / blocks;
        pairs.push_back(direction_in_cell(u, w_mid));
    }
    return comp.cwiseProduct(blockwise_beam(plan, pairs, rows));
}

} // namespace detail

// Quaternary-tree beam-training codebook: interior nodes carry wide beams
// covering their cell, leaves carry narrow beams at the cell centers.
inline HierTree build_hier_codebook(const ArrayGeometry& g, const Eigen::VectorXcd& h, int depth)
{
    check_geometry(g);
    if (depth < 1)
        throw std::invalid_argument("build_hier_codebook: depth must be positive");
    double leaves = std::pow(4.0, depth);
    if (leaves > static_cast<double>(g.size()))
        throw std::invalid_argument("build_hier_codebook: depth exceeds angular resolution");
    const WideBeamPlan plan = plan_subris(g);
    const Eigen::VectorXcd comp = detail::phase_compensation(h);

    HierTree tree;
    tree.geom = g;
    tree.depth = depth;
    tree.levels.resize(depth + 1);
    tree.levels[0].push_back(HierNode{});
    for (int level = 1; level <= depth; ++level) {
        const auto& parents = tree.levels[level - 1];
        auto& nodes = tree.levels[level];
        nodes.reserve(parents.size() * 4);
        for (const HierNode& p : parents) {
            const double um = 0.5 * (p.u_lo + p.u_hi), wm = 0.5 * (p.w_lo + p.w_hi);
            for (int k = 0; k < 4; ++k) {
                HierNode c;
                c.level = level;
                c.u_lo = k % 2 == 0 ? p.u_lo : um;
                c.u_hi = k % 2 == 0 ? um : p.u_hi;
                c.w_lo = k / 2 == 0 ? p.w_lo : wm;
                c.w_hi = k / 2 == 0 ? wm : p.w_hi;
                nodes.push_back(std::move(c));
            }
        }
        for (HierNode& c : nodes) {
            if (level == depth) {
                const AnglePair center = detail::direction_in_cell(
                    0.5 * (c.u_lo + c.u_hi), 0.5 * (c.w_lo + c.w_hi));
                c.config = comp.cwiseProduct(
                    far_field_response(g, center.azimuth, center.elevation).conjugate());
            } else {
                c.config = detail::cell_beam(plan, comp, c);
            }
        }
    }
    return tree;
}

struct HierResult {
    Eigen::VectorXcd config;
    std::vector<double> se_trace; // winner rate per level, true channels
    int pilots_used = 0;
};

// Beam-training descent: per level, sound all four child beams and keep the
// strongest received power (direct path included); ties go to the lowest
// child index.
template <typename NoiseFn>
HierResult hierarchical_search(const LinkRealization& link, const HierTree& tree,
                               NoiseFn&& noise)
{
    const Eigen::VectorXcd h = link.bs_ris.row(0).transpose();
    const double root_p = std::sqrt(link.pilot_power);
    HierResult out;
    int at = 0;
    for (int level = 1; level <= tree.depth; ++level) {
        int winner = 0;
        double power = -1.0;
        for (int k = 0; k < 4; ++k) {
            const HierNode& child = tree.levels[level][4 * at + k];
            const Eigen::VectorXcd y =
                root_p * (link.bs_ris * child.config.cwiseProduct(link.g) + link.d) +
                noise(static_cast<int>(link.bs_ris.rows()));
            ++out.pilots_used;
            if (y.squaredNorm() > power) {
                power = y.squaredNorm();
                winner = k;
            }
        }
        at = 4 * at + winner;
        const HierNode& best = tree.levels[level][at];
        out.se_trace.push_back(
            spectral_efficiency(best.config, h, link.g, link.d[0], link.snr_data));
        out.config = best.config;
    }
    return out;
}

} // namespace rismle
