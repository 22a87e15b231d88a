// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#include <catch2/catch_amalgamated.hpp>

#include <rismle/baselines.hpp>
#include <rismle/rng.hpp>

#include <cmath>
#include <complex>
#include <vector>

namespace {

rismle::ArrayGeometry upa(int n, double frac = 0.5)
{
    const double lambda = rismle::wavelength_for(28.0e9);
    return rismle::ArrayGeometry{n, n, frac * lambda, frac * lambda, lambda};
}

Eigen::VectorXcd random_phases(rismle::Rng& rng, int n)
{
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = std::polar(1.0, rng.uniform(-std::numbers::pi, std::numbers::pi));
    return v;
}

Eigen::MatrixXcd stacked_system(const rismle::PilotRecord& rec, const Eigen::VectorXcd& h)
{
    const int l = rec.pilots(), n = rec.elements();
    Eigen::MatrixXcd a(l, n + 1);
    a.leftCols(n) = rec.configs * h.asDiagonal();
    a.col(n).setOnes();
    return std::sqrt(rec.pilot_power) * a;
}

} // namespace

TEST_CASE("DFT pilot configurations stack to an invertible system")
{
    const int n = 8;
    Eigen::MatrixXcd f(n + 1, n + 1);
    for (int l = 0; l <= n; ++l) {
        const Eigen::VectorXcd theta = rismle::dft_pilot_config(n, l);
        for (int k = 0; k < n; ++k) {
            REQUIRE_THAT(std::abs(theta[k]), Catch::Matchers::WithinAbs(1.0, 1e-12));
            f(l, k) = theta[k];
        }
        f(l, n) = 1.0;
    }
    // rows stay orthogonal because they extend to rows of the (N+1)-point DFT
    const Eigen::MatrixXcd gram = f * f.adjoint();
    for (int r = 0; r <= n; ++r)
        for (int c = 0; c <= n; ++c) {
            const double want = r == c ? static_cast<double>(n + 1) : 0.0;
            REQUIRE_THAT(std::abs(gram(r, c)), Catch::Matchers::WithinAbs(want, 1e-9));
        }

    REQUIRE(rismle::dft_pilot_config(n, 0).isApprox(Eigen::VectorXcd::Ones(n)));
    REQUIRE_THROWS_AS(rismle::dft_pilot_config(n, n + 1), std::invalid_argument);
    REQUIRE_THROWS_AS(rismle::dft_pilot_config(0, 0), std::invalid_argument);
}

TEST_CASE("least squares matches a normal-equations oracle on a small instance")
{
    rismle::Rng rng(401);
    const int n = 2, l = 3;
    rismle::PilotRecord rec;
    rec.pilot_power = 2.5;
    rec.configs = Eigen::MatrixXcd(l, n);
    for (int r = 0; r < l; ++r)
        rec.configs.row(r) = random_phases(rng, n).transpose();
    const Eigen::VectorXcd h = rng.cnormal_vector(n);
    const Eigen::VectorXcd g = rng.cnormal_vector(n);
    const std::complex<double> d = rng.cnormal();

    rec.samples = Eigen::MatrixXcd(1, l);
    for (int r = 0; r < l; ++r) {
        const std::complex<double> field =
            rec.configs.row(r).transpose().cwiseProduct(h).cwiseProduct(g).sum() + d;
        rec.samples(0, r) = std::sqrt(rec.pilot_power) * field + 0.05 * rng.cnormal();
    }

    const rismle::LsEstimate est = rismle::ls_estimate(rec, h);

    const Eigen::MatrixXcd a = stacked_system(rec, h);
    const Eigen::VectorXcd y = rec.samples.row(0).transpose();
    const Eigen::VectorXcd oracle =
        (a.adjoint() * a).fullPivLu().solve(a.adjoint() * y);
    for (int k = 0; k < n; ++k)
        REQUIRE_THAT(std::abs(est.g_hat[k] - oracle[k]), Catch::Matchers::WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(std::abs(est.d_hat - oracle[n]), Catch::Matchers::WithinAbs(0.0, 1e-9));
    REQUIRE_FALSE(est.rank_deficient);
}

TEST_CASE("noise-free DFT sounding at the full pilot count recovers the channels")
{
    rismle::Rng rng(402);
    const int n = 64;
    const Eigen::VectorXcd h = rng.cnormal_vector(n);
    const Eigen::VectorXcd g = rng.cnormal_vector(n);
    const std::complex<double> d = 4.0 * rng.cnormal();

    rismle::PilotRecord rec;
    rec.pilot_power = 10.0;
    rec.configs = Eigen::MatrixXcd(n + 1, n);
    rec.samples = Eigen::MatrixXcd(1, n + 1);
    for (int l = 0; l <= n; ++l) {
        const Eigen::VectorXcd theta = rismle::dft_pilot_config(n, l);
        rec.configs.row(l) = theta.transpose();
        rec.samples(0, l) = std::sqrt(rec.pilot_power) *
                            (theta.cwiseProduct(h).cwiseProduct(g).sum() + d);
    }

    const rismle::LsEstimate est = rismle::ls_estimate(rec, h);
    REQUIRE((est.g_hat - g).norm() <= 1e-8 * g.norm());
    REQUIRE(std::abs(est.d_hat - d) <= 1e-8 * (1.0 + std::abs(d)));
    REQUIRE_FALSE(est.rank_deficient);
}

TEST_CASE("underdetermined noise-free fits interpolate without recovering")
{
    rismle::Rng rng(403);
    const int n = 64, l = 16;
    const Eigen::VectorXcd h = rng.cnormal_vector(n);
    const Eigen::VectorXcd g = rng.cnormal_vector(n);
    const std::complex<double> d = rng.cnormal();

    rismle::PilotRecord rec;
    rec.pilot_power = 10.0;
    rec.configs = Eigen::MatrixXcd(l, n);
    rec.samples = Eigen::MatrixXcd(1, l);
    for (int r = 0; r < l; ++r) {
        const Eigen::VectorXcd theta = rismle::dft_pilot_config(n, r);
        rec.configs.row(r) = theta.transpose();
        rec.samples(0, r) = std::sqrt(rec.pilot_power) *
                            (theta.cwiseProduct(h).cwiseProduct(g).sum() + d);
    }

    const rismle::LsEstimate est = rismle::ls_estimate(rec, h);
    Eigen::VectorXcd x(n + 1);
    x.head(n) = est.g_hat;
    x[n] = est.d_hat;

    const Eigen::MatrixXcd a = stacked_system(rec, h);
    const Eigen::VectorXcd y = rec.samples.row(0).transpose();
    REQUIRE((a * x - y).norm() <= 1e-8 * y.norm());
    REQUIRE((est.g_hat - g).norm() > 1e-3);

    // minimum-norm solution cannot exceed the norm of any other solution
    Eigen::VectorXcd truth(n + 1);
    truth.head(n) = g;
    truth[n] = d;
    REQUIRE(x.norm() <= truth.norm() + 1e-9);
    REQUIRE_FALSE(est.rank_deficient);
}

TEST_CASE("repeated soundings at full pilot count raise the conditioning flag")
{
    rismle::Rng rng(404);
    const int n = 4;
    const Eigen::VectorXcd h = rng.cnormal_vector(n);
    const Eigen::VectorXcd g = rng.cnormal_vector(n);

    rismle::PilotRecord rec;
    rec.configs = Eigen::MatrixXcd(n + 1, n);
    rec.samples = Eigen::MatrixXcd(1, n + 1);
    for (int l = 0; l <= n; ++l) {
        const Eigen::VectorXcd theta =
            l == n ? rismle::dft_pilot_config(n, 0) : rismle::dft_pilot_config(n, l);
        rec.configs.row(l) = theta.transpose();
        rec.samples(0, l) = theta.cwiseProduct(h).cwiseProduct(g).sum();
    }

    REQUIRE(rismle::ls_estimate(rec, h).rank_deficient);
}

TEST_CASE("quaternary tree levels partition the visible square")
{
    rismle::Rng rng(405);
    const rismle::ArrayGeometry geom = upa(16);
    const Eigen::VectorXcd h = random_phases(rng, geom.size());

    const rismle::HierTree one = rismle::build_hier_codebook(geom, h, 1);
    REQUIRE(one.levels.size() == 2);
    REQUIRE(one.levels[0].size() == 1);
    REQUIRE(one.levels[1].size() == 4);
    const double quad[4][4] = {{-1, 0, -1, 0}, {0, 1, -1, 0}, {-1, 0, 0, 1}, {0, 1, 0, 1}};
    for (int k = 0; k < 4; ++k) {
        const rismle::HierNode& c = one.levels[1][k];
        REQUIRE(c.u_lo == quad[k][0]);
        REQUIRE(c.u_hi == quad[k][1]);
        REQUIRE(c.w_lo == quad[k][2]);
        REQUIRE(c.w_hi == quad[k][3]);
        for (int i = 0; i < geom.size(); ++i)
            REQUIRE_THAT(std::abs(c.config[i]), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }

    const rismle::HierTree deep = rismle::build_hier_codebook(geom, h, 4);
    REQUIRE(deep.levels.size() == 5);
    for (int level = 0; level <= 4; ++level)
        REQUIRE(deep.levels[level].size() == 1ull << (2 * level));

    // children tile their parent exactly
    for (std::size_t p = 0; p < deep.levels[2].size(); ++p) {
        const rismle::HierNode& parent = deep.levels[2][p];
        const double um = 0.5 * (parent.u_lo + parent.u_hi);
        const double wm = 0.5 * (parent.w_lo + parent.w_hi);
        for (int k = 0; k < 4; ++k) {
            const rismle::HierNode& c = deep.levels[3][4 * p + k];
            REQUIRE(c.u_lo == (k % 2 == 0 ? parent.u_lo : um));
            REQUIRE(c.u_hi == (k % 2 == 0 ? um : parent.u_hi));
            REQUIRE(c.w_lo == (k / 2 == 0 ? parent.w_lo : wm));
            REQUIRE(c.w_hi == (k / 2 == 0 ? wm : parent.w_hi));
        }
    }

    REQUIRE_THROWS_AS(rismle::build_hier_codebook(geom, h, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(rismle::build_hier_codebook(geom, h, 0), std::invalid_argument);
}

TEST_CASE("noise-free beam training descends to the strongest leaf")
{
    rismle::Rng rng(406);
    const rismle::ArrayGeometry geom = upa(16);
    const Eigen::VectorXcd h = random_phases(rng, geom.size());
    const rismle::HierTree tree = rismle::build_hier_codebook(geom, h, 4);

    // user exactly at the center direction of an interior leaf cell
    const rismle::HierNode& target = tree.levels[4][4 * (4 * (4 * 2 + 1) + 3) + 2];
    const rismle::AnglePair center = rismle::detail::direction_in_cell(
        0.5 * (target.u_lo + target.u_hi), 0.5 * (target.w_lo + target.w_hi));
    const Eigen::VectorXcd g =
        rismle::far_field_response(geom, center.azimuth, center.elevation);

    rismle::LinkRealization link;
    link.bs_ris = h.transpose();
    link.g = g;
    link.d = Eigen::VectorXcd::Zero(1);
    link.pilot_power = 10.0;
    link.snr_data = 1.0;

    const rismle::HierResult res =
        rismle::hierarchical_search(link, tree, rismle::zero_noise);
    REQUIRE(res.pilots_used == 16);
    REQUIRE(res.se_trace.size() == 4);

    // independent check: exhaustive scan confirms that leaf has the top gain
    double best = -1.0;
    const rismle::HierNode* best_leaf = nullptr;
    for (const rismle::HierNode& leaf : tree.levels[4]) {
        const double gain =
            std::norm(leaf.config.cwiseProduct(h).cwiseProduct(g).sum());
        if (gain > best) {
            best = gain;
            best_leaf = &leaf;
        }
    }
    REQUIRE(best_leaf == &target);
    REQUIRE(res.config.isApprox(target.config));

    const double final_rate = rismle::spectral_efficiency(res.config, h, g, 0.0, 1.0);
    REQUIRE_THAT(res.se_trace.back(), Catch::Matchers::WithinAbs(final_rate, 1e-12));
}

TEST_CASE("tied powers resolve to the lowest child index")
{
    rismle::Rng rng(407);
    const rismle::ArrayGeometry geom = upa(16);
    const Eigen::VectorXcd h = random_phases(rng, geom.size());
    const rismle::HierTree tree = rismle::build_hier_codebook(geom, h, 2);

    rismle::LinkRealization link;
    link.bs_ris = h.transpose();
    link.g = Eigen::VectorXcd::Zero(geom.size());
    link.d = Eigen::VectorXcd::Zero(1);

    const rismle::HierResult res =
        rismle::hierarchical_search(link, tree, rismle::zero_noise);
    REQUIRE(res.pilots_used == 8);
    REQUIRE(res.config.isApprox(tree.levels[2][0].config));
    for (double r : res.se_trace)
        REQUIRE(r == 0.0);
}
