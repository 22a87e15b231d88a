// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#include <catch2/catch_amalgamated.hpp>

#include <rismle/rng.hpp>
#include <rismle/widebeam.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

using namespace rismle;

namespace {

ArrayGeometry upa(int n, double frac, double lambda = 0.0107069)
{
    return ArrayGeometry{n, n, frac * lambda, frac * lambda, lambda};
}

double beam_gain(const ArrayGeometry& g, const Eigen::VectorXcd& theta, double az, double el)
{
    return std::norm(theta.cwiseProduct(far_field_response(g, az, el)).sum());
}

std::vector<AnglePair> selected_pairs(const WideBeamPlan& plan)
{
    std::vector<AnglePair> pairs = plan.per_subris_pairs;
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const AnglePair& a, const AnglePair& b) {
                         return a.azimuth < b.azimuth;
                     });
    pairs.resize(plan.subris_count);
    return pairs;
}

// direction-cosine span the isotropic beam is designed to tile
std::pair<double, double> coverage_span(const WideBeamPlan& plan)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const AnglePair& p : selected_pairs(plan)) {
        const double u = std::sin(p.azimuth) * std::cos(p.elevation);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    return {lo, hi};
}

} // namespace

TEST_CASE("sub-RIS partition follows the spacing exponent", "[widebeam]")
{
    SECTION("quarter-wavelength 16x16")
    {
        WideBeamPlan plan = plan_subris(upa(16, 0.25));
        CHECK(plan.spacing_exponent == 2);
        CHECK(plan.subris_rows == 2);
        CHECK(plan.subris_size == 32);
        CHECK(plan.subris_count == 8);
        CHECK(plan.subris_count * plan.subris_size == 256);
        CHECK(static_cast<int>(plan.per_subris_pairs.size()) >= plan.subris_count);
    }

    SECTION("half-wavelength 32x32")
    {
        WideBeamPlan plan = plan_subris(upa(32, 0.5));
        CHECK(plan.spacing_exponent == 1);
        CHECK(plan.subris_rows == 1);
        CHECK(plan.subris_size == 32);
        CHECK(plan.subris_count == 32);
    }

    SECTION("smallest square case")
    {
        WideBeamPlan plan = plan_subris(upa(2, 0.5));
        CHECK(plan.subris_count == 2);
        CHECK(plan.subris_size == 2);
    }

    SECTION("invalid geometries are rejected")
    {
        CHECK_THROWS_AS(plan_subris(ArrayGeometry{4, 8, 0.005, 0.005, 0.02}),
                        unsupported_geometry_error);
        CHECK_THROWS_AS(plan_subris(ArrayGeometry{4, 4, 0.02 / 3, 0.02 / 3, 0.02}),
                        unsupported_geometry_error);
        CHECK_THROWS_AS(plan_subris(ArrayGeometry{4, 4, 0.005, 0.01, 0.02}),
                        unsupported_geometry_error);
    }
}

TEST_CASE("isotropic beam concatenates orthogonal sub-RIS responses", "[widebeam]")
{
    ArrayGeometry g = upa(16, 0.25);
    WideBeamPlan plan = plan_subris(g);
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(g.size());
    Eigen::VectorXcd theta = isotropic_beam(plan, ones);

    CHECK((theta.cwiseAbs() - Eigen::VectorXd::Ones(g.size())).cwiseAbs().maxCoeff() < 1e-12);

    SECTION("segments are conjugated sub-array responses")
    {
        std::vector<AnglePair> pairs = selected_pairs(plan);
        ArrayGeometry sub = plan.subris_geometry();
        for (int s = 0; s < plan.subris_count; ++s) {
            Eigen::VectorXcd want =
                far_field_response(sub, pairs[s].azimuth, pairs[s].elevation).conjugate();
            CHECK((theta.segment(s * plan.subris_size, plan.subris_size) - want)
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
        }
    }

    SECTION("distinct pairs are orthogonal on the sub-array")
    {
        ArrayGeometry sub = plan.subris_geometry();
        const int eta = static_cast<int>(plan.per_subris_pairs.size());
        Eigen::MatrixXcd a(sub.size(), eta);
        for (int j = 0; j < eta; ++j)
            a.col(j) = far_field_response(sub, plan.per_subris_pairs[j].azimuth,
                                          plan.per_subris_pairs[j].elevation);
        Eigen::MatrixXcd gram = a.adjoint() * a;
        for (int i = 0; i < eta; ++i)
            for (int j = 0; j < eta; ++j)
                if (i != j)
                    CHECK(std::abs(gram(i, j)) < 1e-9 * plan.subris_size);
    }
}

TEST_CASE("isotropic beam gain is flat over its coverage span", "[widebeam]")
{
    ArrayGeometry g = upa(16, 0.25);
    WideBeamPlan plan = plan_subris(g);
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(g.size());
    Eigen::VectorXcd theta = isotropic_beam(plan, ones);

    auto [lo, hi] = coverage_span(plan);
    const int grid = 181;
    double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
    std::vector<double> gains;
    for (int i = 0; i < grid; ++i) {
        const double u = lo + (hi - lo) * (i + 0.5) / grid;
        for (int j = 0; j < grid; ++j) {
            const double w = -1.0 + 2.0 * (j + 0.5) / grid;
            if (u * u + w * w >= 1.0)
                continue;
            const double el = std::asin(w);
            const double az = std::asin(u / std::cos(el));
            const double gain = beam_gain(g, theta, az, el);
            gmin = std::min(gmin, gain);
            gmax = std::max(gmax, gain);
            gains.push_back(gain);
        }
    }
    // cancelation notches between pointing slots are real but razor thin:
    // nearly every direction sits within 20 dB of the peak
    long within = std::count_if(gains.begin(), gains.end(),
                                [gmax = gmax](double v) { return v >= 0.01 * gmax; });
    INFO("flatness " << 10.0 * std::log10(gmax / gmin) << " dB, "
                     << 100.0 * within / gains.size() << "% within 20 dB");
    CHECK(static_cast<double>(within) >= 0.99 * static_cast<double>(gains.size()));
    CHECK(10.0 * std::log10(gmax / gmin) <= 40.0);
}

TEST_CASE("half-space beams split coverage without losing it", "[widebeam]")
{
    ArrayGeometry g = upa(16, 0.25);
    WideBeamPlan plan = plan_subris(g);
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(g.size());
    Eigen::VectorXcd iso = isotropic_beam(plan, ones);
    InitConfigs init = half_space_beams(plan, ones);

    CHECK((init.theta1.cwiseAbs() - Eigen::VectorXd::Ones(g.size())).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((init.theta2.cwiseAbs() - Eigen::VectorXd::Ones(g.size())).cwiseAbs().maxCoeff() <
          1e-12);

    SECTION("combined gain stays within 3 dB of the isotropic beam")
    {
        auto [lo, hi] = coverage_span(plan);
        const int grid = 181;

        // horizon cut: pointwise everywhere
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid; ++i) {
            const double az = std::asin(lo + (hi - lo) * (i + 0.5) / grid);
            const double ref = beam_gain(g, iso, az, 0.0);
            const double best = std::max(beam_gain(g, init.theta1, az, 0.0),
                                         beam_gain(g, init.theta2, az, 0.0));
            worst = std::min(worst, best / ref);
        }
        INFO("horizon worst combined/isotropic ratio " << 10.0 * std::log10(worst) << " dB");
        CHECK(10.0 * std::log10(worst) >= -3.0);

        // full grid: doubled blocks null out at |sin el| -> 1, so cap elevation
        long covered = 0, total = 0;
        for (int i = 0; i < grid; ++i) {
            const double u = lo + (hi - lo) * (i + 0.5) / grid;
            for (int j = 0; j < grid; ++j) {
                const double w = -1.0 + 2.0 * (j + 0.5) / grid;
                if (u * u + w * w >= 1.0 || std::abs(w) > 0.71)
                    continue;
                const double el = std::asin(w);
                const double az = std::asin(u / std::cos(el));
                const double ref = beam_gain(g, iso, az, el);
                const double best = std::max(beam_gain(g, init.theta1, az, el),
                                             beam_gain(g, init.theta2, az, el));
                ++total;
                if (best >= ref * 0.501187)
                    ++covered;
            }
        }
        INFO("covered " << covered << " of " << total);
        CHECK(static_cast<double>(covered) >= 0.99 * static_cast<double>(total));
    }
}

TEST_CASE("half-space construction splits the sorted pairs disjointly", "[widebeam]")
{
    for (double frac : {0.25, 0.5}) {
        ArrayGeometry g = upa(16, frac);
        WideBeamPlan plan = plan_subris(g);
        std::vector<AnglePair> pairs = plan.per_subris_pairs;
        std::stable_sort(pairs.begin(), pairs.end(),
                         [](const AnglePair& a, const AnglePair& b) {
                             return a.azimuth < b.azimuth;
                         });
        const std::size_t half = pairs.size() / 2;
        const std::size_t per_beam = plan.subris_count / 2;
        // the two assigned sets come from opposite sides of the median
        for (std::size_t i = 0; i < per_beam; ++i) {
            CHECK(pairs[i].azimuth < pairs[half + per_beam - 1].azimuth);
            CHECK(pairs[i].azimuth <= pairs[half].azimuth);
        }
        CHECK(2 * per_beam <= pairs.size());
    }
}

TEST_CASE("smart initialization picks the two nearest codebook beams", "[widebeam]")
{
    SECTION("previous configuration inside the codebook")
    {
        ArrayGeometry g = upa(8, 0.5);
        Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(g.size());
        Codebook book = build_codebook(g, ones, AnglePair{0.0, 0.0});
        REQUIRE(book.size() > 3);
        InitConfigs init = smart_init(book, book.configs[2]);
        CHECK((init.theta1 - book.configs[2]).cwiseAbs().maxCoeff() == 0.0);
        // runner-up is any other entry; orthogonality makes the choice a toss-up
        bool member = false;
        for (int i = 0; i < book.size(); ++i)
            if (i != 2 && (init.theta2 - book.configs[i]).cwiseAbs().maxCoeff() == 0.0)
                member = true;
        CHECK(member);
    }

    SECTION("line-array neighbors of an off-grid beam")
    {
        ArrayGeometry g{4, 1, 0.0107069 / 2, 0.0107069 / 2, 0.0107069};
        Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(4);
        Codebook book = build_codebook(g, ones, AnglePair{0.0, 0.0});
        REQUIRE(book.size() == 4);

        Eigen::VectorXcd prev =
            far_field_response(g, std::asin(0.25), 0.0).conjugate();
        InitConfigs init = smart_init(book, prev);

        // oracle: explicit correlation against all four entries
        int best = -1, second = -1;
        double v1 = -1.0, v2 = -1.0;
        for (int i = 0; i < 4; ++i) {
            double c = std::abs((prev.adjoint() * book.configs[i]).value());
            if (c > v1) {
                second = best;
                v2 = v1;
                best = i;
                v1 = c;
            } else if (c > v2) {
                second = i;
                v2 = c;
            }
        }
        CHECK((init.theta1 - book.configs[best]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((init.theta2 - book.configs[second]).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(std::sin(book.angle_pairs[best].azimuth)) < 1e-9);
        CHECK_THAT(std::sin(book.angle_pairs[second].azimuth),
                   Catch::Matchers::WithinAbs(0.5, 1e-9));
    }

    SECTION("two-entry codebook returns both, ordered")
    {
        ArrayGeometry g{2, 1, 0.0107069 / 2, 0.0107069 / 2, 0.0107069};
        Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(2);
        Codebook book = build_codebook(g, ones, AnglePair{0.0, 0.0});
        REQUIRE(book.size() == 2);
        InitConfigs init = smart_init(book, book.configs[1]);
        CHECK((init.theta1 - book.configs[1]).cwiseAbs().maxCoeff() == 0.0);
        CHECK((init.theta2 - book.configs[0]).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("degenerate codebooks are rejected")
    {
        Codebook empty;
        CHECK_THROWS_AS(smart_init(empty, Eigen::VectorXcd::Ones(4)),
                        std::invalid_argument);
    }
}
