// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#include <catch2/catch_amalgamated.hpp>

#include <rismle/channels.hpp>
#include <rismle/geometry.hpp>
#include <rismle/rng.hpp>

#include <cmath>
#include <complex>

using namespace rismle;

namespace {

ArrayGeometry square(int n, double spacing_frac, double lambda = 0.0107069)
{
    return ArrayGeometry{n, n, spacing_frac * lambda, spacing_frac * lambda, lambda};
}

} // namespace

TEST_CASE("dense LOS channel assembly", "[channels]")
{
    ArrayGeometry g = square(4, 0.5);

    auto zero = dense_los(g, LosChannel{0.0, 1.3, ChannelPoint{0.2, 0.1, 2.0}});
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

    auto ones = dense_los(g, LosChannel{1.0, 0.0, ChannelPoint::far_field(0.0, 0.0)});
    for (Eigen::Index n = 0; n < ones.size(); ++n)
        CHECK(ones[n] == std::complex<double>(1.0, 0.0));

    LosChannel los{2.7, 1.1, ChannelPoint{0.4, -0.3, 1.2}};
    auto v = dense_los(g, los);
    CHECK_THAT(v.squaredNorm(), Catch::Matchers::WithinRel(g.size() * los.beta, 1e-9));
    auto manual = std::sqrt(los.beta) * std::polar(1.0, los.omega) *
                  near_field_response(g, los.point).array();
    CHECK((v.array() - manual).abs().maxCoeff() < 1e-12);
}

TEST_CASE("direct channel draws are circularly symmetric with requested variance",
          "[channels]")
{
    Rng rng(7);
    CHECK(sample_direct(rng, 0.0) == std::complex<double>(0.0, 0.0));
    CHECK_THROWS_AS(sample_direct(rng, -1.0), std::invalid_argument);

    const int draws = 100000;
    std::complex<double> mean = 0.0;
    double power = 0.0;
    for (int t = 0; t < draws; ++t) {
        auto d = sample_direct(rng, 1.0);
        mean += d;
        power += std::norm(d);
    }
    mean /= draws;
    power /= draws;
    CHECK(std::abs(mean) < 0.02);
    CHECK(power > 0.98);
    CHECK(power < 1.02);
}

TEST_CASE("identical seeds give identical draws", "[channels]")
{
    Rng a(42), b(42);
    for (int t = 0; t < 32; ++t)
        CHECK(sample_direct(a, 2.5) == sample_direct(b, 2.5));

    Rng s1 = Rng::trial_stream(99, 3);
    Rng s2 = Rng::trial_stream(99, 3);
    Rng s3 = Rng::trial_stream(99, 4);
    auto v1 = s1.cnormal_vector(8);
    auto v2 = s2.cnormal_vector(8);
    auto v3 = s3.cnormal_vector(8);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((v1 - v3).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sinc correlation structure", "[channels]")
{
    ArrayGeometry ula{2, 1, 0.5 * 0.01, 0.5 * 0.01, 0.01};
    auto r2 = sinc_correlation(ula);
    CHECK_THAT(r2(0, 0).real(), Catch::Matchers::WithinAbs(1.0, 1e-15));
    CHECK_THAT(r2(1, 1).real(), Catch::Matchers::WithinAbs(1.0, 1e-15));
    // sinc(2 * (lambda/2) / lambda) = sinc(1) = 0
    CHECK_THAT(std::abs(r2(0, 1)), Catch::Matchers::WithinAbs(0.0, 1e-15));

    ArrayGeometry g = square(8, 0.5);
    auto r = sinc_correlation(g);
    CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-14);

    // oracle: eigendecomposition of the raw matrix
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);

    auto f = correlation_factor(r);
    CHECK((f * f.adjoint() - r).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rician composites have the correct moments", "[channels]")
{
    ArrayGeometry g = square(4, 0.3);
    LosChannel los{1.4, 0.9, ChannelPoint::far_field(0.35, -0.15)};
    auto corr = sinc_correlation(g);
    auto factor = correlation_factor(corr);
    auto g_los = dense_los(g, los);

    SECTION("LOS limit")
    {
        Rng rng(5);
        auto v = sample_rician(rng, g, los, RicianSpec{300.0, corr}, factor);
        CHECK((v - std::sqrt(1e30 / (1e30 + 1)) * g_los).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((v - g_los).cwiseAbs().maxCoeff() < 1e-6);
    }

    SECTION("K-factor power split at 8 dB")
    {
        // oracle: Monte Carlo moment estimates
        const double k = std::pow(10.0, 0.8);
        const int draws = 10000;
        Rng rng(11);
        Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(g.size());
        double scatter = 0.0;
        std::vector<Eigen::VectorXcd> all;
        all.reserve(draws);
        for (int t = 0; t < draws; ++t) {
            auto v = sample_rician(rng, g, los, RicianSpec{8.0, corr}, factor);
            CHECK(v.allFinite());
            mean += v;
            all.push_back(std::move(v));
        }
        mean /= draws;
        for (const auto& v : all)
            scatter += (v - mean).squaredNorm();
        scatter /= draws;

        CHECK_THAT(scatter / mean.squaredNorm(), Catch::Matchers::WithinRel(1.0 / k, 0.05));
        // decomposition preserves the mean
        CHECK((mean - std::sqrt(k / (k + 1)) * g_los).norm() / g_los.norm() < 0.05);
    }

    SECTION("equal split at 0 dB")
    {
        const int draws = 8000;
        Rng rng(13);
        Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(g.size());
        for (int t = 0; t < draws; ++t)
            mean += sample_rician(rng, g, los, RicianSpec{0.0, corr}, factor);
        mean /= draws;
        CHECK_THAT(mean.squaredNorm() / (g.size() * los.beta),
                   Catch::Matchers::WithinAbs(0.5, 0.05));
    }

    SECTION("spatial correlation of the scattered part")
    {
        // neighbors at 0.3 lambda: sinc(0.6) ~ 0.5045
        const double want = std::sin(std::numbers::pi * 0.6) / (std::numbers::pi * 0.6);
        const int draws = 20000;
        Rng rng(17);
        LosChannel pure_nlos{1.0, 0.0, los.point};
        std::complex<double> acc = 0.0;
        double p0 = 0.0, p1 = 0.0;
        for (int t = 0; t < draws; ++t) {
            auto v = sample_rician(rng, g, pure_nlos, RicianSpec{-300.0, corr}, factor);
            acc += v[0] * std::conj(v[1]);
            p0 += std::norm(v[0]);
            p1 += std::norm(v[1]);
        }
        double rho = std::abs(acc) / std::sqrt(p0 * p1);
        CHECK_THAT(rho, Catch::Matchers::WithinAbs(want, 0.03));
    }
}

TEST_CASE("non-PSD correlation is rejected", "[channels]")
{
    Eigen::MatrixXcd bad = -Eigen::MatrixXcd::Identity(4, 4);
    CHECK_THROWS_AS(correlation_factor(bad), std::invalid_argument);
}

TEST_CASE("synthesized BS-RIS channels", "[channels]")
{
    ArrayGeometry g = square(4, 0.5);

    auto h = synth_bs_ris(g, 1);
    REQUIRE(h.rows() == 1);
    REQUIRE(h.cols() == g.size());
    for (Eigen::Index n = 0; n < h.cols(); ++n)
        CHECK(h(0, n) == std::complex<double>(1.0, 0.0)); // broadside default

    auto h2 = synth_bs_ris(g, 1, 0.6, -0.2);
    for (Eigen::Index n = 0; n < h2.cols(); ++n)
        CHECK_THAT(std::abs(h2(0, n)), Catch::Matchers::WithinAbs(1.0, 1e-12));

    auto hm = synth_bs_ris(g, 32, 0.4, 0.1);
    REQUIRE(hm.rows() == 32);
    REQUIRE(hm.cols() == g.size());
    for (Eigen::Index m = 0; m < hm.rows(); ++m)
        for (Eigen::Index n = 0; n < hm.cols(); ++n)
            CHECK(std::abs(std::abs(hm(m, n)) - 1.0) < 1e-12);

    // oracle: singular value decomposition confirms rank-1 LOS structure
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hm);
    CHECK(svd.singularValues()[1] < 1e-9 * svd.singularValues()[0]);
}
