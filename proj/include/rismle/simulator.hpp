// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <rismle/adaptive.hpp>
#include <rismle/baselines.hpp>
#include <rismle/channels.hpp>
#include <rismle/codebook.hpp>
#include <rismle/errors.hpp>
#include <rismle/estimator.hpp>
#include <rismle/metrics.hpp>
#include <rismle/rng.hpp>
#include <rismle/widebeam.hpp>

namespace rismle {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

enum class DistanceLaw { far_field, near_field };
enum class InitMode { wide_beams, random_beams };
enum class EstimatorVariant { exact, far_field_only, least_squares };

struct UserDistribution {
    double azimuth_lo = -std::numbers::pi / 3.0;
    double azimuth_hi = std::numbers::pi / 3.0;
    double elevation_lo = -std::numbers::pi / 3.0;
    double elevation_hi = std::numbers::pi / 3.0;
    DistanceLaw law = DistanceLaw::far_field;
};

// One Monte Carlo study. SNRs are per-element during data transmission and
// pilot transmission respectively; the noise power is the common receiver
// noise variance sigma^2.
struct Scenario {
    ArrayGeometry geometry;
    int bs_antennas = 1;
    double snr_pilot_db = -10.0;
    double snr_data_db = -20.0;
    double direct_gain_factor = 64.0; // direct-path variance over a single cascaded element
    double noise_power = 1.0;
    UserDistribution users;
    std::optional<double> rician_k_db;
    int trials = 2000;
    std::uint64_t master_seed = 1;
};

inline Scenario default_scenario()
{
    Scenario s;
    const double lambda = wavelength_for(28.0e9);
    s.geometry = ArrayGeometry{32, 32, lambda / 2.0, lambda / 2.0, lambda};
    return s;
}

inline void check_scenario(const Scenario& s)
{
    check_geometry(s.geometry);
    if (s.bs_antennas < 1)
        throw std::invalid_argument("scenario needs at least one BS antenna");
    if (s.trials < 1)
        throw std::invalid_argument("scenario needs at least one trial");
    if (!(s.direct_gain_factor >= 0.0))
        throw std::invalid_argument("direct gain factor must be nonnegative");
    if (!(s.noise_power >= 0.0))
        throw std::invalid_argument("noise power must be nonnegative");
    if (s.users.azimuth_lo > s.users.azimuth_hi ||
        s.users.elevation_lo > s.users.elevation_hi)
        throw std::invalid_argument("user angle ranges must be ordered");
    check_angles(s.users.azimuth_lo, s.users.elevation_lo);
    check_angles(s.users.azimuth_hi, s.users.elevation_hi);
    if (s.users.law == DistanceLaw::near_field) {
        const FieldBoundaries b = field_boundaries(s.geometry);
        // small apertures have no usable near-field band above the minimum
        // operating distance, so the near-field user law is ill-posed there
        if (!(b.near_far_border > b.bjornson))
            throw std::invalid_argument(
                "near-field user law needs an aperture whose near-field band "
                "extends beyond the minimum operating distance");
    }
}

namespace detail {

// Per-scenario precomputation shared by every trial. The correlation factor
// involves an N x N eigendecomposition, so build this once per study.
struct ScenarioContext {
    Eigen::MatrixXcd bs_ris_los;
    Eigen::MatrixXcd corr_factor;
    FieldBoundaries bounds;
};

inline ScenarioContext make_context(const Scenario& s)
{
    ScenarioContext ctx;
    ctx.bs_ris_los = synth_bs_ris(s.geometry, s.bs_antennas);
    if (s.rician_k_db)
        ctx.corr_factor = correlation_factor(sinc_correlation(s.geometry));
    ctx.bounds = field_boundaries(s.geometry);
    return ctx;
}

inline AnglePair codebook_reference() { return {std::numbers::pi / 2.0, 0.0}; }

// The random baseline starts from two distinct narrow beams drawn from the
// codebook; the adaptive loop later recognizes them as members and will not
// spend pilots on them again.
inline InitConfigs make_init(InitMode mode, const WideBeamPlan& plan, const Codebook& book,
                             const Eigen::VectorXcd& h, Rng& rng)
{
    if (mode == InitMode::wide_beams)
        return half_space_beams(plan, h);
    if (book.size() < 2)
        throw std::invalid_argument("random initialization needs at least two beams");
    const int first = rng.uniform_int(book.size());
    int second = rng.uniform_int(book.size() - 1);
    if (second >= first)
        ++second;
    InitConfigs out;
    out.theta1 = book.configs[first];
    out.theta2 = book.configs[second];
    return out;
}

// Runs fn(trial_index) for every index. Each trial must write only to its
// own output slot; aggregation order then never depends on the scheduling.
template <typename Fn>
void for_each_trial(int trials, int threads, Fn&& fn)
{
    if (threads <= 1) {
        for (int i = 0; i < trials; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    const int workers = std::min(threads, trials);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < trials; i = next.fetch_add(1))
                fn(i);
        });
    for (std::thread& th : pool)
        th.join();
}

} // namespace detail

struct TrialDraw {
    ChannelPoint point;
    LinkRealization link;
};

inline TrialDraw draw_trial(const Scenario& s, const detail::ScenarioContext& ctx, Rng& rng)
{
    TrialDraw t;
    const double az = rng.uniform(s.users.azimuth_lo, s.users.azimuth_hi);
    const double el = rng.uniform(s.users.elevation_lo, s.users.elevation_hi);
    if (s.users.law == DistanceLaw::near_field) {
        t.point = ChannelPoint{az, el,
                               rng.uniform(ctx.bounds.bjornson, ctx.bounds.near_far_border)};
    } else {
        // far-region users still sit at a finite range and the truth keeps
        // the generic response; small apertures can put the near/far border
        // inside the minimum operating distance, hence the max
        const double lo = std::max(ctx.bounds.near_far_border, ctx.bounds.bjornson);
        t.point = ChannelPoint{az, el, rng.uniform(lo, 10.0 * ctx.bounds.fraunhofer)};
    }

    const LosChannel los{1.0, rng.uniform(0.0, 2.0 * std::numbers::pi), t.point};
    if (s.rician_k_db) {
        const RicianSpec spec{*s.rician_k_db, {}};
        t.link.g = sample_rician(rng, s.geometry, los, spec, ctx.corr_factor);
        t.link.bs_ris =
            sample_rician_bs_ris(rng, ctx.bs_ris_los, *s.rician_k_db, ctx.corr_factor);
    } else {
        t.link.g = dense_los(s.geometry, los);
        t.link.bs_ris = ctx.bs_ris_los;
    }
    t.link.d = sample_direct_vector(rng, s.direct_gain_factor, s.bs_antennas);
    t.link.pilot_power = db_to_linear(s.snr_pilot_db);
    t.link.noise_var = s.noise_power;
    t.link.snr_data = db_to_linear(s.snr_data_db);
    return t;
}

inline TrialDraw draw_trial(const Scenario& s, Rng& rng)
{
    const detail::ScenarioContext ctx = detail::make_context(s);
    return draw_trial(s, ctx, rng);
}

inline double trial_capacity(const TrialDraw& t)
{
    if (t.link.bs_ris.rows() == 1)
        return capacity_single(t.link.bs_ris.row(0).transpose(), t.link.g, t.link.d[0],
                               t.link.snr_data);
    return capacity_multi(t.link.bs_ris, t.link.g, t.link.d, t.link.snr_data);
}

// Empirical distribution of the received pilot SNR over the two initial
// configurations; returns 2 * trials samples sorted ascending, in dB.
inline std::vector<double> pilot_snr_cdf(const Scenario& s, InitMode init, int threads = 1)
{
    check_scenario(s);
    if (s.bs_antennas != 1)
        throw std::invalid_argument("pilot SNR study is single-antenna");
    if (!(s.noise_power > 0.0))
        throw undefined_metric_error("pilot SNR needs a positive noise power");
    const detail::ScenarioContext ctx = detail::make_context(s);
    const WideBeamPlan plan = plan_subris(s.geometry);
    std::optional<Codebook> shared_book;
    if (init == InitMode::random_beams && !s.rician_k_db)
        shared_book = build_codebook(s.geometry, ctx.bs_ris_los.row(0).transpose(),
                                     detail::codebook_reference());

    std::vector<double> samples(2 * s.trials);
    detail::for_each_trial(s.trials, threads, [&](int i) {
        Rng rng = Rng::trial_stream(s.master_seed, static_cast<std::uint64_t>(i));
        const TrialDraw t = draw_trial(s, ctx, rng);
        const Eigen::VectorXcd h = t.link.bs_ris.row(0).transpose();
        Codebook local;
        if (init == InitMode::random_beams && !shared_book)
            local = build_codebook(s.geometry, h, detail::codebook_reference());
        const Codebook& book = shared_book ? *shared_book : local;
        const InitConfigs cfg = detail::make_init(init, plan, book, h, rng);
        auto snr_db = [&](const Eigen::VectorXcd& theta) {
            const std::complex<double> field =
                theta.cwiseProduct(h).cwiseProduct(t.link.g).sum() + t.link.d[0];
            return linear_to_db(t.link.pilot_power * std::norm(field) / s.noise_power);
        };
        samples[2 * i] = snr_db(cfg.theta1);
        samples[2 * i + 1] = snr_db(cfg.theta2);
    });
    std::sort(samples.begin(), samples.end());
    return samples;
}

struct SweepOptions {
    EstimatorVariant variant = EstimatorVariant::exact;
    InitMode init = InitMode::wide_beams;
    int max_pilots = 8;
    int threads = 1;
};

struct SweepRow {
    int pilots = 0;
    double mean_se = 0.0;
    double mean_capacity = 0.0;
    double mean_nmse_g = 0.0;
    double mean_nmse_d = 0.0;
};

namespace detail {

// Configuration aligning every estimated reflected path with the estimated
// direct phase; the non-parametric baseline has no model point to steer at,
// so this is its single-antenna rate rule.
inline Eigen::VectorXcd align_config(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g_hat,
                                     std::complex<double> d_hat)
{
    const double ref = std::arg(d_hat);
    Eigen::VectorXcd theta(h.size());
    for (Eigen::Index n = 0; n < h.size(); ++n)
        theta[n] = std::polar(1.0, ref - std::arg(h[n]) - std::arg(g_hat[n]));
    return theta;
}

struct TrialCurves {
    std::vector<double> se, nmse_g, nmse_d;
    double capacity = 0.0;
    bool direct_defined = true;
};

} // namespace detail

// Monte Carlo averages versus the pilot budget, one row per budget 2..max.
// The mean capacity column is the same ideal-alignment average in every row.
inline std::vector<SweepRow> sweep_pilots(const Scenario& s, const SweepOptions& opt)
{
    check_scenario(s);
    if (opt.max_pilots < 2)
        throw std::invalid_argument("pilot sweep needs a budget of at least two");
    const int n = s.geometry.size();
    if (opt.variant == EstimatorVariant::least_squares) {
        if (s.bs_antennas != 1)
            throw std::invalid_argument("least-squares baseline is single-antenna");
        if (opt.max_pilots > n + 1)
            throw std::invalid_argument("least-squares sweep needs at most N+1 pilots");
    }

    const detail::ScenarioContext ctx = detail::make_context(s);
    const bool needs_wide = opt.variant != EstimatorVariant::least_squares &&
                            opt.init == InitMode::wide_beams;
    WideBeamPlan plan;
    if (needs_wide)
        plan = plan_subris(s.geometry);

    // users sit at finite ranges under both laws, so the exact variant always
    // searches over distance; the mismatched variant stays on the far slice
    SearchGrid grid = opt.variant == EstimatorVariant::exact
                          ? SearchGrid::standard(s.geometry)
                          : SearchGrid::standard(s.geometry, 0, 0, 0);

    std::optional<Codebook> shared_book;
    if (opt.variant != EstimatorVariant::least_squares && !s.rician_k_db)
        shared_book = build_codebook(s.geometry, ctx.bs_ris_los.row(0).transpose(),
                                     detail::codebook_reference());

    const int budgets = opt.max_pilots - 1;
    std::vector<detail::TrialCurves> curves(s.trials);
    detail::for_each_trial(s.trials, opt.threads, [&](int i) {
        Rng rng = Rng::trial_stream(s.master_seed, static_cast<std::uint64_t>(i));
        const TrialDraw t = draw_trial(s, ctx, rng);
        const Eigen::VectorXcd h = t.link.bs_ris.row(0).transpose();
        detail::TrialCurves& c = curves[i];
        c.capacity = trial_capacity(t);
        c.direct_defined = t.link.d.squaredNorm() > 0.0;
        c.se.resize(budgets);
        c.nmse_g.resize(budgets);
        c.nmse_d.resize(budgets);

        const double root_noise = std::sqrt(s.noise_power);
        auto noise = [&](int m) -> Eigen::VectorXcd {
            return root_noise * rng.cnormal_vector(m);
        };

        if (opt.variant == EstimatorVariant::least_squares) {
            PilotRecord rec;
            rec.pilot_power = t.link.pilot_power;
            rec.noise_var = s.noise_power;
            const double root_p = std::sqrt(rec.pilot_power);
            for (int l = 0; l < opt.max_pilots; ++l) {
                const Eigen::VectorXcd theta = dft_pilot_config(n, l);
                const std::complex<double> field =
                    theta.cwiseProduct(h).cwiseProduct(t.link.g).sum() + t.link.d[0];
                rec.add_pilot(theta, root_p * field * Eigen::VectorXcd::Ones(1) + noise(1));
                if (l == 0)
                    continue;
                const LsEstimate est = ls_estimate(rec, h);
                const Eigen::VectorXcd config = detail::align_config(h, est.g_hat, est.d_hat);
                c.se[l - 1] =
                    spectral_efficiency(config, h, t.link.g, t.link.d[0], t.link.snr_data);
                c.nmse_g[l - 1] = nmse(est.g_hat, t.link.g);
                c.nmse_d[l - 1] = c.direct_defined
                                      ? std::norm(est.d_hat - t.link.d[0]) /
                                            std::norm(t.link.d[0])
                                      : 0.0;
            }
            return;
        }

        const Codebook& book = shared_book
                                   ? *shared_book
                                   : build_codebook(s.geometry, h, detail::codebook_reference());
        const InitConfigs init = detail::make_init(opt.init, plan, book, h, rng);
        const LoopResult res = run_mle_loop(s.geometry, t.link, book, grid, init,
                                            opt.max_pilots, noise);
        for (int b = 0; b < budgets; ++b) {
            // a spent codebook freezes the last configuration and estimate
            const int at = std::min<int>(b, res.se_trace.size() - 1);
            c.se[b] = res.se_trace[at];
            const Estimate& est = res.estimates[at];
            c.nmse_g[b] = nmse(est.g_hat, t.link.g);
            c.nmse_d[b] = c.direct_defined ? nmse(est.d_hat, t.link.d) : 0.0;
        }
    });

    std::vector<SweepRow> table(budgets);
    int direct_trials = 0;
    double cap_sum = 0.0;
    for (const detail::TrialCurves& c : curves) {
        cap_sum += c.capacity;
        if (c.direct_defined)
            ++direct_trials;
    }
    for (int b = 0; b < budgets; ++b) {
        SweepRow& row = table[b];
        row.pilots = b + 2;
        row.mean_capacity = cap_sum / s.trials;
        double se = 0.0, ng = 0.0, nd = 0.0;
        for (const detail::TrialCurves& c : curves) {
            se += c.se[b];
            ng += c.nmse_g[b];
            if (c.direct_defined)
                nd += c.nmse_d[b];
        }
        row.mean_se = se / s.trials;
        row.mean_nmse_g = ng / s.trials;
        row.mean_nmse_d = direct_trials > 0
                              ? nd / direct_trials
                              : std::numeric_limits<double>::quiet_NaN();
    }
    return table;
}

// Random-walk user tracking. The RIS sits at the middle of one room wall at
// the user's height, so elevation is identically zero and the user position
// maps to an azimuth and a distance.
struct TrackingSpec {
    double room_side = 4.0;           // m
    double speed_mean = 1.0;          // m/s, exponential draw per leg
    double speed_cap = 2.0;           // m/s
    double reestimation_period = 0.010; // s
    double se_sample_period = 0.001;  // s
    int initial_pilots = 10;
    int reestimation_pilots = 4;
    double duration = 5.0;            // s
};

inline void check_tracking(const TrackingSpec& t)
{
    if (!(t.room_side > 0.0))
        throw std::invalid_argument("tracking room must have positive side");
    if (!(t.se_sample_period > 0.0) || !(t.reestimation_period > 0.0))
        throw std::invalid_argument("tracking periods must be positive");
    if (t.reestimation_period < t.se_sample_period)
        throw std::invalid_argument("re-estimation cannot be faster than rate sampling");
    if (t.initial_pilots < 2 || t.reestimation_pilots < 2)
        throw std::invalid_argument("tracking needs at least two pilots per estimation");
    if (!(t.duration > 0.0))
        throw std::invalid_argument("tracking duration must be positive");
    if (!(t.speed_mean >= 0.0) || !(t.speed_cap >= 0.0))
        throw std::invalid_argument("tracking speeds must be nonnegative");
}

struct TrackSample {
    double time = 0.0;
    double se = 0.0;
    double capacity = 0.0;
    bool reestimated = false;
};

inline std::vector<TrackSample> track_user(const Scenario& s, const TrackingSpec& spec)
{
    check_scenario(s);
    check_tracking(spec);
    if (s.bs_antennas != 1)
        throw std::invalid_argument("tracking is single-antenna");
    if (s.rician_k_db)
        throw std::invalid_argument("tracking assumes pure LOS user channels");

    const ArrayGeometry& geom = s.geometry;
    const FieldBoundaries bounds = field_boundaries(geom);
    Rng rng(s.master_seed);

    const Eigen::MatrixXcd hrow = synth_bs_ris(geom, 1);
    const Eigen::VectorXcd h = hrow.row(0).transpose();
    const WideBeamPlan plan = plan_subris(geom);
    const Codebook book = build_codebook(geom, h, detail::codebook_reference());

    // distance rings spanning the room instead of the whole near region
    const double ris_x = spec.room_side / 2.0;
    const double reach = std::hypot(spec.room_side / 2.0, spec.room_side) + bounds.bjornson;
    SearchGrid grid = SearchGrid::standard(geom, 0, 0, 0);
    const int rings = 12;
    for (int i = 0; i < rings; ++i)
        grid.distances.push_back(
            bounds.bjornson * std::pow(reach / bounds.bjornson, i / (rings - 1.0)));

    LinkRealization link;
    link.bs_ris = hrow;
    link.pilot_power = db_to_linear(s.snr_pilot_db);
    link.noise_var = s.noise_power;
    link.snr_data = db_to_linear(s.snr_data_db);
    link.d = Eigen::VectorXcd(1);
    link.d[0] = sample_direct(rng, s.direct_gain_factor);

    EstimationSession session(geom, hrow, grid, link.pilot_power, link.noise_var);

    auto position_ok = [&](double x, double y) {
        return x >= 0.0 && x <= spec.room_side && y >= 0.0 && y <= spec.room_side &&
               std::hypot(x - ris_x, y) >= bounds.bjornson;
    };
    double ux = 0.0, uy = 0.0;
    do {
        ux = rng.uniform(0.0, spec.room_side);
        uy = rng.uniform(0.0, spec.room_side);
    } while (!position_ok(ux, uy));
    auto draw_speed = [&] {
        return spec.speed_mean > 0.0
                   ? std::min(rng.exponential(spec.speed_mean), spec.speed_cap)
                   : 0.0;
    };
    double direction = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double speed = draw_speed();

    auto point_at = [&](double x, double y) {
        return ChannelPoint{std::atan2(x - ris_x, y), 0.0, std::hypot(x - ris_x, y)};
    };
    auto channel_at = [&](const ChannelPoint& p) {
        const double turns = -geom.wavenumber() * p.distance;
        const double omega =
            turns - 2.0 * std::numbers::pi * std::floor(turns / (2.0 * std::numbers::pi));
        return dense_los(geom, LosChannel{1.0, omega, p});
    };
    const double root_noise = std::sqrt(s.noise_power);
    auto noise = [&](int m) -> Eigen::VectorXcd { return root_noise * rng.cnormal_vector(m); };

    const int total = static_cast<int>(std::llround(spec.duration / spec.se_sample_period));
    const int per_reest =
        std::max(1, static_cast<int>(std::llround(spec.reestimation_period /
                                                  spec.se_sample_period)));
    std::vector<TrackSample> out;
    out.reserve(total);
    Eigen::VectorXcd config;
    std::optional<ChannelPoint> fix;
    for (int k = 0; k < total; ++k) {
        link.g = channel_at(point_at(ux, uy));
        const bool reest = k % per_reest == 0;
        if (reest) {
            session.reset();
            const bool first = !fix.has_value();
            const InitConfigs init =
                first ? half_space_beams(plan, h) : smart_init(book, config);
            const int budget = first ? spec.initial_pilots : spec.reestimation_pilots;
            LoopResult res = run_mle_loop_in(session, geom, link, book, init, budget,
                                             noise, fix);
            config = std::move(res.config);
            fix = res.final_estimate.point_hat;
        }
        TrackSample sample;
        sample.time = k * spec.se_sample_period;
        sample.se = spectral_efficiency(config, h, link.g, link.d[0], link.snr_data);
        sample.capacity = capacity_single(h, link.g, link.d[0], link.snr_data);
        sample.reestimated = reest;
        out.push_back(sample);

        // advance the walk by one sample period
        const double step = speed * spec.se_sample_period;
        double nx = ux + step * std::cos(direction);
        double ny = uy + step * std::sin(direction);
        for (int guard = 0; !position_ok(nx, ny) && guard < 64; ++guard) {
            direction = rng.uniform(0.0, 2.0 * std::numbers::pi);
            speed = draw_speed();
            nx = ux + speed * spec.se_sample_period * std::cos(direction);
            ny = uy + speed * spec.se_sample_period * std::sin(direction);
        }
        if (position_ok(nx, ny)) {
            ux = nx;
            uy = ny;
        }
    }
    return out;
}

namespace detail {

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open output file: " + path);
    return f;
}

} // namespace detail

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows)
{
    std::ofstream f = detail::open_output(path);
    f << "pilots,mean_se,mean_capacity,mean_nmse_g,mean_nmse_d\n";
    for (const SweepRow& r : rows)
        f << r.pilots << ',' << detail::format_double(r.mean_se) << ','
          << detail::format_double(r.mean_capacity) << ','
          << detail::format_double(r.mean_nmse_g) << ','
          << detail::format_double(r.mean_nmse_d) << '\n';
}

inline void write_cdf_csv(const std::string& path, const std::vector<double>& sorted_snr_db)
{
    std::ofstream f = detail::open_output(path);
    f << "snr_db,cdf\n";
    const double n = static_cast<double>(sorted_snr_db.size());
    for (std::size_t i = 0; i < sorted_snr_db.size(); ++i)
        f << detail::format_double(sorted_snr_db[i]) << ','
          << detail::format_double((i + 1) / n) << '\n';
}

inline void write_track_csv(const std::string& path, const std::vector<TrackSample>& samples)
{
    std::ofstream f = detail::open_output(path);
    f << "time_s,se,capacity,reestimated\n";
    for (const TrackSample& t : samples)
        f << detail::format_double(t.time) << ',' << detail::format_double(t.se) << ','
          << detail::format_double(t.capacity) << ',' << (t.reestimated ? 1 : 0) << '\n';
}

// Sidecar path: the CSV extension is replaced by .meta (appended when the
// basename has no extension).
inline std::string meta_path_for(const std::string& csv_path)
{
    const std::size_t slash = csv_path.find_last_of('/');
    const std::size_t dot = csv_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".meta";
    return csv_path.substr(0, dot) + ".meta";
}

inline void write_text_file(const std::string& path, const std::string& body)
{
    std::ofstream f = detail::open_output(path);
    f << body;
}

} // namespace rismle
