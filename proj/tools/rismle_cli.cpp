// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#include <CLI11.hpp>

#include <rismle/scenario_io.hpp>
#include <rismle/version.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

using namespace rismle;

namespace {

// flag values shared by the subcommands; exactly one subcommand parses
struct CommonOpts {
    std::string scenario_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
};

int default_threads()
{
    if (const char* v = std::getenv("RISMLE_THREADS")) {
        char* end = nullptr;
        const long t = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && t >= 1 && t <= 4096)
            return static_cast<int>(t);
    }
    return 1;
}

ScenarioFile effective_scenario(const CommonOpts& o)
{
    ScenarioFile f;
    if (!o.scenario_path.empty())
        f = load_scenario_file(o.scenario_path);
    if (o.seed)
        f.scenario.master_seed = *o.seed;
    if (o.trials)
        f.scenario.trials = *o.trials;
    return f;
}

// Sidecar next to every CSV: code version, command, seed, and the full
// effective scenario. Thread count is omitted on purpose: output bytes
// depend only on (subcommand, scenario, seed).
void write_meta(const std::string& csv_path, const std::string& subcommand,
                const ScenarioFile& f)
{
    std::string body = "# rismle ";
    body += version_string;
    body += "\n# subcommand: " + subcommand;
    body += "\n# seed: " + std::to_string(f.scenario.master_seed) + "\n";
    body += serialize_scenario(f);
    write_text_file(meta_path_for(csv_path), body);
}

void run_codebook(const CommonOpts& o)
{
    const ScenarioFile f = effective_scenario(o);
    check_scenario(f.scenario);
    const Eigen::VectorXcd h = synth_bs_ris(f.scenario.geometry, 1).row(0).transpose();
    const Codebook book =
        build_codebook(f.scenario.geometry, h, detail::codebook_reference());
    std::ofstream out = detail::open_output(o.out);
    out << "index,azimuth_rad,elevation_rad\n";
    for (int i = 0; i < book.size(); ++i)
        out << i << ',' << detail::format_double(book.angle_pairs[i].azimuth) << ','
            << detail::format_double(book.angle_pairs[i].elevation) << '\n';
    write_meta(o.out, "codebook", f);
}

void run_beams(const CommonOpts& o)
{
    const ScenarioFile f = effective_scenario(o);
    check_scenario(f.scenario);
    const Eigen::VectorXcd h = synth_bs_ris(f.scenario.geometry, 1).row(0).transpose();
    const InitConfigs init = half_space_beams(plan_subris(f.scenario.geometry), h);
    std::ofstream out = detail::open_output(o.out);
    out << "element,theta1_re,theta1_im,theta2_re,theta2_im\n";
    for (Eigen::Index i = 0; i < init.theta1.size(); ++i)
        out << i << ',' << detail::format_double(init.theta1[i].real()) << ','
            << detail::format_double(init.theta1[i].imag()) << ','
            << detail::format_double(init.theta2[i].real()) << ','
            << detail::format_double(init.theta2[i].imag()) << '\n';
    write_meta(o.out, "beams", f);
}

void run_estimate(const CommonOpts& o, int pilots)
{
    const ScenarioFile f = effective_scenario(o);
    const Scenario& s = f.scenario;
    check_scenario(s);
    const detail::ScenarioContext ctx = detail::make_context(s);
    Rng rng = Rng::trial_stream(s.master_seed, 0);
    const TrialDraw t = draw_trial(s, ctx, rng);
    const Eigen::VectorXcd h = t.link.bs_ris.row(0).transpose();
    const Codebook book = build_codebook(s.geometry, h, detail::codebook_reference());
    const InitConfigs init = half_space_beams(plan_subris(s.geometry), h);
    const SearchGrid grid = SearchGrid::standard(s.geometry);
    const double root_noise = std::sqrt(s.noise_power);
    auto noise = [&](int m) -> Eigen::VectorXcd { return root_noise * rng.cnormal_vector(m); };
    const LoopResult res =
        run_mle_loop(s.geometry, t.link, book, grid, init, pilots, noise);
    const double cap = trial_capacity(t);

    std::ofstream out = detail::open_output(o.out);
    out << "pilots,azimuth_rad,elevation_rad,distance_m,beta,omega_rad,se,capacity\n";
    for (std::size_t i = 0; i < res.estimates.size(); ++i) {
        const Estimate& e = res.estimates[i];
        out << (i + 2) << ',' << detail::format_double(e.point_hat.azimuth) << ','
            << detail::format_double(e.point_hat.elevation) << ','
            << detail::format_double(e.point_hat.distance) << ','
            << detail::format_double(e.beta_hat) << ','
            << detail::format_double(e.omega_hat) << ','
            << detail::format_double(res.se_trace[i]) << ','
            << detail::format_double(cap) << '\n';
    }
    write_meta(o.out, "estimate", f);
}

void run_sweep(const CommonOpts& o, int pilots, const std::string& variant,
               const std::string& init)
{
    const ScenarioFile f = effective_scenario(o);
    SweepOptions opt;
    opt.max_pilots = pilots;
    opt.threads = o.threads.value_or(default_threads());
    if (variant == "exact")
        opt.variant = EstimatorVariant::exact;
    else if (variant == "far")
        opt.variant = EstimatorVariant::far_field_only;
    else if (variant == "ls")
        opt.variant = EstimatorVariant::least_squares;
    else
        throw std::invalid_argument("sweep variant must be exact, far, or ls");
    if (init == "wide")
        opt.init = InitMode::wide_beams;
    else if (init == "random")
        opt.init = InitMode::random_beams;
    else
        throw std::invalid_argument("init must be wide or random");
    write_sweep_csv(o.out, sweep_pilots(f.scenario, opt));
    write_meta(o.out, "sweep", f);
}

void run_cdf(const CommonOpts& o, const std::string& init)
{
    const ScenarioFile f = effective_scenario(o);
    InitMode mode = InitMode::wide_beams;
    if (init == "random")
        mode = InitMode::random_beams;
    else if (init != "wide")
        throw std::invalid_argument("init must be wide or random");
    write_cdf_csv(o.out,
                  pilot_snr_cdf(f.scenario, mode, o.threads.value_or(default_threads())));
    write_meta(o.out, "cdf", f);
}

void run_track(const CommonOpts& o)
{
    const ScenarioFile f = effective_scenario(o);
    write_track_csv(o.out, track_user(f.scenario, f.tracking));
    write_meta(o.out, "track", f);
}

bool selfcheck_recovery(const ArrayGeometry& geom)
{
    const SearchGrid grid = SearchGrid::standard(geom);
    Rng rng(2024);
    const Eigen::VectorXcd h = synth_bs_ris(geom, 1).row(0).transpose();
    const Codebook book = build_codebook(geom, h, detail::codebook_reference());
    const InitConfigs init = half_space_beams(plan_subris(geom), h);

    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const int ai = rng.uniform_int(static_cast<int>(grid.azimuths.size()));
        const int ei = rng.uniform_int(static_cast<int>(grid.elevations.size()));
        const ChannelPoint truth =
            ChannelPoint::far_field(grid.azimuths[ai], grid.elevations[ei]);
        const double beta = rng.uniform(0.25, 4.0);
        const double omega = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const std::complex<double> d = std::sqrt(8.0) * rng.cnormal();

        LinkRealization link;
        link.bs_ris = h.transpose();
        link.g = std::sqrt(beta) * std::polar(1.0, omega) * array_response(geom, truth);
        link.d = Eigen::VectorXcd::Constant(1, d);
        link.pilot_power = 10.0;
        link.noise_var = 0.0;
        link.snr_data = 1.0;
        const LoopResult res =
            run_mle_loop(geom, link, book, grid, init, 4, zero_noise);
        const Estimate& e = res.final_estimate;
        auto wrap = [](double x) { return std::abs(std::remainder(x, 2.0 * std::numbers::pi)); };
        worst = std::max({worst, std::abs(e.point_hat.azimuth - truth.azimuth),
                          std::abs(e.point_hat.elevation - truth.elevation),
                          std::abs(e.beta_hat - beta), wrap(e.omega_hat - omega),
                          std::abs(e.alpha_hat() - std::norm(d)),
                          wrap(e.vartheta_hat() - std::arg(d))});
        if (!e.point_hat.is_far_field())
            worst = std::max(worst, 1.0);
    }
    const bool ok = worst < 1e-6;
    std::printf("%s noise-free exact recovery: worst parameter error %.3g over 20 draws\n",
                ok ? "PASS" : "FAIL", worst);
    return ok;
}

bool selfcheck_codebook(const ArrayGeometry& geom)
{
    const Eigen::VectorXcd h = synth_bs_ris(geom, 1).row(0).transpose();
    const Codebook book = build_codebook(geom, h, detail::codebook_reference());
    const int n = geom.size();
    Eigen::MatrixXcd stack(n, book.size());
    for (int i = 0; i < book.size(); ++i)
        stack.col(i) = book.configs[i];
    const Eigen::MatrixXcd gram = stack.adjoint() * stack;
    double offdiag = 0.0;
    for (int r = 0; r < gram.rows(); ++r)
        for (int c = 0; c < gram.cols(); ++c)
            if (r != c)
                offdiag = std::max(offdiag, std::abs(gram(r, c)));
    const bool ok = offdiag < 1e-8 * n && book.size() >= 2;
    std::printf("%s codebook orthogonality: %d beams, max off-diagonal %.3g (bound %.3g)\n",
                ok ? "PASS" : "FAIL", book.size(), offdiag, 1e-8 * n);
    return ok;
}

int run_selfcheck(const CommonOpts& o)
{
    ArrayGeometry geom;
    if (o.scenario_path.empty()) {
        const double lambda = wavelength_for(28.0e9);
        geom = ArrayGeometry{8, 8, lambda / 2.0, lambda / 2.0, lambda};
    } else {
        geom = load_scenario_file(o.scenario_path).scenario.geometry;
    }
    check_geometry(geom);
    const bool ok = selfcheck_recovery(geom) & selfcheck_codebook(geom);
    std::printf("%s\n", ok ? "selfcheck passed" : "selfcheck failed");
    return ok ? 0 : 2;
}

void add_common(CLI::App* sub, CommonOpts& o, bool with_out = true)
{
    sub->add_option("--scenario", o.scenario_path,
                    "scenario file (key = value text); defaults to the standard "
                    "32x32 half-wavelength setup at 28 GHz");
    sub->add_option("--seed", o.seed, "override the scenario master seed");
    sub->add_option("--trials", o.trials, "override the scenario trial count")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads,
                    "worker threads (default: RISMLE_THREADS or 1); never changes "
                    "output bytes")
        ->check(CLI::PositiveNumber);
    if (with_out)
        sub->add_option("--out", o.out, "output CSV path; a .meta sidecar is written too")
            ->required();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rismle: maximum-likelihood channel estimation for RIS-assisted links"};
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    CommonOpts opts;
    int pilots = 8;
    std::string variant = "exact";
    std::string init = "wide";

    CLI::App* codebook = app.add_subcommand(
        "codebook", "Write the orthogonal beam codebook for the scenario geometry.\n"
                    "CSV columns: index,azimuth_rad,elevation_rad");
    add_common(codebook, opts);

    CLI::App* beams = app.add_subcommand(
        "beams", "Write the two half-space initialization beams.\n"
                 "CSV columns: element,theta1_re,theta1_im,theta2_re,theta2_im");
    add_common(beams, opts);

    CLI::App* estimate = app.add_subcommand(
        "estimate", "Run the adaptive estimation loop on one drawn link.\n"
                    "CSV columns: pilots,azimuth_rad,elevation_rad,distance_m,beta,"
                    "omega_rad,se,capacity");
    add_common(estimate, opts);
    estimate->add_option("--pilots", pilots, "pilot budget")->check(CLI::Range(2, 1 << 20));

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Monte Carlo mean SE / NMSE versus pilot budget.\n"
                 "CSV columns: pilots,mean_se,mean_capacity,mean_nmse_g,mean_nmse_d");
    add_common(sweep, opts);
    sweep->add_option("--pilots", pilots, "largest pilot budget")
        ->check(CLI::Range(2, 1 << 20));
    sweep->add_option("--variant", variant, "estimator: exact | far | ls");
    sweep->add_option("--init", init, "initialization: wide | random");

    CLI::App* cdf = app.add_subcommand(
        "cdf", "Empirical CDF of the first-two-pilot receive SNR.\n"
               "CSV columns: snr_db,cdf");
    add_common(cdf, opts);
    cdf->add_option("--init", init, "initialization: wide | random");

    CLI::App* track = app.add_subcommand(
        "track", "Random-walk tracking run using the scenario's tracking block.\n"
                 "CSV columns: time_s,se,capacity,reestimated");
    add_common(track, opts);

    CLI::App* selfcheck = app.add_subcommand(
        "selfcheck", "Run the built-in recovery and codebook checks (8x8 geometry "
                     "unless --scenario is given); prints PASS/FAIL lines.");
    add_common(selfcheck, opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (app.got_subcommand(codebook))
            run_codebook(opts);
        else if (app.got_subcommand(beams))
            run_beams(opts);
        else if (app.got_subcommand(estimate))
            run_estimate(opts, pilots);
        else if (app.got_subcommand(sweep))
            run_sweep(opts, pilots, variant, init);
        else if (app.got_subcommand(cdf))
            run_cdf(opts, init);
        else if (app.got_subcommand(track))
            run_track(opts);
        else if (app.got_subcommand(selfcheck))
            return run_selfcheck(opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
