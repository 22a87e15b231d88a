// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <rismle/codebook.hpp>
#include <rismle/errors.hpp>
#include <rismle/estimator.hpp>
#include <rismle/geometry.hpp>
#include <rismle/metrics.hpp>
#include <rismle/widebeam.hpp>

namespace rismle {

// Configuration maximizing the single-antenna rate implied by an estimate:
// every reflected path is rotated onto the direct path's phase. Depends only
// on the estimated phases, not on the estimated gains.
inline Eigen::VectorXcd optimal_config_single(const ArrayGeometry& geom, const Estimate& est,
                                              const Eigen::VectorXcd& h)
{
    const Eigen::VectorXcd a = array_response(geom, est.point_hat);
    const double rot = est.vartheta_hat() - est.omega_hat;
    Eigen::VectorXcd theta(a.size());
    for (Eigen::Index n = 0; n < a.size(); ++n)
        theta[n] = std::polar(1.0, rot - std::arg(h[n]) - std::arg(a[n]));
    return theta;
}

namespace detail {

// One alternating-optimization pass over all elements. Each update is the
// exact maximizer of ||G theta + d||^2 over that element's phase with the
// others held fixed, so the objective never decreases. gram = G^H G,
// cross = G^H d, and w tracks gram * theta across updates.
inline void ao_sweep(const Eigen::MatrixXcd& gram, const Eigen::VectorXcd& cross,
                     Eigen::VectorXcd& theta, Eigen::VectorXcd& w)
{
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const std::complex<double> z = w[i] - gram(i, i) * theta[i] + cross[i];
        if (z == 0.0)
            continue;
        const std::complex<double> next = std::polar(1.0, std::arg(z));
        w += gram.col(i) * (next - theta[i]);
        theta[i] = next;
    }
}

} // namespace detail

// Configuration maximizing the multi-antenna receive power ||G theta + d||^2
// with G = bs_ris * diag(g_hat), by alternating per-element phase updates.
// Starts from the phase profile aligning G theta with the dominant receive
// direction, rotated so the direct path adds constructively.
inline Eigen::VectorXcd optimal_config_multi(const Eigen::VectorXcd& g_hat,
                                             const Eigen::VectorXcd& d_hat,
                                             const Eigen::MatrixXcd& bs_ris)
{
    const Eigen::Index n = g_hat.size();
    const Eigen::MatrixXcd gmat = bs_ris * g_hat.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gmat * gmat.adjoint());
    Eigen::VectorXcd u1 = eig.eigenvectors().col(bs_ris.rows() - 1);
    const std::complex<double> along = u1.dot(d_hat);
    if (std::abs(along) > 0.0)
        u1 *= std::polar(1.0, std::arg(along));

    const Eigen::VectorXcd proj = gmat.adjoint() * u1;
    Eigen::VectorXcd theta(n);
    for (Eigen::Index i = 0; i < n; ++i)
        theta[i] = std::polar(1.0, std::arg(proj[i]));

    const Eigen::MatrixXcd gram = gmat.adjoint() * gmat;
    const Eigen::VectorXcd cross = gmat.adjoint() * d_hat;
    Eigen::VectorXcd w = gram * theta;
    double obj = (gmat * theta + d_hat).squaredNorm();
    for (int sweep = 0; sweep < 50; ++sweep) {
        detail::ao_sweep(gram, cross, theta, w);
        const double now = (gmat * theta + d_hat).squaredNorm();
        const double gain = now - obj;
        obj = now;
        if (gain <= 1e-6 * std::abs(now))
            break;
    }
    return theta;
}

// Rate with the alternating-optimization configuration computed on the true
// channels; the multi-antenna counterpart of capacity_single.
inline double capacity_multi(const Eigen::MatrixXcd& bs_ris, const Eigen::VectorXcd& g,
                             const Eigen::VectorXcd& d, double snr_data)
{
    return spectral_efficiency(optimal_config_multi(g, d, bs_ris), bs_ris, g, d, snr_data);
}

// Mutable unused-subset view over a codebook; one instance per adaptive loop.
class RemainingSet {
public:
    explicit RemainingSet(const Codebook& book)
        : book_(&book), used_(static_cast<std::size_t>(book.size()), 0)
    {
    }

    const Codebook& book() const { return *book_; }

    int left() const
    {
        int n = 0;
        for (char u : used_)
            n += u == 0;
        return n;
    }

    // marks an exact copy of a codebook entry as spent; no-op otherwise
    bool take_if_member(const Eigen::VectorXcd& config)
    {
        for (int i = 0; i < book_->size(); ++i) {
            if (used_[i] || book_->configs[i].size() != config.size())
                continue;
            if ((book_->configs[i] - config).cwiseAbs().maxCoeff() == 0.0) {
                used_[i] = 1;
                return true;
            }
        }
        return false;
    }

    // unused entry with the largest |target^H entry|; ties keep the lowest index
    std::pair<Eigen::VectorXcd, int> take_nearest(const Eigen::VectorXcd& target)
    {
        int best = -1;
        double score = -1.0;
        for (int i = 0; i < book_->size(); ++i) {
            if (used_[i])
                continue;
            const double c = std::abs(target.dot(book_->configs[i]));
            if (c > score) {
                score = c;
                best = i;
            }
        }
        if (best < 0)
            throw codebook_exhausted_error("take_nearest: no unused configurations");
        used_[best] = 1;
        return {book_->configs[best], best};
    }

private:
    const Codebook* book_;
    std::vector<char> used_;
};

inline std::pair<Eigen::VectorXcd, int> select_next(RemainingSet& remaining,
                                                    const Eigen::VectorXcd& target)
{
    return remaining.take_nearest(target);
}

// Ground-truth channels for one coherence block, used both to synthesize
// pilot observations and to score configurations.
struct LinkRealization {
    Eigen::MatrixXcd bs_ris;
    Eigen::VectorXcd g;
    Eigen::VectorXcd d;
    double pilot_power = 1.0;
    double noise_var = 1.0;
    double snr_data = 1.0;
};

struct LoopResult {
    Estimate final_estimate;
    Eigen::VectorXcd config;          // rate-maximizing configuration, final estimate
    std::vector<Estimate> estimates;  // one per iteration, pilot counts 2..L
    std::vector<double> se_trace;     // rate of each iteration's config on the true channels
    std::vector<int> selected;        // codebook indices spent on pilots 3..L
    PilotRecord record;
    int pilots_sent = 0;
    int feedback_bits = 0;            // index feedback cost per selection
};

// Closed estimation loop: two initial pilots, then estimate / configure /
// pick the nearest unused codebook entry / transmit, until the pilot budget
// is spent. noise(m) supplies one receiver noise vector per pilot. The first
// estimate searches globally unless a hint seeds it; later estimates chain
// the previous fix as their hint, which narrows the local stage without
// losing the global coarse argmax. The session must be freshly reset and
// built on the same BS-RIS channel and pilot power as the link.
template <typename NoiseFn>
LoopResult run_mle_loop_in(EstimationSession& session, const ArrayGeometry& geom,
                           const LinkRealization& link, const Codebook& book,
                           const InitConfigs& init, int budget, NoiseFn&& noise,
                           std::optional<ChannelPoint> hint = {})
{
    if (budget < 2)
        throw std::invalid_argument("run_mle_loop: need at least two pilots");
    const int m = static_cast<int>(link.bs_ris.rows());
    RemainingSet remaining(book);
    remaining.take_if_member(init.theta1);
    remaining.take_if_member(init.theta2);

    const double root_p = std::sqrt(link.pilot_power);
    auto transmit = [&](const Eigen::VectorXcd& theta) {
        const Eigen::VectorXcd y =
            root_p * (link.bs_ris * theta.cwiseProduct(link.g) + link.d) + noise(m);
        session.add_pilot(theta, y);
    };
    transmit(init.theta1);
    transmit(init.theta2);

    const Eigen::VectorXcd h = link.bs_ris.row(0).transpose();
    LoopResult out;
    out.feedback_bits =
        book.size() > 1 ? std::bit_width(static_cast<unsigned>(book.size()) - 1u) : 0;
    std::optional<ChannelPoint> next_hint = hint;
    for (int sent = 2; sent <= budget; ++sent) {
        Estimate est = session.estimate(next_hint);
        next_hint = est.point_hat;
        out.config = m == 1 ? optimal_config_single(geom, est, h)
                            : optimal_config_multi(est.g_hat, est.d_hat, link.bs_ris);
        out.se_trace.push_back(
            m == 1 ? spectral_efficiency(out.config, h, link.g, link.d[0], link.snr_data)
                   : spectral_efficiency(out.config, link.bs_ris, link.g, link.d,
                                         link.snr_data));
        out.estimates.push_back(est);
        out.final_estimate = std::move(est);
        out.pilots_sent = sent;
        if (sent == budget)
            break;
        if (remaining.left() == 0)
            break; // codebook spent; stop with the shortfall visible
        auto [theta, index] = remaining.take_nearest(out.config);
        out.selected.push_back(index);
        transmit(theta);
    }
    out.record = session.record();
    return out;
}

template <typename NoiseFn>
LoopResult run_mle_loop(const ArrayGeometry& geom, const LinkRealization& link,
                        const Codebook& book, const SearchGrid& grid, const InitConfigs& init,
                        int budget, NoiseFn&& noise, const EstimatorOptions& opts = {},
                        std::optional<ChannelPoint> hint = {})
{
    EstimationSession session(geom, link.bs_ris, grid, link.pilot_power, link.noise_var, opts);
    return run_mle_loop_in(session, geom, link, book, init, budget,
                           std::forward<NoiseFn>(noise), hint);
}

// Noise source for idealized runs.
inline Eigen::VectorXcd zero_noise(int m)
{
    return Eigen::VectorXcd::Zero(m);
}

} // namespace rismle
