// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#ifndef RISMLE_ESTIMATOR_HPP
#define RISMLE_ESTIMATOR_HPP

#include <rismle/errors.hpp>
#include <rismle/geometry.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

namespace rismle {

// A direction is unobservable when the centered reflected component carries
// less than this fraction of its uncentered energy.
inline constexpr double singular_rel_tol = 1e-12;

// Received pilots together with the reflection configurations that produced
// them. Rows of `configs` are the unit-modulus configurations; column l of
// `samples` holds the receive vector of pilot l (one row per receive antenna).
struct PilotRecord {
    Eigen::MatrixXcd configs;
    Eigen::MatrixXcd samples;
    double pilot_power = 1.0;
    double noise_var = 1.0;

    int pilots() const { return static_cast<int>(configs.rows()); }
    int antennas() const { return static_cast<int>(samples.rows()); }
    int elements() const { return static_cast<int>(configs.cols()); }

    void add_pilot(const Eigen::VectorXcd& theta, const Eigen::VectorXcd& y)
    {
        if (pilots() == 0) {
            configs.resize(0, theta.size());
            samples.resize(y.size(), 0);
        }
        if (theta.size() != configs.cols() || y.size() != samples.rows())
            throw std::invalid_argument("pilot dimensions do not match the record");
        configs.conservativeResize(configs.rows() + 1, Eigen::NoChange);
        configs.row(configs.rows() - 1) = theta.transpose();
        samples.conservativeResize(Eigen::NoChange, samples.cols() + 1);
        samples.col(samples.cols() - 1) = y;
    }
};

inline void check_record(const PilotRecord& rec)
{
    if (rec.pilots() != rec.samples.cols())
        throw std::invalid_argument("pilot count mismatch between configs and samples");
    if (rec.pilot_power <= 0.0 || !std::isfinite(rec.pilot_power))
        throw std::invalid_argument("pilot power must be positive");
    if (rec.noise_var < 0.0 || !std::isfinite(rec.noise_var))
        throw std::invalid_argument("noise variance must be non-negative");
    for (int l = 0; l < rec.pilots(); ++l)
        for (int n = 0; n < rec.elements(); ++n)
            if (std::abs(std::abs(rec.configs(l, n)) - 1.0) > 1e-9)
                throw std::invalid_argument("reflection configurations must be unit modulus");
}

// Candidate source locations: the cross product of azimuths, elevations and
// distances, plus a far-field slice when `far_field` is set. Angle lists are
// sorted radians; the standard factory spaces them uniformly in sine.
struct SearchGrid {
    std::vector<double> azimuths;
    std::vector<double> elevations;
    std::vector<double> distances;
    bool far_field = true;

    static SearchGrid standard(const ArrayGeometry& g, int n_az = 0, int n_el = 0,
                               int n_dist = 24)
    {
        if (n_az <= 0)
            n_az = 8 * g.n_h;
        if (n_el <= 0)
            n_el = 8 * g.n_v;
        SearchGrid grid;
        grid.azimuths.reserve(n_az);
        for (int i = 0; i < n_az; ++i)
            grid.azimuths.push_back(std::asin(-1.0 + 2.0 * (i + 0.5) / n_az));
        grid.elevations.reserve(n_el);
        for (int i = 0; i < n_el; ++i)
            grid.elevations.push_back(std::asin(-1.0 + 2.0 * (i + 0.5) / n_el));
        const FieldBoundaries b = field_boundaries(g);
        if (n_dist > 0 && b.fraunhofer > 0.0) {
            const double lo = b.bjornson;
            const double hi = 10.0 * b.fraunhofer;
            for (int i = 0; i < n_dist; ++i) {
                double t = n_dist == 1 ? 0.0 : static_cast<double>(i) / (n_dist - 1);
                grid.distances.push_back(lo * std::pow(hi / lo, t));
            }
        }
        return grid;
    }
};

inline void check_grid(const SearchGrid& grid)
{
    if (grid.azimuths.empty() || grid.elevations.empty())
        throw std::invalid_argument("search grid needs at least one azimuth and elevation");
    if (!grid.far_field && grid.distances.empty())
        throw std::invalid_argument("search grid has no distance slice at all");
    for (double a : grid.azimuths)
        check_angles(a, 0.0);
    for (double e : grid.elevations)
        check_angles(0.0, e);
    if (!std::is_sorted(grid.azimuths.begin(), grid.azimuths.end()) ||
        !std::is_sorted(grid.elevations.begin(), grid.elevations.end()) ||
        !std::is_sorted(grid.distances.begin(), grid.distances.end()))
        throw std::invalid_argument("search grid lists must be sorted ascending");
    for (double d : grid.distances)
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("grid distances must be positive and finite");
}

struct Estimate {
    ChannelPoint point_hat;
    double beta_hat = 0.0;
    double omega_hat = 0.0;
    Eigen::VectorXcd g_hat;
    Eigen::VectorXcd d_hat;
    double spectrum_peak = 0.0;

    // single-antenna view of the direct path
    double alpha_hat() const { return std::norm(d_hat[0]); }
    double vartheta_hat() const { return std::arg(d_hat[0]); }
};

namespace detail {

// Sufficient statistics of one candidate point: the pilot-centered
// correlation with the reflected component and its centered energy.
struct PointStats {
    std::complex<double> corr{0.0, 0.0};
    double denom = 0.0;
    double snorm = 0.0;
    Eigen::VectorXcd s1;
    bool singular = true;

    double value() const { return singular ? 0.0 : std::norm(corr) / denom; }
};

inline PointStats combine_stats(const Eigen::VectorXcd& s1, double snorm,
                                std::complex<double> s3, const Eigen::VectorXcd& ysum, int l)
{
    PointStats st;
    st.s1 = s1;
    st.snorm = snorm;
    st.corr = s3 - ysum.dot(s1) / static_cast<double>(l);
    st.denom = snorm - s1.squaredNorm() / static_cast<double>(l);
    st.singular = !(st.denom > singular_rel_tol * snorm) || !(snorm > 0.0);
    return st;
}

// Exact statistics of a single point, recomputed from the record.
inline PointStats eval_point(const PilotRecord& rec, const Eigen::MatrixXcd& bs_ris,
                             const ArrayGeometry& geom, const ChannelPoint& p)
{
    const int l = rec.pilots();
    const int m = rec.antennas();
    const Eigen::VectorXcd a = array_response(geom, p);
    Eigen::VectorXcd s1 = Eigen::VectorXcd::Zero(m);
    double snorm = 0.0;
    std::complex<double> s3{0.0, 0.0};
    for (int i = 0; i < l; ++i) {
        Eigen::VectorXcd f = bs_ris * rec.configs.row(i).transpose().cwiseProduct(a);
        s1 += f;
        snorm += f.squaredNorm();
        s3 += rec.samples.col(i).dot(f);
    }
    return combine_stats(s1, snorm, s3, rec.samples.rowwise().sum(), l);
}

// Closed-form parameter estimates at a fixed point.
inline Estimate finish_estimate(const PilotRecord& rec, const ArrayGeometry& geom,
                                const ChannelPoint& p, const PointStats& st)
{
    const double l = rec.pilots();
    const double sqp = std::sqrt(rec.pilot_power);
    Estimate est;
    est.point_hat = p;
    est.spectrum_peak = st.value();
    est.omega_hat = -std::arg(st.corr);
    const double sqb = std::abs(st.corr) / (sqp * st.denom);
    est.beta_hat = sqb * sqb;
    const std::complex<double> scale = sqb * std::polar(1.0, est.omega_hat);
    est.g_hat = scale * array_response(geom, p);
    est.d_hat = (rec.samples.rowwise().sum() - sqp * scale * st.s1) / (sqp * l);
    return est;
}

// Spectrum values for a batch of candidate responses (columns of `a_batch`);
// singular directions come back as -infinity.
inline Eigen::VectorXd eval_batch(const PilotRecord& rec, const Eigen::MatrixXcd& bs_ris,
                                  const Eigen::Ref<const Eigen::MatrixXcd>& a_batch)
{
    const int l = rec.pilots();
    const int m = rec.antennas();
    const int p = static_cast<int>(a_batch.cols());
    Eigen::MatrixXcd s1 = Eigen::MatrixXcd::Zero(m, p);
    Eigen::RowVectorXd snorm = Eigen::RowVectorXd::Zero(p);
    Eigen::RowVectorXcd s3 = Eigen::RowVectorXcd::Zero(p);
    Eigen::MatrixXcd f(m, p);
    Eigen::MatrixXcd gmat(m, rec.elements());
    for (int i = 0; i < l; ++i) {
        gmat = bs_ris.array().rowwise() * rec.configs.row(i).array();
        f.noalias() = gmat * a_batch;
        s1 += f;
        snorm += f.colwise().squaredNorm();
        s3 += rec.samples.col(i).adjoint() * f;
    }
    const Eigen::VectorXcd ysum = rec.samples.rowwise().sum();
    Eigen::VectorXd out(p);
    for (int j = 0; j < p; ++j) {
        const double sn = snorm[j];
        const double denom = sn - s1.col(j).squaredNorm() / l;
        if (!(denom > singular_rel_tol * sn) || !(sn > 0.0)) {
            out[j] = -std::numeric_limits<double>::infinity();
            continue;
        }
        const std::complex<double> corr = s3[j] - ysum.dot(s1.col(j)) / static_cast<double>(l);
        out[j] = std::norm(corr) / denom;
    }
    return out;
}

struct ScanBest {
    double value = -std::numeric_limits<double>::infinity();
    ChannelPoint point;
    bool found = false;
    // Candidates must beat the incumbent by this relative margin. Spectrum
    // values are nonnegative, so ulp-level jitter on a tie plateau cannot
    // displace a held point once the margin is set.
    double margin = 0.0;
};

// Full scan over a list of points in their given order; first point wins ties.
inline void scan_points(const PilotRecord& rec, const Eigen::MatrixXcd& bs_ris,
                        const ArrayGeometry& geom, const OffsetTable& table,
                        const std::vector<ChannelPoint>& points, ScanBest& best)
{
    constexpr int batch = 1024;
    const int n = geom.size();
    Eigen::MatrixXcd a(n, std::min<int>(batch, static_cast<int>(points.size())));
    for (std::size_t start = 0; start < points.size(); start += batch) {
        const int count = static_cast<int>(std::min<std::size_t>(batch, points.size() - start));
        for (int j = 0; j < count; ++j)
            response_into(geom, table, points[start + j], a.col(j));
        Eigen::VectorXd vals = eval_batch(rec, bs_ris, a.leftCols(count));
        for (int j = 0; j < count; ++j) {
            if (std::isfinite(vals[j]) && vals[j] > best.value * (1.0 + best.margin)) {
                best.value = vals[j];
                best.point = points[start + j];
                best.found = true;
            }
        }
    }
}

inline std::vector<ChannelPoint> grid_slice(const SearchGrid& grid, double distance)
{
    std::vector<ChannelPoint> pts;
    pts.reserve(grid.azimuths.size() * grid.elevations.size());
    for (double el : grid.elevations)
        for (double az : grid.azimuths)
            pts.push_back(ChannelPoint{az, el, distance});
    return pts;
}

inline double local_gap(const std::vector<double>& sorted, double x, double fallback)
{
    if (sorted.size() < 2)
        return fallback;
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    std::size_t idx = std::min<std::size_t>(it - sorted.begin(), sorted.size() - 1);
    double gap = 0.0;
    if (idx > 0)
        gap = std::max(gap, sorted[idx] - sorted[idx - 1]);
    if (idx + 1 < sorted.size())
        gap = std::max(gap, sorted[idx + 1] - sorted[idx]);
    return gap;
}

} // namespace detail

// Likelihood spectrum of one direction for a single-antenna record.
inline double spatial_spectrum(const PilotRecord& rec, const ArrayGeometry& geom,
                               const Eigen::VectorXcd& bs_ris, const ChannelPoint& p)
{
    if (rec.antennas() != 1)
        throw std::invalid_argument("spatial_spectrum expects a single-antenna record");
    detail::PointStats st = detail::eval_point(rec, bs_ris.transpose(), geom, p);
    if (st.singular)
        throw singular_direction_error("direction is unobservable from the pilot record");
    return st.value();
}

namespace detail {

inline Estimate mle_impl(const PilotRecord& rec, const Eigen::MatrixXcd& bs_ris,
                         const ArrayGeometry& geom, const SearchGrid& grid)
{
    check_record(rec);
    check_grid(grid);
    if (rec.pilots() < 2)
        throw estimation_impossible_error("at least two pilots are required");
    if (bs_ris.cols() != rec.elements() || bs_ris.rows() != rec.antennas())
        throw std::invalid_argument("BS-RIS channel dimensions do not match the record");

    const OffsetTable table = element_offsets(geom);
    ScanBest best;
    for (double d : grid.distances)
        scan_points(rec, bs_ris, geom, table, grid_slice(grid, d), best);
    if (grid.far_field)
        scan_points(rec, bs_ris, geom, table,
                    grid_slice(grid, std::numeric_limits<double>::infinity()), best);
    if (!best.found)
        throw estimation_impossible_error("every grid point is unobservable");
    return finish_estimate(rec, geom, best.point,
                           eval_point(rec, bs_ris, geom, best.point));
}

} // namespace detail

inline Estimate mle_single(const PilotRecord& rec, const Eigen::VectorXcd& bs_ris,
                           const ArrayGeometry& geom, const SearchGrid& grid)
{
    if (rec.antennas() != 1)
        throw std::invalid_argument("mle_single expects a single-antenna record");
    return detail::mle_impl(rec, bs_ris.transpose(), geom, grid);
}

inline Estimate mle_multi(const PilotRecord& rec, const Eigen::MatrixXcd& bs_ris,
                          const ArrayGeometry& geom, const SearchGrid& grid)
{
    return detail::mle_impl(rec, bs_ris, geom, grid);
}

// Local pattern search around a grid maximizer. Angles move in sine space and
// distance in inverse space, the natural scales of the response; every level
// shrinks the step by four. The returned point never has a lower spectrum
// value than the start.
inline ChannelPoint refine_grid(const PilotRecord& rec, const Eigen::MatrixXcd& bs_ris,
                                const ArrayGeometry& geom, const ChannelPoint& coarse,
                                const SearchGrid& grid, int levels)
{
    check_record(rec);
    if (levels <= 0)
        return coarse;

    std::vector<double> su, sv, iv;
    for (double a : grid.azimuths)
        su.push_back(std::sin(a));
    for (double e : grid.elevations)
        sv.push_back(std::sin(e));
    if (grid.far_field)
        iv.push_back(0.0);
    for (auto it = grid.distances.rbegin(); it != grid.distances.rend(); ++it)
        iv.push_back(1.0 / *it);

    double x = std::sin(coarse.azimuth);
    double y = std::sin(coarse.elevation);
    double z = coarse.is_far_field() ? 0.0 : 1.0 / coarse.distance;
    const bool with_distance = !grid.distances.empty();
    const double iv_max = with_distance ? 1.0 / grid.distances.front() : 0.0;
    const double iv_min = grid.far_field ? 0.0 : 1.0 / grid.distances.back();

    double step_u = detail::local_gap(su, x, 2.0 / 256);
    double step_v = detail::local_gap(sv, y, 2.0 / 256);
    double step_w = with_distance ? detail::local_gap(iv, z, 0.0) : 0.0;

    const OffsetTable table = element_offsets(geom);
    auto to_point = [](double u, double v, double w) {
        ChannelPoint p;
        p.azimuth = std::asin(std::clamp(u, -1.0, 1.0));
        p.elevation = std::asin(std::clamp(v, -1.0, 1.0));
        p.distance = w > 0.0 ? 1.0 / w : std::numeric_limits<double>::infinity();
        return p;
    };

    detail::ScanBest best;
    detail::scan_points(rec, bs_ris, geom, table, {to_point(x, y, z)}, best);
    // Tie plateaus (two pilots leave the spectrum flat) must not let the
    // pattern search wander off the start point on rounding noise alone.
    best.margin = 1e-9;

    for (int level = 0; level < levels; ++level) {
        step_u /= 4.0;
        step_v /= 4.0;
        step_w /= 4.0;
        for (int move = 0; move < 4; ++move) {
            std::vector<ChannelPoint> cand;
            for (int ow = with_distance ? -2 : 0; ow <= (with_distance ? 2 : 0); ++ow)
                for (int ov = -2; ov <= 2; ++ov)
                    for (int ou = -2; ou <= 2; ++ou) {
                        if (ou == 0 && ov == 0 && ow == 0)
                            continue;
                        double w = std::clamp(z + ow * step_w, iv_min, iv_max);
                        cand.push_back(to_point(std::clamp(x + ou * step_u, -1.0, 1.0),
                                                std::clamp(y + ov * step_v, -1.0, 1.0), w));
                    }
            const double before = best.value;
            detail::scan_points(rec, bs_ris, geom, table, cand, best);
            if (!(best.value > before))
                break;
            x = std::sin(best.point.azimuth);
            y = std::sin(best.point.elevation);
            z = best.point.is_far_field() ? 0.0 : 1.0 / best.point.distance;
        }
    }
    return best.found ? best.point : coarse;
}

// Search effort knobs for the staged incremental estimator. The staged search
// scans the far-field slice in full, then spends distance ladders and
// refinement only around the strongest cells.
struct EstimatorOptions {
    int top_k = 4;        // distinct coarse candidates to keep
    int window_cells = 7; // half-width of the local window, in grid cells
    int refine_levels = 6;
};

// Incremental estimator for pilot-by-pilot operation. Each new pilot updates
// per-cell statistics of the far-field slice; estimates run a staged search
// (coarse scan, local distance ladder, pattern refinement) and agree with the
// full-grid reference whenever the window covers the grid.
class EstimationSession {
public:
    EstimationSession(const ArrayGeometry& geom, Eigen::MatrixXcd bs_ris, SearchGrid grid,
                      double pilot_power, double noise_var, EstimatorOptions opts = {})
        : geom_(geom), bs_ris_(std::move(bs_ris)), grid_(std::move(grid)), opts_(opts),
          table_(element_offsets(geom))
    {
        check_geometry(geom_);
        check_grid(grid_);
        if (!grid_.far_field)
            throw std::invalid_argument("session grids must include the far-field slice");
        if (bs_ris_.cols() != geom_.size())
            throw std::invalid_argument("BS-RIS channel does not match the geometry");
        rec_.pilot_power = pilot_power;
        rec_.noise_var = noise_var;

        ga_ = static_cast<int>(grid_.azimuths.size());
        ge_ = static_cast<int>(grid_.elevations.size());
        const double kappa = geom_.wavenumber();
        vert_.resize(geom_.n_v, ge_);
        horiz_.resize(ge_);
        for (int e = 0; e < ge_; ++e) {
            const double w = std::sin(grid_.elevations[e]);
            const double ce = std::cos(grid_.elevations[e]);
            for (int v = 0; v < geom_.n_v; ++v)
                vert_(v, e) = std::polar(1.0, kappa * v * geom_.delta_v * w);
            horiz_[e].resize(geom_.n_h, ga_);
            for (int a = 0; a < ga_; ++a) {
                const double u = std::sin(grid_.azimuths[a]) * ce;
                for (int hh = 0; hh < geom_.n_h; ++hh)
                    horiz_[e](hh, a) = std::polar(1.0, kappa * hh * geom_.delta_h * u);
            }
        }
        reset();
    }

    // Drop accumulated pilots but keep the precomputed scan phasors.
    void reset()
    {
        const int m = static_cast<int>(bs_ris_.rows());
        rec_.configs.resize(0, geom_.size());
        rec_.samples.resize(m, 0);
        s1_ = Eigen::MatrixXcd::Zero(m, ga_ * ge_);
        s2_ = Eigen::VectorXd::Zero(ga_ * ge_);
        s3_ = Eigen::VectorXcd::Zero(ga_ * ge_);
        ysum_ = Eigen::VectorXcd::Zero(m);
    }

    const PilotRecord& record() const { return rec_; }
    int pilots() const { return rec_.pilots(); }

    void add_pilot(const Eigen::VectorXcd& theta, const Eigen::VectorXcd& y)
    {
        rec_.add_pilot(theta, y);
        ysum_ += y;
        const int m = static_cast<int>(bs_ris_.rows());
        Eigen::VectorXcd probe(geom_.size());
        Eigen::RowVectorXcd dvec(geom_.n_h), zrow(ga_);
        for (int r = 0; r < m; ++r) {
            probe = bs_ris_.row(r).transpose().cwiseProduct(theta);
            Eigen::Map<const Eigen::MatrixXcd> cmat(probe.data(), geom_.n_h, geom_.n_v);
            for (int e = 0; e < ge_; ++e) {
                dvec.noalias() = vert_.col(e).transpose() * cmat.transpose();
                zrow.noalias() = dvec * horiz_[e];
                s1_.row(r).segment(e * ga_, ga_) += zrow;
                s2_.segment(e * ga_, ga_) += zrow.cwiseAbs2().transpose();
                s3_.segment(e * ga_, ga_) +=
                    (std::conj(y[r]) * zrow).transpose();
            }
        }
    }

    // Staged maximum-likelihood estimate from the pilots so far. A hint
    // focuses the local stage on the hinted cell plus the coarse argmax,
    // for trackers that re-estimate from a nearby previous fix.
    Estimate estimate(std::optional<ChannelPoint> hint = {}) const
    {
        const int l = rec_.pilots();
        if (l < 2)
            throw estimation_impossible_error("at least two pilots are required");

        const int cells = ga_ * ge_;
        Eigen::VectorXd coarse(cells);
        bool any = false;
        for (int c = 0; c < cells; ++c) {
            const double sn = s2_[c];
            const double denom = sn - s1_.col(c).squaredNorm() / l;
            if (!(denom > singular_rel_tol * sn) || !(sn > 0.0)) {
                coarse[c] = -std::numeric_limits<double>::infinity();
                continue;
            }
            const std::complex<double> corr =
                s3_[c] - ysum_.dot(s1_.col(c)) / static_cast<double>(l);
            coarse[c] = std::norm(corr) / denom;
            any = true;
        }
        if (!any)
            throw estimation_impossible_error("every grid cell is unobservable");

        std::vector<int> centers = hint ? hinted_centers(coarse, *hint)
                                        : top_centers(coarse);

        // union of Chebyshev windows around the centers
        std::vector<char> mask(cells, 0);
        const int w = opts_.window_cells;
        for (int c : centers) {
            const int ca = c % ga_, ce = c / ga_;
            for (int e = std::max(0, ce - w); e <= std::min(ge_ - 1, ce + w); ++e)
                for (int a = std::max(0, ca - w); a <= std::min(ga_ - 1, ca + w); ++a)
                    mask[e * ga_ + a] = 1;
        }

        detail::ScanBest best;
        if (hint) {
            // Seed with the hinted point so exact ties keep the prior fix.
            // With two pilots the centered spectrum is flat across the grid,
            // and without the seed the scan order would pick an arbitrary
            // point and drag the next window away from the true cell.
            const detail::PointStats st =
                detail::eval_point(rec_, bs_ris_, geom_, *hint);
            if (!st.singular) {
                best.value = st.value();
                best.point = *hint;
                best.found = true;
                best.margin = 1e-9;
            }
        }
        std::vector<ChannelPoint> pts;
        auto scan_distance = [&](double dist) {
            pts.clear();
            for (int e = 0; e < ge_; ++e)
                for (int a = 0; a < ga_; ++a)
                    if (mask[e * ga_ + a])
                        pts.push_back(
                            ChannelPoint{grid_.azimuths[a], grid_.elevations[e], dist});
            detail::scan_points(rec_, bs_ris_, geom_, table_, pts, best);
        };
        for (double d : grid_.distances)
            scan_distance(d);
        scan_distance(std::numeric_limits<double>::infinity());
        if (!best.found)
            throw estimation_impossible_error("every local candidate is unobservable");

        ChannelPoint refined =
            refine_grid(rec_, bs_ris_, geom_, best.point, grid_, opts_.refine_levels);
        return detail::finish_estimate(rec_, geom_, refined,
                                       detail::eval_point(rec_, bs_ris_, geom_, refined));
    }

private:
    std::vector<int> top_centers(const Eigen::VectorXd& coarse) const
    {
        std::vector<int> centers;
        const int sep = opts_.window_cells;
        for (int round = 0; round < opts_.top_k; ++round) {
            int pick = -1;
            double pick_val = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < coarse.size(); ++c) {
                if (!(coarse[c] > pick_val))
                    continue;
                bool clash = false;
                for (int s : centers) {
                    int da = std::abs(c % ga_ - s % ga_);
                    int de = std::abs(c / ga_ - s / ga_);
                    if (std::max(da, de) < sep) {
                        clash = true;
                        break;
                    }
                }
                if (!clash) {
                    pick = c;
                    pick_val = coarse[c];
                }
            }
            if (pick < 0)
                break;
            centers.push_back(pick);
        }
        return centers;
    }

    std::vector<int> hinted_centers(const Eigen::VectorXd& coarse, const ChannelPoint& hint) const
    {
        const double su = std::sin(hint.azimuth);
        const double sv = std::sin(hint.elevation);
        auto nearest = [](const std::vector<double>& angles, double s) {
            int best = 0;
            double err = std::numeric_limits<double>::infinity();
            for (int i = 0; i < static_cast<int>(angles.size()); ++i) {
                double e = std::abs(std::sin(angles[i]) - s);
                if (e < err) {
                    err = e;
                    best = i;
                }
            }
            return best;
        };
        std::vector<int> centers{nearest(grid_.elevations, sv) * ga_ +
                                 nearest(grid_.azimuths, su)};
        int argmax = 0;
        coarse.maxCoeff(&argmax);
        if (argmax != centers[0])
            centers.push_back(argmax);
        return centers;
    }

    ArrayGeometry geom_;
    Eigen::MatrixXcd bs_ris_;
    SearchGrid grid_;
    EstimatorOptions opts_;
    OffsetTable table_;
    PilotRecord rec_;
    int ga_ = 0, ge_ = 0;
    Eigen::MatrixXcd vert_;
    std::vector<Eigen::MatrixXcd> horiz_;
    Eigen::MatrixXcd s1_;
    Eigen::VectorXd s2_;
    Eigen::VectorXcd s3_;
    Eigen::VectorXcd ysum_;
};

} // namespace rismle

#endif
