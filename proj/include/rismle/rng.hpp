// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace rismle {

// Deterministic random stream. Parallel trials derive independent streams by
// striding the master seed; distributions are constructed per call so the
// output sequence depends only on the call sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Why a stride and not XOR: small masters XOR small indices produce the
    // same multiset of per-trial seeds, making aggregate statistics nearly
    // seed-invariant. trial_seed(x, 0) == x, so a run whose master seed is
    // trial_seed(m, i) reproduces trial i of the run seeded with m.
    static std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index)
    {
        return master_seed + index * 0x9e3779b97f4a7c15ULL;
    }

    static Rng trial_stream(std::uint64_t master_seed, std::uint64_t index)
    {
        return Rng(trial_seed(master_seed, index));
    }

    // uniform over {0, 1, ..., n-1}
    int uniform_int(int n)
    {
        if (n < 1)
            throw std::invalid_argument("uniform_int needs a positive range");
        return std::uniform_int_distribution<int>(0, n - 1)(eng_);
    }

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }

    double normal()
    {
        return std::normal_distribution<double>(0.0, 1.0)(eng_);
    }

    double exponential(double mean)
    {
        if (!(mean > 0.0))
            throw std::invalid_argument("exponential mean must be positive");
        return std::exponential_distribution<double>(1.0 / mean)(eng_);
    }

    // CN(0, 1)
    std::complex<double> cnormal()
    {
        std::normal_distribution<double> n(0.0, 1.0);
        const double re = n(eng_);
        const double im = n(eng_);
        return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
    }

    Eigen::VectorXcd cnormal_vector(int n)
    {
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i)
            v[i] = cnormal();
        return v;
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace rismle
