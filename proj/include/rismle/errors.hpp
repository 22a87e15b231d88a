// SPDX-License-Identifier: Apache-2.0
//
// rismle: maximum-likelihood channel estimation for RIS-assisted links

#pragma once

#include <stdexcept>
#include <string>

namespace rismle {

// Spatial direction unobservable through the probing matrix: the concentrated
// likelihood denominator vanished for the requested direction.
class singular_direction_error : public std::runtime_error {
public:
    explicit singular_direction_error(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

// Every direction of the search grid is unobservable (e.g. a single pilot).
class estimation_impossible_error : public std::runtime_error {
public:
    explicit estimation_impossible_error(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

// Geometry does not admit the requested construction (e.g. sub-surface
// partitioning needs a square array with power-of-two spacing fraction).
class unsupported_geometry_error : public std::invalid_argument {
public:
    explicit unsupported_geometry_error(const std::string& what)
        : std::invalid_argument(what)
    {
    }
};

// A ratio metric was requested against a zero-norm reference.
class undefined_metric_error : public std::invalid_argument {
public:
    explicit undefined_metric_error(const std::string& what)
        : std::invalid_argument(what)
    {
    }
};

// The adaptive loop ran out of unused codebook entries.
class codebook_exhausted_error : public std::runtime_error {
public:
    explicit codebook_exhausted_error(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

} // namespace rismle
