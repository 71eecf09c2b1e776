#ifndef LEVYLMM_PIECEWISE_HPP
#define LEVYLMM_PIECEWISE_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace levylmm {

/// Right-continuous step function: value[k] on [knots[k], knots[k+1]),
/// the last value extends to +infinity and the first one below knots[0].
class PiecewiseConstant {
public:
    PiecewiseConstant() : knots_{0.0}, values_{0.0} {}
    explicit PiecewiseConstant(double constant) : knots_{0.0}, values_{constant} {}
    PiecewiseConstant(std::vector<double> knots, std::vector<double> values)
        : knots_(std::move(knots)), values_(std::move(values)) {
        if (knots_.empty() || knots_.size() != values_.size())
            throw ConfigError("PiecewiseConstant: knots and values must be non-empty and of equal size");
        if (!std::is_sorted(knots_.begin(), knots_.end()) ||
            std::adjacent_find(knots_.begin(), knots_.end()) != knots_.end())
            throw ConfigError("PiecewiseConstant: knots must be strictly increasing");
    }

    double operator()(double t) const {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
        if (it == knots_.begin()) return values_.front();
        return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
    }

    double sup() const { return *std::max_element(values_.begin(), values_.end()); }
    double inf() const { return *std::min_element(values_.begin(), values_.end()); }

    std::span<const double> knots() const { return knots_; }
    std::span<const double> values() const { return values_; }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

} // namespace levylmm

#endif // LEVYLMM_PIECEWISE_HPP
