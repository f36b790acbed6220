#include "drmdp/spaces.hpp"

#include "drmdp/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace drmdp {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_space: return "InvalidSpace";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::negative_weight: return "NegativeWeight";
    case Errc::distribution_sum: return "DistributionSum";
    case Errc::missing_kernel_entry: return "MissingKernelEntry";
    case Errc::invalid_reward: return "InvalidReward";
    case Errc::invalid_discount: return "InvalidDiscount";
    case Errc::invalid_ambiguity: return "InvalidAmbiguity";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::missing_true_kernel: return "MissingTrueKernel";
    case Errc::divergent_series: return "DivergentSeries";
    case Errc::lp_failure: return "LPFailure";
    case Errc::non_convergence: return "NonConvergence";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IOError";
    }
    return "Unknown";
}

std::string_view to_string(ParseErrc kind) noexcept {
    switch (kind) {
    case ParseErrc::syntax: return "Syntax";
    case ParseErrc::missing_field: return "MissingField";
    case ParseErrc::type_mismatch: return "TypeMismatch";
    case ParseErrc::shape: return "Shape";
    case ParseErrc::distribution_sum: return "DistributionSum";
    case ParseErrc::invalid_value: return "InvalidValue";
    case ParseErrc::io: return "IO";
    }
    return "Unknown";
}

template <class Tag> PointSet<Tag>::PointSet(std::vector<numvec> points) : points_(std::move(points)) {
    if (points_.empty())
        throw Error(Errc::invalid_space, "point set is empty");
    const auto dim = points_.front().size();
    if (dim == 0)
        throw Error(Errc::invalid_space, "points must have dimension >= 1");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].size() != dim)
            throw Error(Errc::invalid_space, "point " + std::to_string(i) + " has dimension " +
                                                 std::to_string(points_[i].size()) +
                                                 ", expected " + std::to_string(dim));
        for (double c : points_[i])
            if (!std::isfinite(c))
                throw Error(Errc::invalid_space,
                            "point " + std::to_string(i) + " has a non-finite coordinate");
    }
    for (std::size_t i = 0; i < points_.size(); ++i)
        for (std::size_t j = i + 1; j < points_.size(); ++j)
            if (points_[i] == points_[j])
                throw Error(Errc::invalid_space, "points " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " coincide");
}

template <class Tag> double PointSet<Tag>::distance(std::size_t i, std::size_t j) const {
    const auto& a = points_[i];
    const auto& b = points_[j];
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

template <class Tag> double PointSet<Tag>::norm(std::size_t i) const {
    double s = 0.0;
    for (double c : points_[i])
        s += c * c;
    return std::sqrt(s);
}

template class PointSet<state_tag>;
template class PointSet<action_tag>;

StateSpace integer_line(std::size_t n) {
    std::vector<numvec> pts;
    pts.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        pts.push_back({static_cast<double>(k)});
    return StateSpace(std::move(pts));
}

DiscreteDistribution::DiscreteDistribution(numvec weights) : weights_(std::move(weights)) {
    if (weights_.empty())
        throw Error(Errc::distribution_sum, "distribution has no weights");
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        double& w = weights_[i];
        if (!std::isfinite(w))
            throw Error(Errc::negative_weight, "weight " + std::to_string(i) + " is not finite");
        if (w < -negative_tolerance)
            throw Error(Errc::negative_weight,
                        "weight " + std::to_string(i) + " is negative: " + std::to_string(w));
        if (w < 0.0)
            w = 0.0;
    }
    const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::abs(total - 1.0) > input_tolerance)
        throw Error(Errc::distribution_sum,
                    "weights sum to " + std::to_string(total) + ", expected 1");
    // Deviations at rounding level are kept, so normalizing twice changes nothing.
    const double rounding = 4.0 * static_cast<double>(weights_.size()) * std::numeric_limits<double>::epsilon();
    if (std::abs(total - 1.0) > rounding)
        for (double& w : weights_)
            w /= total;
}

DiscreteDistribution DiscreteDistribution::point_mass(std::size_t size, std::size_t at) {
    numvec w(size, 0.0);
    w.at(at) = 1.0;
    return DiscreteDistribution(std::move(w));
}

double DiscreteDistribution::expectation(std::span<const double> values) const {
    if (values.size() != weights_.size())
        throw Error(Errc::dimension_mismatch, "expectation: value vector has size " +
                                                  std::to_string(values.size()) + ", expected " +
                                                  std::to_string(weights_.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        s += weights_[i] * values[i];
    return s;
}

} // namespace drmdp
