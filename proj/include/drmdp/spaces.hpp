#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace drmdp {

using numvec = std::vector<double>;

/// Finite set of distinct points in R^d, addressed by index.
///
/// The tag only separates state points from action points at the type
/// level; both behave identically.
template <class Tag> class PointSet {
public:
    PointSet() = default;

    /// Throws Error(invalid_space) when the set is empty, the dimensions are
    /// ragged or zero, a coordinate is not finite, or two points coincide.
    explicit PointSet(std::vector<numvec> points);

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dimension() const noexcept {
        return points_.empty() ? 0 : points_.front().size();
    }
    const numvec& operator[](std::size_t i) const { return points_[i]; }
    const std::vector<numvec>& points() const noexcept { return points_; }

    /// Euclidean distance between points i and j.
    double distance(std::size_t i, std::size_t j) const;
    /// Euclidean norm of point i.
    double norm(std::size_t i) const;

    bool operator==(const PointSet&) const = default;

private:
    std::vector<numvec> points_;
};

struct state_tag {};
struct action_tag {};

using StateSpace = PointSet<state_tag>;
using ActionSpace = PointSet<action_tag>;

/// The points 0, 1, ..., n on the real line.
StateSpace integer_line(std::size_t n);

/// Probability weights indexed by state.
///
/// Construction validates and renormalizes: weights below -1e-12 are
/// rejected, tiny negatives are clamped to zero, and the total must lie
/// within 1e-9 of one before it is rescaled to exactly sum to one (up to
/// round-off, which stays below 1e-12).
class DiscreteDistribution {
public:
    static constexpr double input_tolerance = 1e-9;
    static constexpr double negative_tolerance = 1e-12;

    DiscreteDistribution() = default;
    explicit DiscreteDistribution(numvec weights);

    static DiscreteDistribution point_mass(std::size_t size, std::size_t at);

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Sum of weight_i * values_i.
    double expectation(std::span<const double> values) const;

    bool operator==(const DiscreteDistribution&) const = default;

private:
    numvec weights_;
};

} // namespace drmdp
