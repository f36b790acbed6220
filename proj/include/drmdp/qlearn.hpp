#pragma once

#include "drmdp/bellman.hpp"
#include "drmdp/problem.hpp"

#include <cstdint>
#include <functional>
#include <string_view>

namespace drmdp {

/// Identifier of the random engine behind robust_q_learning. Uniform draws
/// are taken from its raw 64-bit output (top 53 bits), not from a standard
/// library distribution, so streams match across implementations.
inline constexpr std::string_view rng_algorithm = "mt19937_64";

struct LearningConfig {
    std::size_t episodes = 20000;
    std::size_t steps_per_episode = 10;
    /// Step size as a function of the pair's visit count before the update.
    std::function<double(std::size_t)> learning_rate = [](std::size_t visits) {
        return 1.0 / (1.0 + static_cast<double>(visits));
    };
    double exploration = 0.1;
    std::uint64_t seed = 42;

    std::size_t total_updates() const noexcept { return episodes * steps_per_episode; }
};

/// Tabular robust Q-learning with a model-based robust target.
///
/// Every episode starts in a uniformly drawn state and follows an
/// exploration-greedy behaviour policy; next states are sampled from the
/// problem's nominal kernel. The visited pair moves towards
///   min over the ball around center(x, a) of E[r(x, a, .) + alpha max_a' Q(., a')].
QFunction robust_q_learning(const ProblemSpec& problem, const LearningConfig& config = {});

} // namespace drmdp
