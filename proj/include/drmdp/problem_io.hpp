#pragma once

#include "drmdp/problem.hpp"

#include <filesystem>
#include <string>

#include <json.hpp>

namespace drmdp {

/// Problem file schema (one JSON document):
///
///   states      [[x_1..x_d], ...]
///   actions     [[a_1..a_m], ...]
///   alpha       number
///   ambiguity   {"q": integer, "epsilon": number}
///   center      [state][action] -> weight array over states
///   true_kernel optional, same shape as center
///   reward      [state][action][next_state] -> number
ProblemSpec parse_problem(const nlohmann::json& doc);
ProblemSpec parse_problem(const std::string& text);
ProblemSpec load_problem(const std::filesystem::path& path);

nlohmann::json problem_to_json(const ProblemSpec& problem);
void write_problem(const ProblemSpec& problem, const std::filesystem::path& path);

} // namespace drmdp
