#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace drmdp {

struct ExperimentRow {
    double epsilon = 0.0;
    std::size_t x0 = 0;
    double v_true = 0.0;
    double v_robust = 0.0;
    double diff = 0.0;  ///< v_true - v_robust
    double bound = 0.0;
    double ratio = 0.0; ///< diff / bound, 0 when bound == 0
};

struct CoinTossOptions {
    double alpha = 0.45;
    std::vector<double> epsilons = default_epsilon_grid();
    int q = 1;
    double tol = 1e-9;
    bool all_states = false;

    /// 0, 0.05, ..., 0.5
    static std::vector<double> default_epsilon_grid();
};

/// Nominal and robust fixed points of the coin toss for every epsilon, with
/// the certified bound. One row per initial state 0..5 (0..10 with
/// all_states), sorted by (epsilon, x0). Throws Error(non_convergence) if a value
/// iteration fails to converge.
std::vector<ExperimentRow> run_cointoss_experiment(const CoinTossOptions& options);

/// Decimal rendering with `digits` significant digits and no exponent.
std::string format_decimal(double value, int digits = 12);

inline constexpr const char* csv_header = "epsilon,x0,v_true,v_robust,diff,bound,ratio";

void write_csv(const std::vector<ExperimentRow>& rows, std::ostream& out);
/// Throws Error(io_error) naming the path when the file cannot be written.
void emit_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path);

} // namespace drmdp
