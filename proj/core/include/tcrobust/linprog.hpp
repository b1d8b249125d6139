#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace tcr {

enum class RowSense { LessEqual, GreaterEqual, Equal };

/// maximize c.x subject to rows, with x_j >= 0 unless marked free.
struct LinearProgram {
  explicit LinearProgram(std::size_t num_vars)
      : objective(num_vars, 0.0), free(num_vars, false) {}

  struct Row {
    std::vector<double> coef;
    RowSense sense;
    double rhs;
  };

  std::size_t num_vars() const noexcept { return objective.size(); }
  void add_row(std::vector<double> coef, RowSense sense, double rhs);

  std::vector<double> objective;
  std::vector<bool> free;
  std::vector<Row> rows;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

enum class LpArithmetic {
  Double,  // binary64 with pivot tolerance 1e-9
  Exact,   // GMP rationals; the inputs are converted exactly
};

/// Dense two-phase primal simplex (Dantzig pricing, Bland's rule after a run
/// of degenerate pivots).
LpSolution solve_lp(const LinearProgram& lp, LpArithmetic arithmetic = LpArithmetic::Double);

}  // namespace tcr
