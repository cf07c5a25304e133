#ifndef SYMBSEL_SIMPLEX_HPP_
#define SYMBSEL_SIMPLEX_HPP_

#include <span>
#include <vector>

#include "symbsel/milp.hpp"

namespace symbsel {

struct NumericalBreakdown : MilpError {
  using MilpError::MilpError;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  std::vector<double> x;  // structural variables only
  int iterations = 0;
};

struct LpTolerances {
  double feasibility = 1e-7;
  double reduced_cost = 1e-9;
  double pivot = 1e-10;
};

/// Bounded-variable primal simplex over a fixed constraint matrix with
/// per-solve bounds, two-phase with artificials for an infeasible start.
/// Dantzig pricing; Bland's rule engages after 2(m+n) degenerate pivots.
/// solve() is const and reentrant, so workers may share one instance.
class SimplexSolver {
 public:
  explicit SimplexSolver(const MilpInstance& inst, LpTolerances tol = {});

  LpResult solve(std::span<const double> lo, std::span<const double> hi) const;
  LpResult solve() const;  // instance bounds

  int rows() const { return m_; }
  int cols() const { return n_; }

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<double> dense_;  // m x n row-major constraint matrix
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<double> lo_, hi_;
  LpTolerances tol_;
};

}  // namespace symbsel

#endif  // SYMBSEL_SIMPLEX_HPP_
