#include "symbsel/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace symbsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VStat : unsigned char { Basic, AtLower, AtUpper };

// Working state for one solve: dense tableau B^-1 [A | I | artificials],
// incrementally pivoted, with variable values maintained alongside.
struct Tableau {
  int m = 0;
  int total = 0;  // structurals + slacks + artificials
  std::vector<double> t;      // m x total
  std::vector<double> d;      // reduced-cost row
  std::vector<double> cost;   // current phase objective
  std::vector<double> value;  // current value per variable
  std::vector<double> lo, hi;
  std::vector<int> basis;     // variable basic in each row
  std::vector<VStat> stat;
  int degenerate_streak = 0;
  bool bland = false;
  int iterations = 0;

  double& at(int r, int j) { return t[static_cast<size_t>(r) * total + j]; }
  double at(int r, int j) const {
    return t[static_cast<size_t>(r) * total + j];
  }

  void refresh_reduced_costs() {
    d = cost;
    for (int r = 0; r < m; ++r) {
      const double cb = cost[static_cast<size_t>(basis[r])];
      if (cb == 0.0) continue;
      const double* row = &t[static_cast<size_t>(r) * total];
      for (int j = 0; j < total; ++j) d[static_cast<size_t>(j)] -= cb * row[j];
    }
    for (int r = 0; r < m; ++r) d[static_cast<size_t>(basis[r])] = 0.0;
  }
};

struct RatioHit {
  double step = kInf;
  int row = -1;        // -1 means the entering variable's own bound flip
  bool to_upper = false;
};

}  // namespace

SimplexSolver::SimplexSolver(const MilpInstance& inst, LpTolerances tol)
    : n_(inst.n), m_(static_cast<int>(inst.rows.size())), tol_(tol) {
  inst.validate();
  dense_.assign(static_cast<size_t>(m_) * n_, 0.0);
  b_.resize(static_cast<size_t>(m_));
  for (int r = 0; r < m_; ++r) {
    b_[static_cast<size_t>(r)] = inst.rows[static_cast<size_t>(r)].rhs;
    for (const auto& [idx, val] : inst.rows[static_cast<size_t>(r)].coeffs) {
      dense_[static_cast<size_t>(r) * n_ + idx] += val;
    }
  }
  c_ = inst.c;
  lo_ = inst.lo;
  hi_ = inst.hi;
}

LpResult SimplexSolver::solve() const { return solve(lo_, hi_); }

LpResult SimplexSolver::solve(std::span<const double> lo,
                              std::span<const double> hi) const {
  if (static_cast<int>(lo.size()) != n_ || static_cast<int>(hi.size()) != n_) {
    throw MilpError("bound overrides have wrong dimension");
  }
  for (int j = 0; j < n_; ++j) {
    if (lo[static_cast<size_t>(j)] > hi[static_cast<size_t>(j)] + 1e-12) {
      return LpResult{LpStatus::Infeasible, 0.0, {}, 0};
    }
    if (std::isinf(lo[static_cast<size_t>(j)]) &&
        std::isinf(hi[static_cast<size_t>(j)])) {
      throw MilpError("free variables are not supported");
    }
  }

  const int n_struct = n_;
  const int n_slack = m_;

  // Start with structurals at their nearest finite bound, slacks basic.
  std::vector<double> start(static_cast<size_t>(n_struct));
  for (int j = 0; j < n_struct; ++j) {
    start[static_cast<size_t>(j)] = std::isfinite(lo[static_cast<size_t>(j)])
                                        ? lo[static_cast<size_t>(j)]
                                        : hi[static_cast<size_t>(j)];
  }
  std::vector<double> slack(static_cast<size_t>(m_));
  std::vector<char> violated(static_cast<size_t>(m_), 0);
  int n_art = 0;
  for (int r = 0; r < m_; ++r) {
    double ax = 0.0;
    const double* row = &dense_[static_cast<size_t>(r) * n_];
    for (int j = 0; j < n_struct; ++j) {
      ax += row[j] * start[static_cast<size_t>(j)];
    }
    slack[static_cast<size_t>(r)] = b_[static_cast<size_t>(r)] - ax;
    if (slack[static_cast<size_t>(r)] < -tol_.feasibility) {
      violated[static_cast<size_t>(r)] = 1;
      ++n_art;
    }
  }

  Tableau tb;
  tb.m = m_;
  tb.total = n_struct + n_slack + n_art;
  tb.t.assign(static_cast<size_t>(m_) * tb.total, 0.0);
  tb.lo.assign(static_cast<size_t>(tb.total), 0.0);
  tb.hi.assign(static_cast<size_t>(tb.total), kInf);
  tb.value.assign(static_cast<size_t>(tb.total), 0.0);
  tb.stat.assign(static_cast<size_t>(tb.total), VStat::AtLower);
  tb.basis.resize(static_cast<size_t>(m_));

  for (int j = 0; j < n_struct; ++j) {
    tb.lo[static_cast<size_t>(j)] = lo[static_cast<size_t>(j)];
    tb.hi[static_cast<size_t>(j)] = hi[static_cast<size_t>(j)];
    tb.value[static_cast<size_t>(j)] = start[static_cast<size_t>(j)];
    tb.stat[static_cast<size_t>(j)] =
        std::isfinite(lo[static_cast<size_t>(j)]) ? VStat::AtLower
                                                  : VStat::AtUpper;
  }

  // Rows start as [A | I]; violated rows are negated and get an artificial
  // basic variable so every basic value is within its bounds.
  int art = n_struct + n_slack;
  for (int r = 0; r < m_; ++r) {
    const double sign = violated[static_cast<size_t>(r)] ? -1.0 : 1.0;
    const double* row = &dense_[static_cast<size_t>(r) * n_];
    for (int j = 0; j < n_struct; ++j) tb.at(r, j) = sign * row[j];
    tb.at(r, n_struct + r) = sign;
    if (violated[static_cast<size_t>(r)]) {
      tb.at(r, art) = 1.0;
      tb.basis[static_cast<size_t>(r)] = art;
      tb.stat[static_cast<size_t>(art)] = VStat::Basic;
      tb.value[static_cast<size_t>(art)] = -slack[static_cast<size_t>(r)];
      tb.stat[static_cast<size_t>(n_struct + r)] = VStat::AtLower;
      tb.value[static_cast<size_t>(n_struct + r)] = 0.0;
      ++art;
    } else {
      tb.basis[static_cast<size_t>(r)] = n_struct + r;
      tb.stat[static_cast<size_t>(n_struct + r)] = VStat::Basic;
      tb.value[static_cast<size_t>(n_struct + r)] =
          slack[static_cast<size_t>(r)];
    }
  }

  const int bland_threshold = 2 * (m_ + n_struct);
  const long iteration_cap = 2000L + 200L * (m_ + n_struct);

  auto pivot = [&](int enter, int row) {
    double* prow = &tb.t[static_cast<size_t>(row) * tb.total];
    const double piv = prow[enter];
    const double inv = 1.0 / piv;
    for (int j = 0; j < tb.total; ++j) prow[j] *= inv;
    prow[enter] = 1.0;
    for (int r = 0; r < tb.m; ++r) {
      if (r == row) continue;
      double* orow = &tb.t[static_cast<size_t>(r) * tb.total];
      const double f = orow[enter];
      if (f == 0.0) continue;
      for (int j = 0; j < tb.total; ++j) orow[j] -= f * prow[j];
      orow[enter] = 0.0;
    }
    const double fd = tb.d[static_cast<size_t>(enter)];
    if (fd != 0.0) {
      for (int j = 0; j < tb.total; ++j) {
        tb.d[static_cast<size_t>(j)] -= fd * prow[j];
      }
      tb.d[static_cast<size_t>(enter)] = 0.0;
    }
    tb.basis[static_cast<size_t>(row)] = enter;
  };

  // Runs the current phase to optimality. Returns false on unbounded.
  auto optimize = [&]() -> bool {
    tb.refresh_reduced_costs();
    int since_refresh = 0;
    while (true) {
      if (++tb.iterations > iteration_cap) {
        throw NumericalBreakdown("simplex iteration cap exceeded");
      }
      if (++since_refresh >= 64) {
        tb.refresh_reduced_costs();
        since_refresh = 0;
      }

      int enter = -1;
      double best_score = tol_.reduced_cost;
      int dir = +1;
      for (int j = 0; j < tb.total; ++j) {
        if (tb.stat[static_cast<size_t>(j)] == VStat::Basic) continue;
        if (tb.lo[static_cast<size_t>(j)] == tb.hi[static_cast<size_t>(j)]) {
          continue;  // fixed (includes retired artificials)
        }
        const double dj = tb.d[static_cast<size_t>(j)];
        double score = 0.0;
        int jdir = 0;
        if (tb.stat[static_cast<size_t>(j)] == VStat::AtLower &&
            dj < -tol_.reduced_cost) {
          score = -dj;
          jdir = +1;
        } else if (tb.stat[static_cast<size_t>(j)] == VStat::AtUpper &&
                   dj > tol_.reduced_cost) {
          score = dj;
          jdir = -1;
        } else {
          continue;
        }
        if (tb.bland) {
          enter = j;
          dir = jdir;
          break;  // first eligible index
        }
        if (score > best_score) {
          best_score = score;
          enter = j;
          dir = jdir;
        }
      }
      if (enter < 0) return true;  // phase optimal

      // Ratio test: entering moves by step >= 0 in direction dir.
      RatioHit hit;
      const double travel = tb.hi[static_cast<size_t>(enter)] -
                            tb.lo[static_cast<size_t>(enter)];
      if (std::isfinite(travel)) hit = RatioHit{travel, -1, false};

      double best_pivot_mag = 0.0;
      for (int r = 0; r < tb.m; ++r) {
        const double y = tb.at(r, enter);
        if (std::abs(y) <= tol_.pivot) continue;
        const int bv = tb.basis[static_cast<size_t>(r)];
        const double rate = -static_cast<double>(dir) * y;
        double room = kInf;
        bool to_upper = false;
        if (rate > 0.0) {
          if (std::isfinite(tb.hi[static_cast<size_t>(bv)])) {
            room = (tb.hi[static_cast<size_t>(bv)] -
                    tb.value[static_cast<size_t>(bv)]) /
                   rate;
            to_upper = true;
          }
        } else {
          if (std::isfinite(tb.lo[static_cast<size_t>(bv)])) {
            room = (tb.value[static_cast<size_t>(bv)] -
                    tb.lo[static_cast<size_t>(bv)]) /
                   (-rate);
          }
        }
        if (!std::isfinite(room)) continue;
        room = std::max(room, 0.0);
        const bool closer = room < hit.step - 1e-12;
        const bool tied = std::abs(room - hit.step) <= 1e-12 && hit.row >= 0;
        bool take = closer;
        if (tied) {
          if (tb.bland) {
            take = bv < tb.basis[static_cast<size_t>(hit.row)];
          } else {
            take = std::abs(y) > best_pivot_mag;
          }
        } else if (closer) {
          take = true;
        }
        if (hit.row < 0 && room < hit.step - 1e-12) take = true;
        if (take) {
          hit.step = std::min(room, hit.step);
          hit.row = r;
          hit.to_upper = to_upper;
          best_pivot_mag = std::abs(y);
        }
      }

      if (!std::isfinite(hit.step)) return false;  // unbounded direction

      if (hit.step <= 1e-12) {
        if (++tb.degenerate_streak > bland_threshold) tb.bland = true;
      } else {
        tb.degenerate_streak = 0;
      }

      // Apply the move to the variable values.
      const double delta = static_cast<double>(dir) * hit.step;
      if (hit.step > 0.0) {
        for (int r = 0; r < tb.m; ++r) {
          const double y = tb.at(r, enter);
          if (y == 0.0) continue;
          const int bv = tb.basis[static_cast<size_t>(r)];
          tb.value[static_cast<size_t>(bv)] -= delta * y;
        }
        tb.value[static_cast<size_t>(enter)] += delta;
      }

      if (hit.row < 0) {
        // bound flip, no basis change
        tb.stat[static_cast<size_t>(enter)] =
            dir > 0 ? VStat::AtUpper : VStat::AtLower;
        tb.value[static_cast<size_t>(enter)] =
            dir > 0 ? tb.hi[static_cast<size_t>(enter)]
                    : tb.lo[static_cast<size_t>(enter)];
        continue;
      }

      const int leave = tb.basis[static_cast<size_t>(hit.row)];
      tb.stat[static_cast<size_t>(leave)] =
          hit.to_upper ? VStat::AtUpper : VStat::AtLower;
      tb.value[static_cast<size_t>(leave)] =
          hit.to_upper ? tb.hi[static_cast<size_t>(leave)]
                       : tb.lo[static_cast<size_t>(leave)];
      tb.stat[static_cast<size_t>(enter)] = VStat::Basic;
      pivot(enter, hit.row);
    }
  };

  // Phase 1: minimize the artificial sum.
  if (n_art > 0) {
    tb.cost.assign(static_cast<size_t>(tb.total), 0.0);
    for (int a = n_struct + n_slack; a < tb.total; ++a) {
      tb.cost[static_cast<size_t>(a)] = 1.0;
    }
    if (!optimize()) {
      throw NumericalBreakdown("phase 1 reported an unbounded direction");
    }
    double infeas = 0.0;
    for (int a = n_struct + n_slack; a < tb.total; ++a) {
      infeas += tb.value[static_cast<size_t>(a)];
    }
    if (infeas > tol_.feasibility * 10.0) {
      return LpResult{LpStatus::Infeasible, 0.0, {}, tb.iterations};
    }
    // Pin artificials at zero; pivot basic ones out where possible.
    for (int a = n_struct + n_slack; a < tb.total; ++a) {
      tb.lo[static_cast<size_t>(a)] = 0.0;
      tb.hi[static_cast<size_t>(a)] = 0.0;
      tb.value[static_cast<size_t>(a)] = 0.0;
    }
    for (int r = 0; r < tb.m; ++r) {
      const int bv = tb.basis[static_cast<size_t>(r)];
      if (bv < n_struct + n_slack) continue;
      int swap_col = -1;
      double best = tol_.pivot;
      for (int j = 0; j < n_struct + n_slack; ++j) {
        if (tb.stat[static_cast<size_t>(j)] == VStat::Basic) continue;
        if (std::abs(tb.at(r, j)) > best) {
          best = std::abs(tb.at(r, j));
          swap_col = j;
        }
      }
      if (swap_col >= 0) {
        tb.stat[static_cast<size_t>(bv)] = VStat::AtLower;
        tb.value[static_cast<size_t>(bv)] = 0.0;
        tb.stat[static_cast<size_t>(swap_col)] = VStat::Basic;
        pivot(swap_col, r);
      }
      // else: the row is redundant and the artificial stays pinned at 0
    }
  }

  // Phase 2: the real objective.
  tb.cost.assign(static_cast<size_t>(tb.total), 0.0);
  for (int j = 0; j < n_struct; ++j) {
    tb.cost[static_cast<size_t>(j)] = c_[static_cast<size_t>(j)];
  }
  tb.degenerate_streak = 0;
  if (!optimize()) {
    return LpResult{LpStatus::Unbounded, 0.0, {}, tb.iterations};
  }

  // Recompute basic values exactly from the original data: solve
  // B x_B = b - N x_N by Gaussian elimination with partial pivoting.
  {
    std::vector<double> rhs(static_cast<size_t>(m_));
    for (int r = 0; r < m_; ++r) {
      double acc = b_[static_cast<size_t>(r)];
      const double* row = &dense_[static_cast<size_t>(r) * n_];
      for (int j = 0; j < n_struct; ++j) {
        if (tb.stat[static_cast<size_t>(j)] != VStat::Basic) {
          acc -= row[j] * tb.value[static_cast<size_t>(j)];
        }
      }
      // nonbasic slacks sit at a bound (0 at lower; upper is infinite)
      if (tb.stat[static_cast<size_t>(n_struct + r)] != VStat::Basic) {
        acc -= tb.value[static_cast<size_t>(n_struct + r)];
      }
      rhs[static_cast<size_t>(r)] = acc;
    }
    std::vector<double> B(static_cast<size_t>(m_) * m_, 0.0);
    for (int col = 0; col < m_; ++col) {
      const int bv = tb.basis[static_cast<size_t>(col)];
      if (bv < n_struct) {
        for (int r = 0; r < m_; ++r) {
          B[static_cast<size_t>(r) * m_ + col] =
              dense_[static_cast<size_t>(r) * n_ + bv];
        }
      } else if (bv < n_struct + n_slack) {
        B[static_cast<size_t>(bv - n_struct) * m_ + col] = 1.0;
      }
      // artificial basic in a redundant row: leave a zero column, patched
      // below with a unit so the system stays solvable (value is 0).
    }
    for (int col = 0; col < m_; ++col) {
      const int bv = tb.basis[static_cast<size_t>(col)];
      if (bv >= n_struct + n_slack) {
        bool all_zero = true;
        for (int r = 0; r < m_; ++r) {
          if (B[static_cast<size_t>(r) * m_ + col] != 0.0) all_zero = false;
        }
        if (all_zero) {
          int free_row = -1;
          for (int r = 0; r < m_; ++r) {
            bool row_zero = true;
            for (int cc = 0; cc < m_; ++cc) {
              if (B[static_cast<size_t>(r) * m_ + cc] != 0.0) row_zero = false;
            }
            if (row_zero) {
              free_row = r;
              break;
            }
          }
          B[static_cast<size_t>(free_row < 0 ? col : free_row) * m_ + col] =
              1.0;
        }
      }
    }
    // in-place LU with partial pivoting
    std::vector<int> perm(static_cast<size_t>(m_));
    for (int i = 0; i < m_; ++i) perm[static_cast<size_t>(i)] = i;
    for (int k = 0; k < m_; ++k) {
      int piv = k;
      double mag = std::abs(B[static_cast<size_t>(k) * m_ + k]);
      for (int r = k + 1; r < m_; ++r) {
        const double v = std::abs(B[static_cast<size_t>(r) * m_ + k]);
        if (v > mag) {
          mag = v;
          piv = r;
        }
      }
      if (mag <= tol_.pivot) {
        throw NumericalBreakdown("singular basis at solution extraction");
      }
      if (piv != k) {
        for (int cc = 0; cc < m_; ++cc) {
          std::swap(B[static_cast<size_t>(k) * m_ + cc],
                    B[static_cast<size_t>(piv) * m_ + cc]);
        }
        std::swap(rhs[static_cast<size_t>(k)], rhs[static_cast<size_t>(piv)]);
      }
      const double inv = 1.0 / B[static_cast<size_t>(k) * m_ + k];
      for (int r = k + 1; r < m_; ++r) {
        const double f = B[static_cast<size_t>(r) * m_ + k] * inv;
        if (f == 0.0) continue;
        B[static_cast<size_t>(r) * m_ + k] = 0.0;
        for (int cc = k + 1; cc < m_; ++cc) {
          B[static_cast<size_t>(r) * m_ + cc] -=
              f * B[static_cast<size_t>(k) * m_ + cc];
        }
        rhs[static_cast<size_t>(r)] -= f * rhs[static_cast<size_t>(k)];
      }
    }
    for (int k = m_ - 1; k >= 0; --k) {
      double acc = rhs[static_cast<size_t>(k)];
      for (int cc = k + 1; cc < m_; ++cc) {
        acc -= B[static_cast<size_t>(k) * m_ + cc] * rhs[static_cast<size_t>(cc)];
      }
      rhs[static_cast<size_t>(k)] = acc / B[static_cast<size_t>(k) * m_ + k];
    }
    for (int col = 0; col < m_; ++col) {
      const int bv = tb.basis[static_cast<size_t>(col)];
      tb.value[static_cast<size_t>(bv)] = rhs[static_cast<size_t>(col)];
    }
  }

  LpResult out;
  out.status = LpStatus::Optimal;
  out.iterations = tb.iterations;
  out.x.resize(static_cast<size_t>(n_struct));
  for (int j = 0; j < n_struct; ++j) {
    double v = tb.value[static_cast<size_t>(j)];
    v = std::clamp(v, lo[static_cast<size_t>(j)], hi[static_cast<size_t>(j)]);
    out.x[static_cast<size_t>(j)] = v;
    out.objective += c_[static_cast<size_t>(j)] * v;
  }

  // Final certificate: every original row satisfied to tolerance.
  for (int r = 0; r < m_; ++r) {
    double ax = 0.0;
    const double* row = &dense_[static_cast<size_t>(r) * n_];
    for (int j = 0; j < n_struct; ++j) {
      ax += row[j] * out.x[static_cast<size_t>(j)];
    }
    const double scale = std::max(1.0, std::abs(b_[static_cast<size_t>(r)]));
    if (ax - b_[static_cast<size_t>(r)] > 100.0 * tol_.feasibility * scale) {
      throw NumericalBreakdown("optimal basis fails row feasibility check");
    }
  }
  return out;
}

}  // namespace symbsel
