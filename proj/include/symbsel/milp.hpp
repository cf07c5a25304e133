#ifndef SYMBSEL_MILP_HPP_
#define SYMBSEL_MILP_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symbsel {

struct MilpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One <= constraint, sparse over structural variables (0-based indices).
struct SparseRow {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
};

/// min c'x  s.t.  Ax <= b,  lo <= x <= hi,  x_0..x_{p-1} integer.
/// Rows with >= or == sense are normalized to <= at load time.
struct MilpInstance {
  std::string name;
  int n = 0;  // structural variables
  int p = 0;  // leading integer variables
  std::vector<double> c;
  std::vector<double> lo, hi;
  std::vector<SparseRow> rows;

  void validate() const;  // throws MilpError on inconsistency
};

void save_instance(const std::string& path, const MilpInstance& inst);
MilpInstance load_instance(const std::string& path);

}  // namespace symbsel

#endif  // SYMBSEL_MILP_HPP_
