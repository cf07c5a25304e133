#include "symbsel/instances.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "symbsel/rng.hpp"

namespace symbsel {

const char* to_string(Family family) {
  return family == Family::Setcover ? "setcover" : "facilities";
}

Family family_from_string(const std::string& s) {
  if (s == "setcover") return Family::Setcover;
  if (s == "facilities") return Family::Facilities;
  throw MilpError("unknown instance family: " + s);
}

void GenConfig::validate() const {
  if (family == Family::Setcover) {
    if (rows < 2 || cols < 2) {
      throw InfeasibleConfig("setcover needs at least 2 rows and 2 columns");
    }
    if (!(density > 0.0 && density <= 1.0)) {
      throw InfeasibleConfig("density must lie in (0, 1]");
    }
    if (density * cols < 1.0) {
      throw InfeasibleConfig("density leaves rows uncoverable");
    }
    if (cost_lo < 0 || cost_hi < cost_lo) {
      throw InfeasibleConfig("cost range is empty");
    }
  } else {
    if (customers < 1 || facilities < 1) {
      throw InfeasibleConfig("facilities needs at least 1 of each side");
    }
    if (capacity_ratio < 1.2) {
      throw InfeasibleConfig("capacity ratio below the 1.2 headroom");
    }
  }
}

MilpInstance gen_setcover(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 0x5C));
  MilpInstance inst;
  inst.name = cfg.name.empty() ? "setcover" : cfg.name;
  inst.n = cfg.cols;
  inst.p = cfg.cols;
  inst.lo.assign(static_cast<size_t>(cfg.cols), 0.0);
  inst.hi.assign(static_cast<size_t>(cfg.cols), 1.0);
  for (int j = 0; j < cfg.cols; ++j) {
    inst.c.push_back(
        static_cast<double>(rng.uniform_int(cfg.cost_lo, cfg.cost_hi)));
  }

  std::vector<std::set<int>> row_cols(static_cast<size_t>(cfg.rows));
  std::vector<int> col_uses(static_cast<size_t>(cfg.cols), 0);
  for (int r = 0; r < cfg.rows; ++r) {
    for (int j = 0; j < cfg.cols; ++j) {
      if (rng.bernoulli(cfg.density)) {
        row_cols[static_cast<size_t>(r)].insert(j);
        ++col_uses[static_cast<size_t>(j)];
      }
    }
    // no forced columns: every element stays coverable two ways
    while (row_cols[static_cast<size_t>(r)].size() < 2) {
      const int j = rng.uniform_int(0, cfg.cols - 1);
      if (row_cols[static_cast<size_t>(r)].insert(j).second) {
        ++col_uses[static_cast<size_t>(j)];
      }
    }
  }
  // no useless columns either: attach unused ones somewhere
  for (int j = 0; j < cfg.cols; ++j) {
    if (col_uses[static_cast<size_t>(j)] == 0) {
      const int r = rng.uniform_int(0, cfg.rows - 1);
      row_cols[static_cast<size_t>(r)].insert(j);
    }
  }

  for (int r = 0; r < cfg.rows; ++r) {
    SparseRow row;
    for (const int j : row_cols[static_cast<size_t>(r)]) {
      row.coeffs.emplace_back(j, -1.0);
    }
    row.rhs = -1.0;
    inst.rows.push_back(std::move(row));
  }
  inst.validate();
  return inst;
}

MilpInstance gen_facilities(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 0xFA));
  const int M = cfg.customers;
  const int F = cfg.facilities;

  std::vector<double> demand(static_cast<size_t>(M));
  for (auto& d : demand) d = static_cast<double>(rng.uniform_int(5, 35));
  std::vector<double> capacity(static_cast<size_t>(F));
  for (auto& s : capacity) s = static_cast<double>(rng.uniform_int(10, 160));

  double total_demand = 0.0;
  for (const double d : demand) total_demand += d;
  double total_capacity = 0.0;
  for (const double s : capacity) total_capacity += s;
  const double want = cfg.capacity_ratio * total_demand;
  if (total_capacity < want) {
    const double scale = want / total_capacity;
    for (auto& s : capacity) s = std::ceil(s * scale);
  }

  std::vector<double> open_cost(static_cast<size_t>(F));
  for (int j = 0; j < F; ++j) {
    open_cost[static_cast<size_t>(j)] =
        std::round(rng.uniform(0.0, 90.0) *
                       std::sqrt(capacity[static_cast<size_t>(j)]) +
                   rng.uniform(100.0, 110.0));
  }
  std::vector<double> cx(static_cast<size_t>(M)), cy(static_cast<size_t>(M));
  std::vector<double> fx(static_cast<size_t>(F)), fy(static_cast<size_t>(F));
  for (int i = 0; i < M; ++i) {
    cx[static_cast<size_t>(i)] = rng.u01();
    cy[static_cast<size_t>(i)] = rng.u01();
  }
  for (int j = 0; j < F; ++j) {
    fx[static_cast<size_t>(j)] = rng.u01();
    fy[static_cast<size_t>(j)] = rng.u01();
  }

  MilpInstance inst;
  inst.name = cfg.name.empty() ? "facilities" : cfg.name;
  inst.n = F + M * F;
  inst.p = F;  // open decisions first, then fractional assignments
  inst.lo.assign(static_cast<size_t>(inst.n), 0.0);
  inst.hi.assign(static_cast<size_t>(inst.n), 1.0);
  inst.c.assign(static_cast<size_t>(inst.n), 0.0);
  for (int j = 0; j < F; ++j) {
    inst.c[static_cast<size_t>(j)] = open_cost[static_cast<size_t>(j)];
  }
  auto zvar = [&](int i, int j) { return F + i * F + j; };
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < F; ++j) {
      const double dx = cx[static_cast<size_t>(i)] - fx[static_cast<size_t>(j)];
      const double dy = cy[static_cast<size_t>(i)] - fy[static_cast<size_t>(j)];
      inst.c[static_cast<size_t>(zvar(i, j))] =
          std::round(10.0 * demand[static_cast<size_t>(i)] *
                     std::sqrt(dx * dx + dy * dy));
    }
  }

  // demand rows (== as a <= pair), capacity rows, linking rows
  for (int i = 0; i < M; ++i) {
    SparseRow le, ge;
    for (int j = 0; j < F; ++j) {
      le.coeffs.emplace_back(zvar(i, j), 1.0);
      ge.coeffs.emplace_back(zvar(i, j), -1.0);
    }
    le.rhs = 1.0;
    ge.rhs = -1.0;
    inst.rows.push_back(std::move(le));
    inst.rows.push_back(std::move(ge));
  }
  for (int j = 0; j < F; ++j) {
    SparseRow cap;
    for (int i = 0; i < M; ++i) {
      cap.coeffs.emplace_back(zvar(i, j), demand[static_cast<size_t>(i)]);
    }
    cap.coeffs.emplace_back(j, -capacity[static_cast<size_t>(j)]);
    cap.rhs = 0.0;
    inst.rows.push_back(std::move(cap));
  }
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < F; ++j) {
      SparseRow link;
      link.coeffs.emplace_back(zvar(i, j), 1.0);
      link.coeffs.emplace_back(j, -1.0);
      link.rhs = 0.0;
      inst.rows.push_back(std::move(link));
    }
  }
  inst.validate();
  return inst;
}

MilpInstance generate(const GenConfig& cfg) {
  return cfg.family == Family::Setcover ? gen_setcover(cfg)
                                        : gen_facilities(cfg);
}

}  // namespace symbsel
