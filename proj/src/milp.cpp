#include "symbsel/milp.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace symbsel {

void MilpInstance::validate() const {
  if (n <= 0) throw MilpError(name + ": instance has no variables");
  if (p < 0 || p > n) throw MilpError(name + ": bad integer variable count");
  if (static_cast<int>(c.size()) != n || static_cast<int>(lo.size()) != n ||
      static_cast<int>(hi.size()) != n) {
    throw MilpError(name + ": c/bounds dimensions disagree with n");
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(c[static_cast<size_t>(j)])) {
      throw MilpError(name + ": objective coefficient not finite");
    }
    if (lo[static_cast<size_t>(j)] > hi[static_cast<size_t>(j)]) {
      throw MilpError(name + ": variable bounds cross");
    }
  }
  for (const auto& row : rows) {
    if (!std::isfinite(row.rhs)) {
      throw MilpError(name + ": row rhs not finite");
    }
    for (const auto& [idx, val] : row.coeffs) {
      if (idx < 0 || idx >= n) {
        throw MilpError(name + ": row coefficient index out of range");
      }
      if (!std::isfinite(val)) {
        throw MilpError(name + ": row coefficient not finite");
      }
    }
  }
}

void save_instance(const std::string& path, const MilpInstance& inst) {
  nlohmann::json j;
  j["name"] = inst.name;
  j["n"] = inst.n;
  j["p"] = inst.p;
  j["c"] = inst.c;
  nlohmann::json bounds = nlohmann::json::array();
  for (int v = 0; v < inst.n; ++v) {
    bounds.push_back({inst.lo[static_cast<size_t>(v)],
                      inst.hi[static_cast<size_t>(v)]});
  }
  j["bounds"] = bounds;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : inst.rows) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& [idx, val] : row.coeffs) coeffs.push_back({idx, val});
    rows.push_back({{"coeffs", coeffs}, {"sense", "<="}, {"rhs", row.rhs}});
  }
  j["rows"] = rows;

  std::ofstream f(path);
  if (!f) throw MilpError("cannot open for writing: " + path);
  f << j.dump(1, '\t') << "\n";
  if (!f.good()) throw MilpError("write failed: " + path);
}

MilpInstance load_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MilpError("cannot open instance: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MilpError(path + ": " + e.what());
  }

  MilpInstance inst;
  try {
    inst.name = j.value("name", path);
    inst.n = j.at("n").get<int>();
    inst.p = j.at("p").get<int>();
    inst.c = j.at("c").get<std::vector<double>>();
    for (const auto& b : j.at("bounds")) {
      inst.lo.push_back(b.at(0).get<double>());
      inst.hi.push_back(b.at(1).get<double>());
    }
    for (const auto& r : j.at("rows")) {
      const std::string sense = r.value("sense", "<=");
      SparseRow row;
      row.rhs = r.at("rhs").get<double>();
      for (const auto& cv : r.at("coeffs")) {
        row.coeffs.emplace_back(cv.at(0).get<int>(), cv.at(1).get<double>());
      }
      if (sense == "<=") {
        inst.rows.push_back(std::move(row));
      } else if (sense == ">=") {
        for (auto& [idx, val] : row.coeffs) val = -val;
        row.rhs = -row.rhs;
        inst.rows.push_back(std::move(row));
      } else if (sense == "==") {
        SparseRow flipped = row;
        for (auto& [idx, val] : flipped.coeffs) val = -val;
        flipped.rhs = -flipped.rhs;
        inst.rows.push_back(std::move(row));
        inst.rows.push_back(std::move(flipped));
      } else {
        throw MilpError(path + ": unknown row sense " + sense);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw MilpError(path + ": " + e.what());
  }
  inst.validate();
  return inst;
}

}  // namespace symbsel
