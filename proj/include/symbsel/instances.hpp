#ifndef SYMBSEL_INSTANCES_HPP_
#define SYMBSEL_INSTANCES_HPP_

#include <cstdint>
#include <string>

#include "symbsel/milp.hpp"

namespace symbsel {

struct InfeasibleConfig : MilpError {
  using MilpError::MilpError;
};

enum class Family { Setcover, Facilities };

const char* to_string(Family family);
Family family_from_string(const std::string& s);

struct GenConfig {
  Family family = Family::Setcover;
  // set covering
  int rows = 100;
  int cols = 200;
  double density = 0.05;
  int cost_lo = 1;
  int cost_hi = 100;
  // capacitated facility location
  int customers = 15;
  int facilities = 8;
  double capacity_ratio = 1.5;  // total capacity over total demand
  std::uint64_t seed = 0;
  std::string name;

  void validate() const;  // throws InfeasibleConfig
};

/// Binary set covering: every element is coverable by at least two columns.
MilpInstance gen_setcover(const GenConfig& cfg);

/// Capacitated facility location: binary open decisions plus fractional
/// assignment variables, with capacity, demand and linking rows.
MilpInstance gen_facilities(const GenConfig& cfg);

MilpInstance generate(const GenConfig& cfg);

}  // namespace symbsel

#endif  // SYMBSEL_INSTANCES_HPP_
