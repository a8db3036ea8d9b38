#pragma once

#include "bvflow/scalar.hpp"

#include <string>
#include <vector>

namespace bvflow {

struct CheckRecord {
  std::string name;
  double residual = 0;
  std::string residual_text;  // exact in rational mode
  double tolerance = 0;
  bool pass = false;
  bool truncated = false;
  double wall_time = 0;
};

template <class T> CheckRecord make_check(std::string name, const T& residual, double tolerance, bool truncated = false) {
  CheckRecord c;
  c.name = std::move(name);
  c.residual = Scalar<T>::to_double(residual);
  c.residual_text = Scalar<T>::str(residual);
  c.tolerance = tolerance;
  c.truncated = truncated;
  if constexpr (Scalar<T>::exact) c.pass = tolerance == 0 ? Scalar<T>::is_zero(residual) : c.residual <= tolerance;
  else c.pass = c.residual <= tolerance;
  return c;
}

inline bool all_pass(const std::vector<CheckRecord>& v) {
  for (const auto& c : v)
    if (!c.pass) return false;
  return true;
}

}  // namespace bvflow
