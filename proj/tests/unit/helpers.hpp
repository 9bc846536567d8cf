#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <set>
#include <vector>

#include "apdisc/core.hpp"

namespace testing_util {

inline apdisc::Coloring coloring(std::initializer_list<int> v) {
  Eigen::VectorXi x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (int s : v) x[i++] = s;
  return apdisc::Coloring(x, apdisc::ColoringSource::external);
}

inline apdisc::UniversePtr line(apdisc::Coord n) {
  std::vector<apdisc::Coord> flat;
  for (apdisc::Coord i = 0; i < n; ++i) flat.push_back(i);
  return std::make_shared<const apdisc::Universe>(1, flat);
}

/// Family as a set of sets of point coordinates, for order-free comparison.
inline std::set<std::set<std::vector<apdisc::Coord>>> as_point_sets(const apdisc::SetSystem& s) {
  std::set<std::set<std::vector<apdisc::Coord>>> out;
  for (apdisc::Index t = 0; t < s.size(); ++t) {
    std::set<std::vector<apdisc::Coord>> pts;
    for (auto i : s.set(t)) {
      auto p = s.universe().point(i);
      pts.insert(std::vector<apdisc::Coord>(p.begin(), p.end()));
    }
    out.insert(pts);
  }
  return out;
}

}  // namespace testing_util
