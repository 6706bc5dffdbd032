#pragma once

#include "mpstream/types.hpp"

#include <initializer_list>
#include <vector>

namespace support {

inline mpstream::Vector<double> vec(std::initializer_list<double> v) {
  mpstream::Vector<double> out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline mpstream::Vector<double> vec(const std::vector<double>& v) {
  return Eigen::Map<const mpstream::Vector<double>>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> stdvec(const mpstream::Vector<double>& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace support
