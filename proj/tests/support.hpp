#pragma once

#include <initializer_list>
#include <vector>

#include "crs/channel.hpp"
#include "crs/rates.hpp"

namespace crs::test {

/// Hand-built realization; user-to-user gains default to zero.
inline ChannelRealization make_channels(std::vector<Eigen::VectorXcd> h, Eigen::MatrixXcd users = {}) {
  ChannelRealization ch;
  const auto k = static_cast<Eigen::Index>(h.size());
  ch.bs_channels = std::move(h);
  ch.user_channels = users.size() ? users : Eigen::MatrixXcd::Zero(k, k);
  ch.bs_variances = Eigen::VectorXd::Ones(k);
  ch.user_variances = Eigen::MatrixXd::Ones(k, k);
  return ch;
}

inline Eigen::VectorXcd vec(std::initializer_list<cd> v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

}  // namespace crs::test
