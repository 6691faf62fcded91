#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "crs/config.hpp"

namespace crs {

using cd = std::complex<double>;

/// One Monte Carlo draw of every link in the network.
struct ChannelRealization {
  std::vector<Eigen::VectorXcd> bs_channels;  // h_k, length num_tx_antennas
  Eigen::MatrixXcd user_channels;             // (receiver k, transmitter j)
  Eigen::VectorXd bs_variances;
  Eigen::MatrixXd user_variances;
  std::uint64_t seed = 0;

  int num_users() const { return static_cast<int>(bs_channels.size()); }
  int num_tx_antennas() const {
    return bs_channels.empty() ? 0 : static_cast<int>(bs_channels.front().size());
  }
  /// FNV-1a over the raw channel coefficients; used to prove paired draws.
  std::uint64_t hash() const;
};

/// Seeded source of circularly-symmetric complex Gaussians.
///
/// Uses std::mt19937_64 (fully specified by the standard) and a local
/// Box-Muller transform, because std::normal_distribution is
/// implementation-defined and would break cross-platform reproducibility.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1), 53 bits.
  double uniform();
  /// Standard real normal.
  double normal();
  /// CN(0, variance): real and imaginary parts each N(0, variance / 2).
  cd complex_normal(double variance);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

ChannelRealization generate_channels(const SystemConfig& config, std::uint64_t seed);

inline double channel_strength(const Eigen::VectorXcd& h) { return h.squaredNorm(); }

/// Squared norms of every BS-to-user channel.
std::vector<double> channel_strengths(const ChannelRealization& channels);

}  // namespace crs
