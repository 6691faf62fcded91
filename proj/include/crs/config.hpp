#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace crs {

/// Converts a transmit SNR in dB into linear power (noise variance is 1).
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// System-wide parameters shared by every module.
///
/// Powers are linear and relative to unit noise, so `bs_power` doubles as the
/// transmit SNR. `user_variances(k, j)` is the variance of the scalar channel
/// from user j to user k; the diagonal is ignored.
struct SystemConfig {
  int num_users = 2;
  int num_tx_antennas = 1;
  double bs_power = 1.0;
  std::vector<double> relay_powers;  // one entry per user
  std::vector<double> bs_variances;  // one entry per user
  Eigen::MatrixXd user_variances;    // num_users x num_users

  double sca_tolerance = 1e-3;
  double grid_step = 0.1;
  double timer_constant = 1.0;
  double init_power_split = 0.5;
  double init_theta = 0.8;
  int num_relays = 1;

  int sca_max_iterations = 100;
  int enumeration_guard = 6;  // largest K accepted by exhaustive relay enumeration

  /// Throws ConfigError when any invariant does not hold.
  void validate() const;

  /// Equal BS and relay power, unit user-to-user variances.
  static SystemConfig standard(int num_users, int num_tx_antennas, double snr_db,
                               std::vector<double> bs_variances);
};

}  // namespace crs
