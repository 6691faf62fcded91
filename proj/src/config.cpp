#include "crs/config.hpp"

#include "crs/errors.hpp"

namespace crs {

void SystemConfig::validate() const {
  if (num_users < 2) throw ConfigError("num_users must be at least 2");
  if (num_tx_antennas < 1) throw ConfigError("num_tx_antennas must be positive");
  if (!(bs_power > 0.0)) throw ConfigError("bs_power must be strictly positive");
  const auto k = static_cast<std::size_t>(num_users);
  if (relay_powers.size() != k) throw ConfigError("relay_powers needs one entry per user");
  for (double p : relay_powers)
    if (!(p > 0.0)) throw ConfigError("relay powers must be strictly positive");
  if (bs_variances.size() != k) throw ConfigError("bs_variances needs one entry per user");
  for (double v : bs_variances)
    if (!(v >= 0.0)) throw ConfigError("bs_variances must be nonnegative");
  if (user_variances.rows() != num_users || user_variances.cols() != num_users)
    throw ConfigError("user_variances must be num_users x num_users");
  if ((user_variances.array() < 0.0).any()) throw ConfigError("user_variances must be nonnegative");
  if (!(sca_tolerance > 0.0)) throw ConfigError("sca_tolerance must be strictly positive");
  if (!(grid_step > 0.0 && grid_step < 1.0)) throw ConfigError("grid_step must lie in (0, 1)");
  if (!(timer_constant > 0.0)) throw ConfigError("timer_constant must be strictly positive");
  if (!(init_power_split >= 0.0 && init_power_split <= 1.0))
    throw ConfigError("init_power_split must lie in [0, 1]");
  if (!(init_theta > 0.0 && init_theta <= 1.0)) throw ConfigError("init_theta must lie in (0, 1]");
  if (num_relays < 1 || num_relays >= num_users)
    throw ConfigError("num_relays must lie in [1, num_users - 1]");
  if (sca_max_iterations < 1) throw ConfigError("sca_max_iterations must be positive");
}

SystemConfig SystemConfig::standard(int num_users, int num_tx_antennas, double snr_db,
                                    std::vector<double> bs_variances) {
  SystemConfig c;
  c.num_users = num_users;
  c.num_tx_antennas = num_tx_antennas;
  c.bs_power = db_to_linear(snr_db);
  c.relay_powers.assign(static_cast<std::size_t>(num_users), c.bs_power);
  c.bs_variances = std::move(bs_variances);
  c.user_variances = Eigen::MatrixXd::Ones(num_users, num_users);
  c.user_variances.diagonal().setZero();
  return c;
}

}  // namespace crs
