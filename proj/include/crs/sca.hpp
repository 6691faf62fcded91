#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crs/channel.hpp"
#include "crs/conic.hpp"
#include "crs/config.hpp"
#include "crs/grouping.hpp"
#include "crs/rates.hpp"
#include "crs/solution.hpp"

namespace crs {

/// Which variant of the stage-2 problem to solve.
///
/// A fixed time fraction replaces the bilinear rate bound with its exact
/// linear form. Without the common stream the problem reduces to
/// interference-as-noise linear precoding.
struct ScaMode {
  std::optional<double> fixed_theta;
  bool use_common = true;
};

inline constexpr double kThetaMin = 1e-3;
inline constexpr double kRhoFloor = 1e-8;

/// The iterate the subproblem is expanded around.
struct SCAState {
  int iteration = 0;
  PrecoderSet precoders;          // unscaled, power <= P_t
  double theta = 1.0;
  Eigen::VectorXd alpha;          // private rates per unit time (bits)
  Eigen::VectorXd alpha_common;
  Eigen::VectorXd rho;            // private SINRs, floored at kRhoFloor
  Eigen::VectorXd rho_common;
  std::vector<double> split;      // C_k
  double objective = 0.0;
  std::vector<double> history;
};

/// MRT private precoders plus the leading left singular vector of the channel
/// matrix for the common stream, with slacks set to the exact SINRs and rates
/// of that point. `grouping` may be null (no relaying).
SCAState initialize(const ChannelRealization& channels, const RelayGrouping* grouping,
                    const SystemConfig& config, const ScaMode& mode = {});

/// Concave minorant of theta*alpha, tight at (theta_n, alpha_n).
double phi_lower_bound(double theta, double alpha, double theta_n, double alpha_n);

enum class Stream { private_stream, common_stream };

/// Interference + 1 - |h_k^H p|^2 / rho for the private or common stream of
/// user k (<= 0 iff the SINR is at least rho, for rho > 0).
double dc_original_lhs(const ChannelRealization& channels, const PrecoderSet& precoders, double rho,
                       int k, Stream stream);

/// Same with |h_k^H p|^2 / rho replaced by its first-order expansion at
/// (expansion, rho_n). Throws ConfigError for rho_n <= 0.
double dc_linearized_lhs(const ChannelRealization& channels, const PrecoderSet& precoders, double rho,
                         const PrecoderSet& expansion, double rho_n, int k, Stream stream);

/// Convex subproblem around a state together with the handles needed to read
/// its solution back. Channels are scaled by sqrt(P_t) so precoders live in
/// the unit power ball.
struct Subproblem {
  conic::ConicProblem problem;
  conic::BlockId common;
  std::vector<conic::BlockId> privates;
  std::optional<conic::BlockId> theta;
  conic::BlockId t;
  conic::BlockId alpha;
  std::optional<conic::BlockId> alpha_common;
  conic::BlockId rho;
  std::optional<conic::BlockId> rho_common;
  std::optional<conic::BlockId> split;
  double power_scale = 1.0;  // sqrt(P_t)
};

Subproblem assemble_subproblem(const SCAState& state, const ChannelRealization& channels,
                               const RelayGrouping* grouping, const SystemConfig& config,
                               const ScaMode& mode = {});

/// Successive convex approximation until |t_n - t_{n-1}| < tolerance or the
/// iteration cap. Throws SolverError when a subproblem fails twice in a row.
Solution sca_solve(const ChannelRealization& channels, const RelayGrouping* grouping,
                   const SystemConfig& config, const ScaMode& mode = {});

/// Header plus one line per iterate: iteration,objective,theta,power,max_violation.
void write_trace_csv(std::ostream& os, const Solution& solution);

enum class CheckStatus { holds, fails, not_applicable };

const char* to_string(CheckStatus status);

struct Proposition1Report {
  CheckStatus status = CheckStatus::not_applicable;
  double gap = 0.0;  // |R_c1 - R_c2|
  double worst_direct_group1 = 0.0;
  double worst_direct_group2 = 0.0;
  bool equality = false;
  bool grouping_rule = false;
  std::string message;
};

/// At an interior time fraction the two group common rates should meet and
/// the weakest relay should out-decode the weakest assisted user in the
/// direct phase.
Proposition1Report proposition1_check(const RateBreakdown& breakdown, double theta,
                                      const RelayGrouping& grouping, double tol);
Proposition1Report proposition1_check(const Solution& solution, const ChannelRealization& channels,
                                      const RelayGrouping& grouping, std::span<const double> relay_powers,
                                      double bs_power, double tol);

}  // namespace crs
