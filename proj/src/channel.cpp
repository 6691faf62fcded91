#include "crs/channel.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include "crs/errors.hpp"

namespace crs {

double GaussianSource::uniform() {
  // 53 high bits, shifted off zero so log() below stays finite.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double GaussianSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phase);
  has_spare_ = true;
  return r * std::cos(phase);
}

cd GaussianSource::complex_normal(double variance) {
  const double scale = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {scale * re, scale * im};
}

ChannelRealization generate_channels(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  const int k_users = config.num_users;
  const int nt = config.num_tx_antennas;

  ChannelRealization out;
  out.seed = seed;
  out.bs_variances = Eigen::Map<const Eigen::VectorXd>(config.bs_variances.data(), k_users);
  out.user_variances = config.user_variances;
  out.user_channels = Eigen::MatrixXcd::Zero(k_users, k_users);

  // Draw order is part of the reproducibility contract: BS links user by user,
  // then the user-to-user matrix row-major, skipping the diagonal.
  GaussianSource rng(seed);
  out.bs_channels.reserve(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    Eigen::VectorXcd h(nt);
    for (int a = 0; a < nt; ++a) h(a) = rng.complex_normal(out.bs_variances(k));
    out.bs_channels.push_back(std::move(h));
  }
  for (int k = 0; k < k_users; ++k)
    for (int j = 0; j < k_users; ++j)
      if (j != k) out.user_channels(k, j) = rng.complex_normal(out.user_variances(k, j));
  return out;
}

std::vector<double> channel_strengths(const ChannelRealization& channels) {
  std::vector<double> s;
  s.reserve(channels.bs_channels.size());
  for (const auto& h : channels.bs_channels) s.push_back(channel_strength(h));
  return s;
}

namespace {

void fnv_mix(std::uint64_t& state, double value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof bits);
  for (int i = 0; i < 8; ++i) {
    state ^= (bits >> (8 * i)) & 0xffU;
    state *= 0x100000001b3ULL;
  }
}

}  // namespace

std::uint64_t ChannelRealization::hash() const {
  std::uint64_t state = 0xcbf29ce484222325ULL;
  for (const auto& h : bs_channels)
    for (Eigen::Index a = 0; a < h.size(); ++a) {
      fnv_mix(state, h(a).real());
      fnv_mix(state, h(a).imag());
    }
  for (Eigen::Index k = 0; k < user_channels.rows(); ++k)
    for (Eigen::Index j = 0; j < user_channels.cols(); ++j) {
      fnv_mix(state, user_channels(k, j).real());
      fnv_mix(state, user_channels(k, j).imag());
    }
  return state;
}

}  // namespace crs
