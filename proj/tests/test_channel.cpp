#include <doctest.h>

#include "crs/channel.hpp"
#include "crs/errors.hpp"
#include "support.hpp"

using namespace crs;
using crs::test::vec;

TEST_CASE("channel shapes and seeded reproducibility") {
  const auto cfg = SystemConfig::standard(3, 2, 10.0, {1.0, 0.3, 0.1});
  const auto a = generate_channels(cfg, 42);
  const auto b = generate_channels(cfg, 42);
  REQUIRE(a.bs_channels.size() == 3);
  for (const auto& h : a.bs_channels) CHECK(h.size() == 2);
  CHECK(a.user_channels.rows() == 3);
  CHECK(a.user_channels.cols() == 3);
  CHECK(a.hash() == b.hash());
  for (int k = 0; k < 3; ++k) CHECK(a.bs_channels[k] == b.bs_channels[k]);
  CHECK(a.user_channels == b.user_channels);
  CHECK(generate_channels(cfg, 43).hash() != a.hash());
}

TEST_CASE("zero variance gives a zero channel") {
  const auto cfg = SystemConfig::standard(3, 4, 10.0, {1.0, 0.0, 0.5});
  const auto ch = generate_channels(cfg, 5);
  CHECK(ch.bs_channels[1].squaredNorm() == 0.0);
  CHECK(ch.bs_channels[0].squaredNorm() > 0.0);
}

TEST_CASE("channel strength") {
  CHECK(channel_strength(vec({{3, 4}})) == 25.0);
  CHECK(channel_strength(Eigen::VectorXcd::Zero(3)) == 0.0);
  CHECK(channel_strength(vec({1, {0, 1}})) == 2.0);
}

TEST_CASE("second moment of channel gains tracks the variance") {
  // E||h_k||^2 / N_t = sigma_k^2 for i.i.d. CN(0, sigma_k^2) entries.
  const std::vector<double> var = {1.0, 0.3, 0.1};
  const auto cfg = SystemConfig::standard(3, 2, 10.0, var);
  std::vector<double> acc(3, 0.0);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const auto ch = generate_channels(cfg, 1000 + d);
    for (int k = 0; k < 3; ++k) acc[k] += ch.bs_channels[k].squaredNorm() / 2.0;
  }
  for (int k = 0; k < 3; ++k) CHECK(acc[k] / draws == doctest::Approx(var[k]).epsilon(0.05));
}

TEST_CASE("complex normal splits variance evenly between real and imaginary parts") {
  GaussianSource rng(9);
  double re = 0.0, im = 0.0, cross = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const cd z = rng.complex_normal(2.0);
    re += z.real() * z.real();
    im += z.imag() * z.imag();
    cross += z.real() * z.imag();
  }
  CHECK(re / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(im / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(cross / n) < 0.02);
}

TEST_CASE("uniform stays inside the open unit interval") {
  GaussianSource rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("configuration validation") {
  auto cfg = SystemConfig::standard(3, 2, 10.0, {1.0, 0.3, 0.1});
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.num_users = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.bs_power = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.num_relays = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.sca_tolerance = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.relay_powers[1] = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(db_to_linear(20.0) == doctest::Approx(100.0));
}
