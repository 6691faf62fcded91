#include <doctest.h>

#include <atomic>
#include <set>

#include "crs/errors.hpp"
#include "crs/relay.hpp"
#include "support.hpp"

using namespace crs;
using crs::test::make_channels;
using crs::test::vec;

namespace {

ChannelRealization strengths_25_9_4() { return make_channels({vec({5}), vec({3}), vec({2})}); }

}  // namespace

TEST_CASE("centralized picks the strongest users") {
  const auto ch = strengths_25_9_4();
  CHECK(select_centralized(ch, 1).group1 == std::vector<int>{0});
  CHECK(select_centralized(ch, 1).group2 == std::vector<int>{1, 2});
  CHECK(select_centralized(ch, 2).group1 == std::vector<int>{0, 1});
  const auto tie = make_channels({vec({1, 2}), vec({2, 1}), vec({1, 0})});  // strengths 5, 5, 1
  CHECK(select_centralized(tie, 1).group1 == std::vector<int>{0});
  CHECK_THROWS_AS(select_centralized(ch, 3), ConfigError);
  CHECK_THROWS_AS(select_centralized(ch, 0), ConfigError);
}

TEST_CASE("decentralized timers") {
  const auto ch = strengths_25_9_4();
  const auto one = select_decentralized(ch, 1, 100.0);
  CHECK(one.group1 == std::vector<int>{0});
  REQUIRE(one.selection_log.size() == 1);
  CHECK(one.selection_log[0].value == doctest::Approx(4.0));

  const auto two = select_decentralized(ch, 2, 100.0);
  CHECK(two.group1 == std::vector<int>{0, 1});
  REQUIRE(two.selection_log.size() == 2);
  CHECK(two.selection_log[1].user == 1);
  CHECK(two.selection_log[1].value == doctest::Approx(100.0 / 9.0));
  CHECK(fired_timers(two) == std::vector<double>{two.selection_log[0].value, two.selection_log[1].value});
}

TEST_CASE("decentralized ties keep the lower index and say so") {
  const auto ch = make_channels({vec({1}), vec({2}), vec({2})});
  const auto g = select_decentralized(ch, 1, 1.0);
  CHECK(g.group1 == std::vector<int>{1});
  CHECK(g.selection_log[0].note == "tie:2");
}

TEST_CASE("decentralized stalls when nobody can fire") {
  const auto ch = make_channels({vec({1}), vec({0}), vec({0})});
  CHECK_NOTHROW(select_decentralized(ch, 1, 1.0));
  CHECK_THROWS_AS(select_decentralized(ch, 2, 1.0), SelectionStallError);
}

TEST_CASE("decentralized equals centralized on random draws") {
  const auto cfg = SystemConfig::standard(5, 2, 10.0, {1.0, 0.8, 0.6, 0.4, 0.2});
  for (int s = 0; s < 100; ++s) {
    const auto ch = generate_channels(cfg, s);
    for (int n = 1; n < 5; ++n) {
      const auto a = select_centralized(ch, n);
      const auto b = select_decentralized(ch, n, 1.0);
      REQUIRE(a.group1 == b.group1);
      REQUIRE(a.group2 == b.group2);
    }
  }
}

TEST_CASE("optimal enumeration") {
  CHECK(enumerate_relay_sets(2).size() == 2);
  CHECK(enumerate_relay_sets(3).size() == 6);
  CHECK(enumerate_relay_sets(4).size() == 14);
  const auto sets = enumerate_relay_sets(3);
  CHECK(sets.front() == std::vector<int>{0});
  CHECK(sets.back() == std::vector<int>{1, 2});

  const auto ch = strengths_25_9_4();
  std::atomic<int> calls{0};
  // scores favour relay set {1,2}; ties elsewhere
  const auto r = select_optimal(ch, [&](const RelayGrouping& g) {
    ++calls;
    return g.group1 == std::vector<int>{1, 2} ? 2.0 : 1.0;
  });
  CHECK(calls == 6);
  CHECK(r.candidates == 6);
  CHECK(r.grouping.group1 == std::vector<int>{1, 2});
  CHECK(r.rate == 2.0);

  const auto flat = select_optimal(ch, [](const RelayGrouping&) { return 1.0; });
  CHECK(flat.grouping.group1 == std::vector<int>{0});

  const auto big = make_channels(std::vector<Eigen::VectorXcd>(7, vec({1})));
  CHECK_THROWS_AS(select_optimal(big, [](const RelayGrouping&) { return 0.0; }), ConfigError);
}

TEST_CASE("random relay is reproducible and uniform") {
  CHECK(select_random(3, 17).group1 == select_random(3, 17).group1);
  const auto two = select_random(2, 3);
  CHECK(two.group2.size() == 1);
  CHECK(two.group2[0] == 1 - two.group1[0]);
  std::vector<int> hits(3, 0);
  const int n = 10000;
  for (int s = 0; s < n; ++s) ++hits[select_random(3, s).group1[0]];
  for (int h : hits) CHECK(std::abs(h / double(n) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("grouping validation") {
  RelayGrouping g;
  g.group1 = {0};
  g.group2 = {1, 2};
  CHECK_NOTHROW(g.validate(3));
  g.group2 = {1};
  CHECK_THROWS_AS(g.validate(3), ConfigError);
  g.group2 = {0, 1, 2};
  CHECK_THROWS_AS(g.validate(3), ConfigError);
  g.group1 = {};
  g.group2 = {0, 1, 2};
  CHECK_THROWS_AS(g.validate(3), ConfigError);
  CHECK_THROWS_AS(RelayGrouping::from_relays({0, 1, 2}, 3), ConfigError);
}

TEST_CASE("selection log text") {
  const auto g = select_decentralized(strengths_25_9_4(), 2, 100.0);
  CHECK(format_selection_log(g) ==
        "relays 0,1 assisted 2\n"
        "round=0 user=0 value=4\n"
        "round=1 user=1 value=11.1111111111\n");
}

TEST_CASE("signaling overhead") {
  PacketSizes sizes{10, 5, 6, 2, 1.0};
  CHECK(overhead(OverheadScheme::centralized, 3, 1, sizes).signaling_symbols == 31);
  CHECK(overhead(OverheadScheme::none, 3, 1, sizes).signaling_symbols == 25);
  const std::vector<double> timers = {4.0, 11.0};
  const auto d = overhead(OverheadScheme::decentralized, 3, 2, sizes, timers);
  CHECK(d.signaling_symbols == 29);
  CHECK(d.time_units == doctest::Approx(29.0 + 15.0));
  sizes.rts = -1;
  CHECK_THROWS_AS(overhead(OverheadScheme::none, 3, 1, sizes), ConfigError);
  CHECK(parse_overhead_scheme("decentralized") == OverheadScheme::decentralized);
  CHECK_THROWS_AS(parse_overhead_scheme("bogus"), ConfigError);
}
