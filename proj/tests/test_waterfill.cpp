#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "leoisl/bandwidth.hpp"
#include "leoisl/waterfill.hpp"
#include "oracles.hpp"

using namespace leoisl;

namespace {

Path one_hop(double km, double rate) {
  Path p;
  p.nodes = {0, 1};
  p.hop_count = 1;
  p.total_distance_km = km;
  p.total_propagation_delay_s = propagation_delay_s(km);
  p.bottleneck_capacity_bps = rate;
  p.hop_capacities_bps = {rate};
  return p;
}

ShareDemand demand(double bits, double prop, double feeder_km, double cap) {
  ShareDemand d;
  d.bits = bits;
  d.prop_s = prop;
  d.feeder = ShannonChannel(LinkBudgetParams::defaults(LinkClass::ground_to_sat), feeder_km);
  d.rate_cap_bps = cap;
  d.serial_inverse_rate = 1.0 / cap;
  return d;
}

}  // namespace

TEST_SUITE("waterfill") {

TEST_CASE("stream delay") {
  const auto hop = one_hop(2306.0, 1e10);
  CHECK(stream_delay(hop, 0.0) == hop.total_propagation_delay_s);
  CHECK(stream_delay(hop, 108000.0) == doctest::Approx(7.693e-3 + 1.08e-5).epsilon(1e-4));
  CHECK(stream_delay(hop, 108000.0) == doctest::Approx(7.704e-3).epsilon(1e-4));

  Path two = hop;
  two.nodes = {0, 1, 2};
  two.hop_count = 2;
  two.total_distance_km += 1500.0;
  two.total_propagation_delay_s += propagation_delay_s(1500.0);
  two.hop_capacities_bps.push_back(8e8);
  two.bottleneck_capacity_bps = 8e8;
  for (auto m : {DelayModel::cut_through, DelayModel::store_and_forward}) {
    CHECK(stream_delay(two, 1e6, m) >= stream_delay(hop, 1e6, m));
    CHECK(stream_delay(two, 1e6, m) >= stream_delay(one_hop(1500.0, 8e8), 1e6, m));
  }
  CHECK(stream_delay(two, 1e6, DelayModel::cut_through) ==
        doctest::Approx(two.total_propagation_delay_s + 1e6 / 8e8));
  CHECK(stream_delay(two, 1e6, DelayModel::store_and_forward) ==
        doctest::Approx(two.total_propagation_delay_s + 1e6 / 8e8 + 1e6 / 1e10));

  auto dead = hop;
  dead.hop_capacities_bps = {0.0};
  dead.bottleneck_capacity_bps = 0.0;
  CHECK(std::isinf(stream_delay(dead, 10.0)));
  CHECK_THROWS(stream_delay(hop, -1.0));
}

TEST_CASE("ratio examples") {
  const double bits = 1.08e6, r = 1e8;
  const std::vector<RatioSource> one{{0.004, r}};
  const auto s1 = optimal_ratio_delay(one, bits);
  CHECK(s1.delay_s == doctest::Approx(0.004 + bits / r));
  CHECK(s1.ratios == std::vector<double>{1.0});

  const std::vector<RatioSource> two{{0.0, 2 * r}, {0.0, r}};
  const auto s2 = optimal_ratio_delay(two, bits);
  CHECK(s2.delay_s == doctest::Approx(bits / (3 * r)));
  CHECK(s2.ratios[0] == doctest::Approx(2.0 / 3.0));
  CHECK(s2.ratios[1] == doctest::Approx(1.0 / 3.0));

  const std::vector<RatioSource> far{{0.0, r}, {10.0, r}};
  const auto s3 = optimal_ratio_delay(far, 1000.0);
  CHECK(s3.ratios[0] == 1.0);
  CHECK(s3.ratios[1] == 0.0);

  const std::vector<RatioSource> none{{0.1, 0.0}};
  CHECK(std::isinf(optimal_ratio_delay(none, bits).delay_s));
  CHECK(std::isinf(optimal_ratio_delay({}, bits).delay_s));
}

TEST_CASE("ratio properties against the bisection oracle") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> prop(0.0, 0.05), lr(6.0, 10.0), lb(3.0, 6.5), u01(0.0, 1.0);
  for (int inst = 0; inst < 400; ++inst) {
    std::vector<RatioSource> src(static_cast<std::size_t>(count(rng)));
    for (auto& s : src) s = {prop(rng), u01(rng) < 0.1 ? 0.0 : std::pow(10.0, lr(rng))};
    const double bits = std::pow(10.0, lb(rng));
    const auto sol = optimal_ratio_delay(src, bits);
    const double want = oracle::bisection_delay(src, bits);
    const auto wl = water_level(src, bits);
    if (!std::isfinite(want)) {
      CHECK(std::isinf(sol.delay_s));
      continue;
    }
    CHECK(std::abs(sol.delay_s - want) <= 1e-9);
    CHECK(wl.delay_s == sol.delay_s);
    const double total = std::accumulate(sol.ratios.begin(), sol.ratios.end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-12);
    double active_rate = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      CHECK(sol.ratios[i] >= 0.0);
      CHECK(sol.ratios[i] <= 1.0);
      if (sol.ratios[i] > 0.0) {
        CHECK(std::abs(src[i].prop_s + sol.ratios[i] * bits / src[i].rate_bps - sol.delay_s) <= 1e-9);
        active_rate += src[i].rate_bps;
      }
    }
    CHECK(wl.active_rate_bps == doctest::Approx(active_rate));
  }
}

TEST_CASE("chain rate") {
  const std::vector<double> rates{1e9, 2e9, 5e8};
  CHECK(chain_rate(rates, DelayModel::cut_through) == 5e8);
  CHECK(chain_rate(rates, DelayModel::store_and_forward) == doctest::Approx(1.0 / (1e-9 + 0.5e-9 + 2e-9)));
  CHECK(delay_model_from_string(to_string(DelayModel::store_and_forward)) == DelayModel::store_and_forward);
  CHECK_THROWS(delay_model_from_string("teleport"));
}

}

TEST_SUITE("bandwidth") {

TEST_CASE("single demand takes the whole band") {
  for (auto m : {DelayModel::cut_through, DelayModel::store_and_forward}) {
    const std::vector<ShareDemand> one{demand(1e6, 0.01, 1500.0, 1e10)};
    const auto s = allocate_shares(one, m);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("identical demands split evenly") {
  for (auto m : {DelayModel::cut_through, DelayModel::store_and_forward}) {
    const std::vector<ShareDemand> two{demand(1e6, 0.01, 1500.0, 1e10), demand(1e6, 0.01, 1500.0, 1e10)};
    const auto s = allocate_shares(two, m);
    CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("larger file gets more band and beats the equal split") {
  for (auto m : {DelayModel::cut_through, DelayModel::store_and_forward}) {
    const std::vector<ShareDemand> d{demand(100 * 1080.0, 0.01, 1500.0, 1e10),
                                     demand(1000 * 1080.0, 0.01, 1500.0, 1e10)};
    const auto s = allocate_shares(d, m);
    CHECK(s[1] > s[0]);
    const double opt = demand_delay(d[0], s[0], m) + demand_delay(d[1], s[1], m);
    const double eq = demand_delay(d[0], 0.5, m) + demand_delay(d[1], 0.5, m);
    CHECK(opt < eq);
    const auto grid = oracle::grid_search_shares(d, m);
    CHECK(opt <= grid.total_delay + 1e-6);
  }
}

TEST_CASE("saturated streams leave the rest of the band unused but assigned") {
  // Both streams are capped well below the feeder rate, so neither needs the full band.
  const std::vector<ShareDemand> d{demand(1e6, 0.01, 1500.0, 1e8), demand(2e6, 0.01, 1500.0, 1e8)};
  const auto s = allocate_shares(d, DelayModel::cut_through);
  CHECK(s[0] + s[1] <= 1.0 + 1e-12);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(share_rate(d[i], s[i], DelayModel::cut_through) == doctest::Approx(1e8));
  }
}

TEST_CASE("marginal gain is the negative derivative of the delay") {
  auto d = demand(5e6, 0.02, 2000.0, 1e10);
  d.fixed_sources = {{0.015, 2e8}};
  for (auto m : {DelayModel::cut_through, DelayModel::store_and_forward}) {
    for (double s : {0.05, 0.2, 0.6}) {
      const double h = 1e-7;
      const double numeric = (demand_delay(d, s, m) - demand_delay(d, s + h, m)) / h;
      CHECK(marginal_gain(d, s, m) == doctest::Approx(numeric).epsilon(1e-4));
    }
  }
}

TEST_CASE("random instances against the grid oracle") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> packets(10.0, 3000.0), km(600.0, 2500.0), prop(0.003, 0.03),
      lcap(8.0, 10.0), u01(0.0, 1.0);
  for (int inst = 0; inst < 60; ++inst) {
    std::vector<ShareDemand> d;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      auto x = demand(std::floor(packets(rng)) * 1080.0, prop(rng), km(rng), std::pow(10.0, lcap(rng)));
      if (u01(rng) < 0.3) x.fixed_sources.push_back({prop(rng), std::pow(10.0, lcap(rng))});
      d.push_back(x);
    }
    const auto m = u01(rng) < 0.5 ? DelayModel::cut_through : DelayModel::store_and_forward;
    const auto s = allocate_shares(d, m);
    double total = 0.0, share_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      CHECK(s[static_cast<std::size_t>(i)] >= 0.0);
      total += demand_delay(d[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i)], m);
      share_sum += s[static_cast<std::size_t>(i)];
    }
    CHECK(share_sum <= 1.0 + 1e-12);
    CHECK(total <= oracle::grid_search_shares(d, m).total_delay + 1e-6);
  }
}

}
