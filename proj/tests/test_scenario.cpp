// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "iscap/errors.hpp"
#include "iscap/scenario.hpp"

using namespace iscap;

TEST_SUITE("scenario") {
  TEST_CASE("same seed and offset give bit-identical scenarios") {
    SystemConfig cfg;
    cfg.rng_seed = 42;
    const Scenario a = generate_scenario(cfg, 0);
    const Scenario b = generate_scenario(cfg, 0);
    CHECK(a.ir_channels == b.ir_channels);
    CHECK(a.er_channels == b.er_channels);
    CHECK(a.theta == b.theta);
    CHECK(a.alpha == b.alpha);
  }

  TEST_CASE("different offsets give different channels") {
    SystemConfig cfg;
    CHECK(generate_scenario(cfg, 0).ir_channels != generate_scenario(cfg, 1).ir_channels);
  }

  TEST_CASE("shapes follow the config and entries have unit variance") {
    SystemConfig cfg;
    cfg.n_tx = 4;
    cfg.n_users = 4;
    double acc = 0.0;
    long count = 0;
    for (std::uint64_t off = 0; off < 10000; ++off) {
      const Scenario s = generate_scenario(cfg, off);
      REQUIRE(s.ir_channels.rows() == 4);
      REQUIRE(s.ir_channels.cols() == 4);
      acc += s.ir_channels.squaredNorm();
      count += s.ir_channels.size();
    }
    CHECK(acc / count == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("ER channels carry the configured gain") {
    SystemConfig cfg;
    cfg.er_channel_gain = 0.5;
    double acc = 0.0;
    long count = 0;
    for (std::uint64_t off = 0; off < 4000; ++off) {
      const Scenario s = generate_scenario(cfg, off);
      acc += s.er_channels.squaredNorm();
      count += s.er_channels.size();
    }
    CHECK(acc / count == doctest::Approx(0.25).epsilon(0.05));
  }

  TEST_CASE("fixed target by default, randomised on request") {
    SystemConfig cfg;
    cfg.target_angle = 0.4;
    CHECK(generate_scenario(cfg, 3).theta == 0.4);
    cfg.randomize_target = true;
    CHECK(generate_scenario(cfg, 3).theta != generate_scenario(cfg, 4).theta);
  }

  TEST_CASE("power from SNR") {
    SystemConfig cfg;
    cfg.snr_db = 0.0;
    CHECK(power_from_snr(cfg) == doctest::Approx(1.0));
    cfg.snr_db = 15.0;
    CHECK(std::abs(power_from_snr(cfg) - 31.6228) < 1e-4);
    cfg.snr_db = 25.0;
    CHECK(std::abs(power_from_snr(cfg) - 316.228) < 1e-3);
    cfg.power_budget = 7.0;
    CHECK(power_from_snr(cfg) == 7.0);
  }

  TEST_CASE("validation rejects broken configs") {
    auto bad = [](auto mutate) {
      SystemConfig cfg;
      mutate(cfg);
      CHECK_THROWS_AS(validate(cfg), ConfigError);
    };
    bad([](SystemConfig& c) { c.n_users = 0; });
    bad([](SystemConfig& c) { c.n_tx = 0; });
    bad([](SystemConfig& c) { c.n_rx = 0; });
    bad([](SystemConfig& c) { c.tradeoff = -0.1; });
    bad([](SystemConfig& c) { c.step_shrink = 1.0; });
    bad([](SystemConfig& c) { c.tol_inner = 0.0; });
    bad([](SystemConfig& c) { c.eh_thresholds[0] = 0.03; });  // beyond M
    bad([](SystemConfig& c) { c.eh_circuits[1].steepness = 0.0; });
    bad([](SystemConfig& c) { c.eh_thresholds.push_back(0.001); });
    SystemConfig ok;
    CHECK_NOTHROW(validate(ok));
  }

  TEST_CASE("no ERs is a valid configuration") {
    SystemConfig cfg;
    cfg.n_ers = 0;
    normalize_er_arrays(cfg);
    CHECK_NOTHROW(validate(cfg));
    CHECK(generate_scenario(cfg, 0).er_channels.cols() == 0);
  }

  TEST_CASE("uniform per-ER arrays follow n_ers") {
    SystemConfig cfg;
    cfg.n_ers = 3;
    normalize_er_arrays(cfg);
    CHECK(cfg.eh_thresholds.size() == 3);
    CHECK(cfg.eh_circuits.size() == 3);
  }
}
