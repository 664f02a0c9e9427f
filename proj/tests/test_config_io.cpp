// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "iscap/config_io.hpp"
#include "iscap/errors.hpp"

using namespace iscap;
using nlohmann::json;

TEST_SUITE("config_io") {
  TEST_CASE("round trip through JSON") {
    SystemConfig cfg;
    cfg.n_tx = 6;
    cfg.snr_db = 17.5;
    cfg.eh_thresholds = {0.001, 0.004};
    cfg.eh_circuits[1].steepness = 200.0;
    cfg.warm_start_duals = false;
    cfg.rng_seed = 1234567890123ULL;
    const SystemConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.n_tx == 6);
    CHECK(back.snr_db == 17.5);
    CHECK(back.eh_thresholds == cfg.eh_thresholds);
    CHECK(back.eh_circuits[1].steepness == 200.0);
    CHECK_FALSE(back.warm_start_duals);
    CHECK(back.rng_seed == cfg.rng_seed);
    CHECK(config_to_json(back) == config_to_json(cfg));
  }

  TEST_CASE("per-ER keys broadcast scalars") {
    const SystemConfig cfg = config_from_json(json{{"n_ers", 3}, {"eh_threshold", 0.002}});
    REQUIRE(cfg.eh_thresholds.size() == 3);
    for (double e : cfg.eh_thresholds) CHECK(e == 0.002);
    CHECK(cfg.eh_circuits.size() == 3);
  }

  TEST_CASE("unknown keys and wrong types are rejected") {
    CHECK_THROWS_AS(config_from_json(json{{"n_txx", 4}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"n_tx", "four"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"randomize_target", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
  }

  TEST_CASE("overrides parse JSON values") {
    SystemConfig cfg;
    apply_override(cfg, "n_users=2");
    apply_override(cfg, "eh_threshold=[0.001,0.002]");
    apply_override(cfg, "randomize_target=true");
    CHECK(cfg.n_users == 2);
    CHECK(cfg.eh_thresholds == std::vector<double>{0.001, 0.002});
    CHECK(cfg.randomize_target);
    CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "tradeoff=-1"), ConfigError);
  }

  TEST_CASE("file loading reports the path") {
    CHECK_THROWS_AS(load_config("/nonexistent/dir/cfg.json"), IoError);
    const std::string path = "config_io_test.json";
    {
      std::ofstream out(path);
      out << "{\"n_tx\": 3, ";
    }
    CHECK_THROWS_AS(load_config(path), ConfigError);
    {
      std::ofstream out(path);
      out << "{\"n_tx\": 3}";
    }
    CHECK(load_config(path).n_tx == 3);
    std::remove(path.c_str());
  }
}
