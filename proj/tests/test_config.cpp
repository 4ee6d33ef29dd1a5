#include <doctest.h>

#include <cmath>

#include "slipt/config.hpp"

using namespace slipt;

TEST_SUITE("config") {

TEST_CASE("single-junction defaults") {
  const RunConfig cfg = default_config(1);
  REQUIRE(cfg.receiver.n() == 1);
  CHECK(cfg.receiver.junctions[0].band.lambda_min == doctest::Approx(400e-9));
  CHECK(cfg.receiver.junctions[0].band.lambda_max == doctest::Approx(1000e-9));
  CHECK(cfg.receiver.junctions[0].i_sat1 == doctest::Approx(1e-9));
  CHECK(cfg.receiver.junctions[0].r_sh == doctest::Approx(1e8));
  CHECK(cfg.receiver.junctions[0].r_s == doctest::Approx(100.0));
  CHECK(cfg.receiver.r_l == doctest::Approx(1e4));
  CHECK(cfg.receiver.r_d == doctest::Approx(1e4));
  CHECK(cfg.receiver.c_d == doctest::Approx(2.5e-6));
  CHECK(cfg.receiver.l == doctest::Approx(1e-2));
  CHECK(cfg.receiver.v_t == doctest::Approx(0.025852).epsilon(1e-4));
  CHECK(cfg.receiver.a_p == doctest::Approx(1e-4));
  CHECK(cfg.receiver.r_sigma() == doctest::Approx(10100.0));
  CHECK(cfg.receiver.info_junction == 0);
  CHECK(cfg.model == EhModelKind::closed_form_single);
  CHECK(cfg.info.lambda0 == doctest::Approx(980e-9));
  CHECK(cfg.info.a_sq == doctest::Approx(0.1));
  CHECK(cfg.noise.sigma_sq == doctest::Approx(1e-9));
  // The band extension is a recorded default deviation.
  REQUIRE(!cfg.warnings.empty());
  CHECK(cfg.warnings[0].find("400-1000") != std::string::npos);
}

TEST_CASE("four-junction defaults") {
  const RunConfig cfg = default_config(4);
  REQUIRE(cfg.receiver.n() == 4);
  CHECK(cfg.receiver.junctions[0].band.lambda_max == doctest::Approx(650e-9));
  CHECK(cfg.receiver.junctions[1].band.lambda_max == doctest::Approx(900e-9));
  CHECK(cfg.receiver.junctions[2].band.lambda_max == doctest::Approx(1100e-9));
  CHECK(cfg.receiver.junctions[3].band.lambda_max == doctest::Approx(1800e-9));
  CHECK(cfg.receiver.r_sigma() == doctest::Approx(10400.0));
  // 980 nm falls in junction 3.
  CHECK(cfg.receiver.info_junction == 2);
  CHECK(cfg.model == EhModelKind::closed_form_multi);
  // Auto energy lines sit at the band midpoints with equal power split.
  REQUIRE(cfg.energy.lines.size() == 4);
  CHECK(cfg.energy.lines[0].lambda == doctest::Approx(525e-9));
  CHECK(cfg.energy.lines[3].lambda == doctest::Approx(1450e-9));
  for (const auto& line : cfg.energy.lines) CHECK(line.power == 0.0);
}

TEST_CASE("overrides, units, and energy split") {
  const auto kv = parse_key_values(
      "# comment\n"
      "receiver.n = 4\n"
      "ambient.mu_a = 0.7\n"
      "energy.total_power_mw = 100\n"
      "info.a_sq_mw = 50\n"
      "model = accurate\n"
      "seed = 42\n");
  const RunConfig cfg = config_from_map(kv);
  CHECK(cfg.ambient.mu_a == doctest::Approx(0.7));
  CHECK(cfg.energy_total_power == doctest::Approx(0.1));
  REQUIRE(cfg.energy.lines.size() == 4);
  CHECK(cfg.energy.lines[1].power == doctest::Approx(0.025));
  CHECK(cfg.info.a_sq == doctest::Approx(0.05));
  CHECK(cfg.model == EhModelKind::accurate);
  CHECK(cfg.seed == 42);
}

TEST_CASE("explicit energy lines") {
  std::map<std::string, std::string> kv;
  kv["energy.line1.lambda_nm"] = "700";
  kv["energy.line1.power_mw"] = "30";
  kv["energy.line2.lambda_nm"] = "850";
  kv["energy.line2.power_mw"] = "20";
  kv["energy.line2.gain"] = "0.5";
  const RunConfig cfg = config_from_map(kv);
  REQUIRE(cfg.energy.lines.size() == 2);
  CHECK(cfg.explicit_lines);
  CHECK(cfg.energy.lines[0].lambda == doctest::Approx(700e-9));
  CHECK(cfg.energy.lines[0].power == doctest::Approx(0.03));
  CHECK(cfg.energy.lines[1].gain == doctest::Approx(0.5));

  kv.erase("energy.line1.lambda_nm");
  CHECK_THROWS_AS(config_from_map(kv), ConfigError);
}

TEST_CASE("serialize/parse is idempotent") {
  const auto round = [](const std::map<std::string, std::string>& kv) {
    const RunConfig c1 = config_from_map(kv);
    const std::string s1 = serialize_config(c1);
    const RunConfig c2 = config_from_map(parse_key_values(s1));
    const std::string s2 = serialize_config(c2);
    CHECK(s1 == s2);
    CHECK(c1.resolved == c2.resolved);
  };
  round({});
  round({{"receiver.n", "4"}, {"ambient.mu_a", "0.3141592653589793"}});
  round({{"receiver.junction1.lambda_max_nm", "712.3456789012345"},
         {"info.a_sq_mw", "12.000000000000345"},
         {"sweep.s_mw", "0,1,10"}});
  round({{"receiver.r0_override_a_per_w", "0.5529"}});
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(config_from_map({{"bogus.key", "1"}}), ConfigError);
  CHECK_THROWS_AS(config_from_map({{"receiver.n", "0"}}), ConfigError);
  CHECK_THROWS_AS(config_from_map({{"ambient.mu_a", "zzz"}}), ConfigError);
  CHECK_THROWS_AS(config_from_map({{"receiver.info_junction", "7"}}), ConfigError);
  CHECK_THROWS_AS(config_from_map({{"receiver.junction3.eta", "0.7"}}), ConfigError);
  CHECK_THROWS_AS(config_from_map({{"model", "nonsense"}}), ConfigError);
  CHECK_THROWS_AS(parse_key_values("not a key value line\n"), ConfigError);
}

TEST_CASE("grid parsing") {
  CHECK(parse_grid("1,2,5") == std::vector<double>{1.0, 2.0, 5.0});
  const auto lin = parse_grid("0:10:11");
  REQUIRE(lin.size() == 11);
  CHECK(lin[0] == 0.0);
  CHECK(lin[10] == 10.0);
  CHECK(lin[3] == doctest::Approx(3.0));
  const auto lg = parse_grid("1:100:3:log");
  REQUIRE(lg.size() == 3);
  CHECK(lg[1] == doctest::Approx(10.0));
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:5:log"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:2:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:2:3:banana"), ConfigError);
}

}  // TEST_SUITE
