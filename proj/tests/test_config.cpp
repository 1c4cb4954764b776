#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ura/config.hpp"
#include "ura/errors.hpp"

using ura::ConfigError;
using ura::ConfigMap;
using ura::SystemConfig;

TEST_SUITE("config") {

TEST_CASE("parse_stream handles comments, blanks and overrides") {
  std::istringstream in(
      "# experiment setup\n"
      "k_tot = 100\n"
      "\n"
      "  m=64   # trailing comment\n"
      "name = rician sweep\n"
      "m = 128\n");
  const ConfigMap cfg = ConfigMap::parse_stream(in);
  CHECK(cfg.get_int("k_tot") == 100);
  CHECK(cfg.get_int("m") == 128);  // later key wins
  CHECK(cfg.get_str("name") == "rician sweep");
  CHECK_FALSE(cfg.has("absent"));
}

TEST_CASE("typed getters reject malformed values") {
  ConfigMap cfg;
  cfg.set("x", "3.5");
  cfg.set("y", "abc");
  cfg.set("z", "12");
  CHECK_THROWS_AS((void)cfg.get_int("x"), ConfigError);
  CHECK_THROWS_AS((void)cfg.get_int("y"), ConfigError);
  CHECK_THROWS_AS((void)cfg.get_double("y"), ConfigError);
  CHECK(cfg.get_double("x") == doctest::Approx(3.5));
  CHECK(cfg.get_int("z") == 12);
  CHECK_THROWS_AS((void)cfg.get_str("missing"), ConfigError);
  CHECK(cfg.get_int_or("missing", 7) == 7);
  CHECK(cfg.get_double_or("missing", 2.5) == doctest::Approx(2.5));
  CHECK(cfg.get_str_or("missing", "d") == "d");
}

TEST_CASE("list getters split on commas") {
  ConfigMap cfg;
  cfg.set("a_tail", "0, 6,6 ,6");
  cfg.set("arms", "proposed,baseline");
  CHECK(cfg.get_int_list("a_tail") == std::vector<int>{0, 6, 6, 6});
  CHECK(cfg.get_str_list("arms") ==
        std::vector<std::string>{"proposed", "baseline"});
}

TEST_CASE("hash is canonical and value sensitive") {
  ConfigMap a, b;
  a.set("k_tot", "100");
  a.set("m", "64");
  b.set("m", "64");
  b.set("k_tot", "100");
  CHECK(a.hash() == b.hash());  // insertion order must not matter
  b.set("m", "65");
  CHECK(a.hash() != b.hash());
}

TEST_CASE("system_config_from validates ranges") {
  ConfigMap cfg;
  cfg.set("k_tot", "100");
  cfg.set("k_a", "10");
  const SystemConfig sys = ura::system_config_from(cfg);
  CHECK(sys.k_tot == 100);
  CHECK(sys.k_a == 10);

  ConfigMap bad1 = cfg;
  bad1.set("k_a", "101");  // more active than total
  CHECK_THROWS_AS((void)ura::system_config_from(bad1), ConfigError);
  ConfigMap bad2 = cfg;
  bad2.set("j", "27");  // codebook indices would overflow 32-bit masks
  CHECK_THROWS_AS((void)ura::system_config_from(bad2), ConfigError);
  ConfigMap bad3 = cfg;
  bad3.set("b", "0");
  CHECK_THROWS_AS((void)ura::system_config_from(bad3), ConfigError);
  ConfigMap bad4 = cfg;
  bad4.set("sigma2", "0");
  CHECK_THROWS_AS((void)ura::system_config_from(bad4), ConfigError);
}

TEST_CASE("power follows the per-bit SNR definition") {
  SystemConfig sys;
  sys.b = 6;
  sys.sigma2 = 1.0;
  sys.l = 4;
  sys.n0 = 16;
  sys.eb_n0_db = 0.0;
  // P = 2 b sigma^2 10^(EbN0/10) / n with n = L n0 = 64.
  CHECK(sys.power() == doctest::Approx(12.0 / 64.0).epsilon(1e-12));
  sys.eb_n0_db = 10.0;
  CHECK(sys.power() == doctest::Approx(120.0 / 64.0).epsilon(1e-12));
}

TEST_CASE("derived sizes") {
  SystemConfig sys;
  sys.k_tot = 1000;
  sys.epsilon = 0.1;
  sys.delta = 2;
  sys.l = 20;
  sys.n0 = 100;
  sys.j = 6;
  CHECK(sys.k_a_est() == 100);
  CHECK(sys.list_size() == 102);
  CHECK(sys.n() == 2000);
  CHECK(sys.num_codewords() == 64);
}

}  // TEST_SUITE
