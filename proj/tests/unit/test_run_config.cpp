#include <doctest.h>

#include "run_config.hpp"

using spectral_forge::cli::fnv1a64;
using spectral_forge::cli::RunConfig;

TEST_CASE("fnv-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("hash depends on values, not insertion order") {
  RunConfig a("construct"), b("construct");
  a.set("dx", 0.01);
  a.set("kind", "primes");
  b.set("kind", "primes");
  b.set("dx", 0.01);
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  b.set("dx", 0.02);
  CHECK(a.hash() != b.hash());
  CHECK(RunConfig("verify").hash() != RunConfig("wkb").hash());
}

TEST_CASE("config file text") {
  RunConfig c("fractal");
  c.set("variant", "2d");
  c.set("bootstrap", std::uint64_t{16});
  c.set("polish", false);
  c.set("alphas", std::vector<double>{-1.0, 0.5});
  const auto text = c.to_config_file();
  CHECK(text.find("[fractal]\n") != std::string::npos);
  CHECK(text.find("variant=\"2d\"\n") != std::string::npos);
  CHECK(text.find("bootstrap=16\n") != std::string::npos);
  CHECK(text.find("polish=false\n") != std::string::npos);
  CHECK(text.find("alphas=[-1, 0.5]\n") != std::string::npos);
  CHECK(c.metadata().at("config_hash") == c.hash());
}
