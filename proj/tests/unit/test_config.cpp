#include "doctest.h"
#include "gated/config.hpp"

using namespace gated;

TEST_CASE("parse_config") {
  SUBCASE("values") {
    const RunConfig c = parse_config("lr=0.05\nepochs=10");
    CHECK(c.real("lr") == 0.05);
    CHECK(c.count("epochs") == 10);
  }
  SUBCASE("empty file gives defaults") {
    const RunConfig c = parse_config("");
    CHECK(c.values.empty());
    CHECK(c.seed == 42);
    CHECK(c.real("lr") == 0.05);
    CHECK(c.text("tying") == "tied");
  }
  SUBCASE("comments, blanks and whitespace") {
    const RunConfig c = parse_config("# header\n\n  momentum = 0.5  # trailing\nseed=7\ncommand=train\n");
    CHECK(c.real("momentum") == 0.5);
    CHECK(c.seed == 7);
    CHECK(c.command == Command::Train);
  }
}

TEST_CASE("parse_config errors name the line") {
  CHECK_THROWS_WITH_AS(parse_config("lrr=0.05"), doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("lrr=0.05"), doctest::Contains("lrr"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("lr=0.1\nepochs=ten"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("\n\nlr"), doctest::Contains("line 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("tying=loose"), ConfigError);
  CHECK_THROWS_AS(parse_config("batch_size=-1"), ConfigError);
}

TEST_CASE("missing required keys") {
  const RunConfig c = parse_config("");
  CHECK_THROWS_WITH_AS(c.require("generator"), doctest::Contains("generator"), ConfigError);
  CHECK_THROWS_AS(c.text("generator"), ConfigError);
}

TEST_CASE("overrides") {
  RunConfig c = parse_config("lr=0.1");
  set_value(c, "lr", "0.2", "--set");
  CHECK(c.real("lr") == 0.2);
  CHECK_THROWS_WITH_AS(set_value(c, "bogus", "1", "--set"), doctest::Contains("--set"), ConfigError);
}

TEST_CASE("lists") {
  const RunConfig c = parse_config("shifts=-2, 0,3");
  CHECK(c.integer_list("shifts") == std::vector<long>{-2, 0, 3});
}
