#include <fstream>

#include "doctest.h"
#include "echoforge/config.h"
#include "echoforge/errors.h"
#include "scenarios.h"

using namespace echoforge;
using namespace echoforge::testing;

TEST_CASE("parse values, comments and lists") {
  auto cfg = Config::Parse(
      "# header\n"
      "a.x = 1.5   # trailing\n"
      "\n"
      "a.n = 12\n"
      "a.flag = true\n"
      "a.list = one, two ,three\n"
      "a.range = -3, 4\n"
      "a.name = hello world\n");
  CHECK(cfg.GetDouble("a.x", 0.0) == 1.5);
  CHECK(cfg.GetInt("a.n", 0) == 12);
  CHECK(cfg.GetBool("a.flag", false));
  CHECK(cfg.GetList("a.list") == std::vector<std::string>{"one", "two", "three"});
  CHECK(cfg.GetRange("a.range") == std::pair(-3.0, 4.0));
  CHECK(cfg.GetString("a.name") == "hello world");
  CHECK(cfg.GetDouble("a.missing", 7.0) == 7.0);
  CHECK_NOTHROW(cfg.RequireAllConsumed());
}

TEST_CASE("syntax errors, duplicates and unknown keys") {
  CHECK_THROWS_AS(Config::Parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(Config::Parse("a = 1\na = 2\n"), ConfigError);
  auto cfg = Config::Parse("a.x = abc\nb.y = 1\n");
  CHECK_THROWS_AS(cfg.GetDouble("a.x", 0.0), ConfigError);
  auto unread = Config::Parse("a.x = 1\nb.typo = 2\n");
  unread.GetDouble("a.x", 0.0);
  try {
    unread.RequireAllConsumed();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "b.typo");
  }
  auto bad_range = Config::Parse("r = 5, 1\n");
  CHECK_THROWS_AS(bad_range.GetRange("r"), ConfigError);
}

TEST_CASE("formatted parameters round trip exactly") {
  ParamVector p;
  p.raec1.step_size = 0.123456789012345678;
  p.raec2.frame_size = 256;
  p.suppressor.theta1 = 0.1 / 3.0;
  p.suppressor.cap_unity = true;
  p.vad.hangover_frames = 7;
  auto cfg = Config::Parse(FormatParams(p));
  ParamVector q;
  ApplyParams(cfg, q);
  CHECK_NOTHROW(cfg.RequireAllConsumed());
  for (const auto& info : ParamRegistry()) CHECK_MESSAGE(info.get(q) == info.get(p), info.name);
}

TEST_CASE("parameter values are range checked with the key named") {
  const auto expect_field = [](const std::string& text, const std::string& field) {
    auto cfg = Config::Parse(text);
    ParamVector p;
    try {
      ApplyParams(cfg, p);
      FAIL("expected ConfigError for ", text);
    } catch (const ConfigError& e) {
      CHECK(e.field() == field);
    }
  };
  expect_field("raec1.mu = 2.0\n", "raec1.mu");
  expect_field("raec1.frame_size = 384\n", "raec1.frame_size");
  expect_field("mask.theta1 = 0.5\nmask.theta2 = 1.5\nmask.alpha = 3\n", "mask.alpha");
  expect_field("mask.theta1 = 0.8\nmask.theta2 = 0.5\n", "mask.theta1");
}

TEST_CASE("relative paths resolve against the file") {
  TempDir dir("config");
  const auto file = dir.path() / "sub" / "x.cfg";
  std::filesystem::create_directories(file.parent_path());
  std::ofstream(file) << "p.one = data/a.wav\np.many = b.wav, /abs/c.wav\n";
  auto cfg = Config::Load(file);
  CHECK(cfg.GetPath("p.one") == file.parent_path() / "data/a.wav");
  const auto many = cfg.GetPathList("p.many");
  REQUIRE(many.size() == 2);
  CHECK(many[0] == file.parent_path() / "b.wav");
  CHECK(many[1] == "/abs/c.wav");
  try {
    Config::Load(dir.path() / "missing.cfg");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(e.path().find("missing.cfg") != std::string::npos);
  }
}
