#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nematic/cli.hpp"

using namespace nematic;
using namespace nematic::cli;

TEST_SUITE("cli") {

TEST_CASE("transfer example") {
  auto o = run(json{{"subcommand", "transfer"}, {"z", 1}, {"J", 0}, {"ell", 4}});
  REQUIRE(o.exit_code == ok);
  CHECK(o.result["psi"].get<double>() == 5.0);
  CHECK(o.result["subcommand"] == "transfer");
  CHECK(o.result["config"]["ell"] == 4);
}

TEST_CASE("enumerate example") {
  auto o = run(json{{"subcommand", "enumerate"}, {"rect", {2, 2}}, {"z", 1}, {"J", 0}, {"ell0", 0}});
  REQUIRE(o.exit_code == ok);
  CHECK(o.result["Z"].get<double>() == 7.0);
  CHECK(o.result["configurations"] == 7);
}

TEST_CASE("malformed and invalid input") {
  auto bad = run_text("{\"subcommand\": \"transfer\", ");
  CHECK(bad.exit_code == validation_failed);
  CHECK(bad.error.find("malformed JSON") != std::string::npos);
  CHECK(run(json{{"subcommand", "transfer"}, {"z", 1}, {"bogus", 2}}).exit_code == validation_failed);
  CHECK(run(json{{"subcommand", "nope"}}).exit_code == validation_failed);
  CHECK(run(json{{"z", 1}}).exit_code == validation_failed);
  CHECK(run(json{{"subcommand", "transfer"}, {"z", -1}}).exit_code == validation_failed);
  CHECK(run(json{{"subcommand", "transfer"}, {"z", "x"}}).exit_code == validation_failed);
  CHECK(run(json::array()).exit_code == validation_failed);
}

TEST_CASE("size cap has its own exit code") {
  auto o = run(json{{"subcommand", "enumerate"}, {"rect", {6, 6}}, {"z", 1}, {"J", 0}});
  CHECK(o.exit_code == size_cap);
  CHECK_FALSE(o.error.empty());
}

TEST_CASE("embedded config reproduces the result") {
  auto first = run(json{{"subcommand", "oriented"}, {"rect", {3, 4}}, {"z", 2.5}, {"J", 1.25}});
  REQUIRE(first.exit_code == ok);
  auto again = run(first.result["config"]);
  CHECK(again.result.dump() == first.result.dump());
}

TEST_CASE("cluster and decompose subcommands") {
  json sys = {{"n", 2}, {"zeta", {0.2, 0.2}}, {"incompatible_pairs", {{0, 1}}}};
  auto o = run(json{{"subcommand", "cluster"}, {"system", sys}, {"max_order", 6}});
  REQUIRE(o.exit_code == ok);
  CHECK(o.result.dump().find("exact_log_partition") != std::string::npos);

  auto d = run(json{{"subcommand", "decompose"}, {"rect", {6, 6}}, {"q", "v"}, {"ell0", 1},
                    {"configuration", {{{2, 2}, {3, 2}}}}});
  REQUIRE(d.exit_code == ok);
  CHECK(d.result.dump().find("loops") != std::string::npos);
}

TEST_CASE("mc writes a table and a sidecar") {
  auto o = run(json{{"subcommand", "mc"}, {"rect", {4, 4}}, {"z", 2}, {"J", 1}, {"seed", 3}, {"sweeps", 3200},
                    {"therm", 100}, {"bin", 100}, {"edges", {{{1, 1}, {1, 2}}}}});
  REQUIRE(o.exit_code == ok);
  REQUIRE(o.csv.has_value());
  const std::string path = "cli_test_mc.csv";
  REQUIRE(write_outputs(o, path, std::cout));
  std::ifstream csv(path), side(path + ".json");
  CHECK(csv.good());
  CHECK(side.good());
  std::stringstream buf;
  buf << side.rdbuf();
  CHECK(json::parse(buf.str())["subcommand"] == "mc");
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST_CASE("thread resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(std::nullopt) >= 1);
}

}
