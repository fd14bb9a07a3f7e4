#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "test_util.hpp"
#include "xfer/error.hpp"
#include "xfer/report.hpp"
#include "xfer/svg.hpp"

using namespace xfer;
using testutil::TempDir;

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  TempDir dir("sha");
  std::ofstream(dir / "f.txt") << "abc";
  CHECK(sha256_file(dir / "f.txt") == sha256_hex("abc"));
  CHECK_THROWS_AS(sha256_file(dir / "missing"), InputError);
}

TEST_CASE("transferability report schema") {
  TransferabilityReport r;
  r.variant = Variant::FB;
  r.network_T = 7.79;
  r.layers = {{"conv1", 7.0, 1.4, 0.2, false}, {"conv2", 8.58, 0.858, 0.1, false}, {"fc", 2.0, 1.0, 0.5, true}};
  const auto j = to_json(r);
  CHECK(j["variant"] == "FB");
  CHECK(j["network_T"] == 7.79);
  CHECK(j["layers"][2]["excluded"] == true);
  CHECK(j["layers"][1]["name"] == "conv2");

  const auto back = report_from_json(nlohmann::json::parse(dump_report(j)));
  CHECK(back.network_T == 7.79);
  REQUIRE(back.layers.size() == 3);
  CHECK(back.layers[1].T == 8.58);
  CHECK(back.layers[2].excluded);

  CHECK_THROWS_AS(report_from_json(nlohmann::json{{"variant", "FB"}}), FormatError);
}

TEST_CASE("reports are stable text with sorted keys") {
  nlohmann::json j;
  j["zeta"] = 1;
  j["alpha"] = {{"b", 2}, {"a", 1}};
  const std::string s = dump_report(j);
  CHECK(s == "{\n  \"alpha\": {\n    \"a\": 1,\n    \"b\": 2\n  },\n  \"zeta\": 1\n}\n");
}

TEST_CASE("run manifest records inputs and no clock") {
  TempDir dir("manifest");
  std::ofstream(dir / "in.csv") << "x";
  RunManifest m;
  m.subcommand = "gap";
  m.arguments["a"] = "in.csv";
  m.seeds = {7};
  m.add_input(dir / "in.csv");
  const auto j = to_json(m);
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["input_digests"].size() == 1);
  CHECK(j["seeds"][0] == 7);
  const std::string text = j.dump();
  CHECK(text.find("time") == std::string::npos);
  CHECK(dump_report(to_json(m)) == dump_report(j));
}

TEST_CASE("svg rendering is deterministic") {
  LineChart c{"T by amount", "amount", "T", {{"median", {256, 1024, 4096}, {3.1, 2.5, 2.0}}}, {}, true};
  const std::string a = render_svg(c);
  CHECK(a == render_svg(c));
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("polyline") != std::string::npos);
  CHECK(a.find("median") != std::string::npos);

  LineChart cat{"layers", "group", "T", {{"T", {0, 1, 2}, {1, 2, 3}}}, {"conv1", "conv2", "fc"}, false};
  CHECK(render_svg(cat).find("conv2") != std::string::npos);
}
