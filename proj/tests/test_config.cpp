#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fermiqft/cli.hpp"
#include "fermiqft/config.hpp"

using namespace fqft;
using nlohmann::json;

namespace {

json toy() {
  std::ifstream in(std::string(FERMIQFT_CONFIG_DIR) + "/toy.json");
  return json::parse(in);
}

std::string error_of(const json& doc) {
  try {
    parse_run_config(doc);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ShippedConfigsParseAndBuild) {
  for (const char* name : {"toy", "n2_random", "n3_small", "n3", "n3_smooth", "n3_massive", "n4", "fermi_nu0",
                           "fermi_nuhalf"}) {
    const RunConfig cfg = load_run_config(std::string(FERMIQFT_CONFIG_DIR) + "/" + name + ".json");
    EXPECT_NO_THROW(build_terms(cfg, build_table(cfg))) << name;
  }
}

TEST(Config, SchemaErrorsNameTheOffendingPath) {
  json d = toy();
  d["species"][1]["mass"] = -1.0;
  EXPECT_NE(error_of(d).find("$.species[1].mass"), std::string::npos) << error_of(d);
  d = toy();
  d["kernels"][0]["colour"] = 1;
  EXPECT_NE(error_of(d).find("unknown key 'colour'"), std::string::npos);
  d = toy();
  d["kernels"][0]["processes"] = {"(2;1)"};
  EXPECT_NE(error_of(d).find("$.kernels[0].processes"), std::string::npos);
  d = toy();
  d.erase("species");
  EXPECT_NE(error_of(d).find("species"), std::string::npos);
  d = toy();
  d["verify"]["i0"] = 5;
  EXPECT_FALSE(error_of(d).empty());
  d = toy();
  d["coupling"] = "strong";
  EXPECT_NE(error_of(d).find("$.coupling"), std::string::npos);
}

TEST(Config, HashFollowsContent) {
  const RunConfig a = parse_run_config(toy());
  EXPECT_EQ(config_hash(a), config_hash(parse_run_config(toy())));
  EXPECT_EQ(config_hash(a).size(), 16u);
  json d = toy();
  d["coupling"] = 0.5;
  EXPECT_NE(config_hash(a), config_hash(parse_run_config(d)));
  // FNV-1a 64 reference values
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, ExpectedFailuresAndOverrides) {
  RunConfig cfg = load_run_config(std::string(FERMIQFT_CONFIG_DIR) + "/fermi_nu0.json");
  EXPECT_TRUE(expected_to_fail(cfg, "infrared"));
  EXPECT_FALSE(expected_to_fail(cfg, "form_bound"));
  apply_overrides(cfg, 99u, 128u);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.solver.dense_cap, 128u);
}

TEST(Config, VerdictClassification) {
  const RunConfig cfg = load_run_config(std::string(FERMIQFT_CONFIG_DIR) + "/fermi_nu0.json");
  BoundReport r;
  r.name = "infrared";
  r.pass = false;
  EXPECT_EQ(classify(cfg, r), Verdict::expected_fail);
  r.pass = true;
  EXPECT_EQ(classify(cfg, r), Verdict::unexpected_pass);
  r.name = "form_bound";
  EXPECT_EQ(classify(cfg, r), Verdict::pass);
  r.pass = false;
  EXPECT_EQ(classify(cfg, r), Verdict::fail);
  CommandResult res;
  res.entries.push_back({"x", r, Verdict::expected_fail});
  EXPECT_EQ(res.exit_code(), 0);
  res.entries.push_back({"x", r, Verdict::unexpected_pass});
  EXPECT_NE(res.exit_code(), 0);
}
