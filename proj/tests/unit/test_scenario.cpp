#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "teleop/error.hpp"
#include "teleop/scenario.hpp"

using namespace teleop;

TEST(Scenario, DefaultsAreValid) { EXPECT_NO_THROW(ScenarioConfig{}.validate()); }

TEST(Scenario, JsonRoundTrip) {
  ScenarioConfig c;
  c.name = "rt";
  c.track = "C";
  c.delay.base_delay = 0.8;
  c.delay.jitter_half_width = 0.1;
  c.run_case = RunCase::kDelayed;
  c.gains.k_mv = 4.0;
  c.persona = "operator4";
  c.operator_params = persona_params("operator4");
  c.operator_params.noise_amp = 0.003;
  c.slip.ffc_gain = 0.7;
  c.duration = 12.5;
  c.seed = 77;
  TerrainProfile t;
  t.z = {0.0, 3.0};
  t.phi = {0.9, 0.6};
  c.terrain = t;
  const ScenarioConfig back = parse_scenario(scenario_to_json(c));
  EXPECT_EQ(scenario_to_json(back), scenario_to_json(c));
  EXPECT_EQ(back.run_case, RunCase::kDelayed);
  EXPECT_DOUBLE_EQ(back.operator_params.noise_amp, 0.003);
  ASSERT_TRUE(back.terrain);
  EXPECT_EQ(back.terrain->phi, t.phi);
}

TEST(Scenario, PersonaSelectsParametersThenOverrides) {
  const auto c = parse_scenario(R"({"operator": {"persona": "operator3", "k_feel": 0.5}})");
  EXPECT_EQ(c.persona, "operator3");
  EXPECT_DOUBLE_EQ(c.operator_params.k_track, persona_params("operator3").k_track);
  EXPECT_DOUBLE_EQ(c.operator_params.k_feel, 0.5);
}

TEST(Scenario, SharedGainShorthand) {
  const auto c = parse_scenario(R"({"gains": {"k_m": 3, "k_sv": 2}})");
  EXPECT_DOUBLE_EQ(c.gains.k_mv, 3.0);
  EXPECT_DOUBLE_EQ(c.gains.k_momega, 3.0);
  EXPECT_DOUBLE_EQ(c.gains.k_sv, 2.0);
  EXPECT_DOUBLE_EQ(c.gains.k_somega, 1.0);
}

TEST(Scenario, RejectsInvalidContent) {
  EXPECT_THROW(parse_scenario("{"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"colour": "red"})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"schema_version": 2})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"duration": 0})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"track": "Z"})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"delay": {"base": 0.1, "jitter": 0.5}})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"inner_dt": 0.03})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"operator": {"persona": "nobody"}})"), ConfigError);
  EXPECT_THROW(parse_scenario(R"({"duration": "long"})"), ConfigError);
}

TEST(Scenario, CheckpointPathsResolveAndMustExist) {
  const auto dir = std::filesystem::temp_directory_path() / "teleop_scenario_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "m.json") << "{}";
  const std::string text = R"({"case": "predicted", "predictor": "pilstm",
                               "checkpoints": {"x_mv": "m.json"}})";
  const auto c = parse_scenario(text, dir);
  EXPECT_EQ(c.checkpoints[index_of(CouplingVar::kXmv)], (dir / "m.json").string());
  EXPECT_THROW(parse_scenario(text, dir / "elsewhere"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Scenario, ChannelSeedsDifferPerDirection) {
  ScenarioConfig c;
  c.seed = 5;
  EXPECT_NE(channel_model(c, true).seed, channel_model(c, false).seed);
  EXPECT_EQ(channel_model(c, true).seed, channel_model(c, true).seed);
}
