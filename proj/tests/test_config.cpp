#include <gtest/gtest.h>

#include "doa/config.hpp"

using namespace doa;

TEST(Config, EmptyDocumentGivesDefaults) {
  const RunConfig c = parse_config("{}");
  EXPECT_EQ(c.array.num_elements, 20);
  EXPECT_EQ(c.training.num_samples, 1200);
  EXPECT_EQ(c.training.epochs, 1000);
  EXPECT_EQ(c.training.batch_size, 100);
  EXPECT_EQ(c.training.learning_rate, 1e-3);
  EXPECT_EQ(c.scan.threshold, 0.3);
  EXPECT_EQ(c.num_regions, 6);
  EXPECT_EQ(c.experiment.snr_db.size(), 5u);
  EXPECT_EQ(c.baseline.subarray_len, 14);
  EXPECT_EQ(c.network_spec().layer_sizes.back(), 2280);
}

TEST(Config, ReadsNestedValues) {
  const RunConfig c = parse_config(R"({
    "seed": 42,
    "array": {"num_elements": 8, "coupling_gamma": {"magnitude": 0.1, "phase_rad": 0.5}},
    "imperfections": {"gain": 0.5, "phase": 0, "position": 0, "coupling": 1},
    "training": {"epochs": 5, "snr_db": [0, 10], "label_model": "imperfect"},
    "network": {"activation": "relu"},
    "scan": {"threshold": 0.4, "templates": "imperfect"},
    "experiment": {"trials": 3, "snr_db": 10, "rmse_scene": {"angles_deg": [-20, 20], "coherent": false}},
    "scene": {"angles_deg": [-10], "paths": [{"amplitude": 1, "phase_rad": 0}]},
    "baseline": {"subarray_len": 6},
    "estimators": ["music"],
    "paths": {"out_dir": "/tmp"}
  })");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.training.seed, derive_seed(42, 1));
  EXPECT_EQ(c.array.num_elements, 8);
  EXPECT_NEAR(std::abs(c.gamma), 0.1, 1e-15);
  EXPECT_EQ(c.imperfections.gain, 0.5);
  EXPECT_EQ(c.training.snr_db, (std::vector<double>{0, 10}));
  EXPECT_EQ(c.training.label_model, LabelModel::Imperfect);
  EXPECT_EQ(c.activation, Activation::Relu);
  EXPECT_EQ(c.scan.templates, TemplateModel::Imperfect);
  EXPECT_EQ(c.experiment.snr_db, (std::vector<double>{10}));
  EXPECT_FALSE(c.experiment.rmse_scene.coherent);
  ASSERT_TRUE(c.scene.paths.has_value());
  EXPECT_EQ(c.estimators, (std::vector<std::string>{"music"}));
  EXPECT_EQ(c.network_spec().input_size(), 56);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(R"({"sed": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"training": {"epoch": 1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"scene": {"paths": [{"amp": 1}]}})"), ConfigError);
  try {
    parse_config(R"({"training": {"epoch": 1}})");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("training.epoch"), std::string::npos);
  }
}

TEST(Config, RejectsBadTypesAndValues) {
  EXPECT_THROW(parse_config("not json"), ConfigError);
  EXPECT_THROW(parse_config(R"({"seed": -1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"training": {"epochs": "many"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"training": {"epochs": 0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": {"trials": 0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"imperfections": {"gain": 2}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"array": {"num_elements": 7}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"network": {"activation": "sigmoid"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"estimators": ["esprit"]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"array": []})"), ConfigError);
  EXPECT_NO_THROW(parse_config(
      R"({"array": {"num_elements": 7}, "baseline": {"subarray_len": 5}, "imperfections": {"gain": 0, "phase": 0, "position": 0, "coupling": 0}})"));
}

TEST(Config, DumpParsesBackIdentically) {
  RunConfig c = parse_config(R"({"seed": 9, "training": {"epochs": 7}, "scene": {"angles_deg": [3], "paths": [{"amplitude": 0.5, "phase_rad": 1}]}})");
  const std::string text = dump_config(c);
  const RunConfig back = parse_config(text);
  EXPECT_EQ(dump_config(back), text);
  EXPECT_EQ(back.training.epochs, 7);
  EXPECT_THROW(load_config("/nonexistent/doaae.json"), IoError);
}
