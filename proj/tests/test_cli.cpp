// Copyright 2026 The Ising Response Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "isr/io.hpp"

namespace isr {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status = -1;
  std::string out;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("isr_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the binary inside the scratch directory; stdout and stderr merged.
  Outcome run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" ISR_CLI_PATH "' " + args + " 2>&1";
    Outcome r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

TEST_F(Cli, GenInstancesOnGrid) {
  ASSERT_EQ(run("gen instances --n 4 --complete --count 295 --seed 7 --out i.json").status, 0);
  const auto instances = load_instances(path("i.json"));
  ASSERT_EQ(instances.size(), 295u);
  for (const auto& inst : instances) {
    ASSERT_EQ(inst.dimension(), 10u);
    for (double v : inst.theta) {
      EXPECT_LE(std::abs(v), 0.05 + 1e-15);
      EXPECT_EQ(v, std::round(v * 100.0) / 100.0);
    }
  }
}

TEST_F(Cli, GenSyntheticExactWritesWeightedRows) {
  ASSERT_EQ(run("gen instances --n 3 --chain --count 2 --seed 1 --out i.json").status, 0);
  ASSERT_EQ(run("gen model --instances i.json --kind random --seed 2 --out m.json").status, 0);
  ASSERT_EQ(run("gen synthetic --model m.json --instances i.json --exact --out d").status, 0);
  const Dataset data = load_dataset(path("d"));
  ASSERT_EQ(data.size(), 2u);
  EXPECT_EQ(data.samples(0).num_rows(), 8u);
  EXPECT_NEAR(data.samples(0).total_weight(), 1.0, 1e-12);
  ASSERT_EQ(run("gen synthetic --model m.json --instances i.json --shots 50 --seed 3 --out s").status, 0);
  EXPECT_EQ(load_dataset(path("s")).samples(1).total_weight(), 50.0);
}

TEST_F(Cli, GenLayoutsOnShiftGrid) {
  ASSERT_EQ(run("gen layouts --count 100 --seed 5 --out l.json").status, 0);
  const auto layouts = load_layouts(path("l.json"));
  ASSERT_EQ(layouts.size(), 100u);
  for (const auto& layout : layouts) {
    ASSERT_EQ(layout.size(), 4u);
    // Corner (0,0) moves along the diagonal toward the centre.
    const double shift = layout.positions()[0].norm() / 0.3;
    EXPECT_NEAR(shift, std::round(shift), 1e-9);
  }
}

TEST_F(Cli, EmptyDatasetIsUsageError) {
  ASSERT_EQ(run("gen instances --n 2 --chain --count 0 --out i.json").status, 0);
  ASSERT_EQ(run("gen model --instances i.json --kind zero --out m.json").status, 0);
  ASSERT_EQ(run("gen synthetic --model m.json --instances i.json --exact --out d").status, 0);
  const Outcome r = run("fit --data d --out f.json");
  EXPECT_EQ(r.status, 2) << r.out;
  EXPECT_NE(r.out.find("no instances"), std::string::npos) << r.out;
}

TEST_F(Cli, CheckCountsInstances) {
  ASSERT_EQ(run("gen instances --n 4 --complete --count 66 --seed 3 --continuous --lo -1 --hi 1 --out i.json").status,
            0);
  Outcome r = run("check --instances i.json --mask full");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("required: 66"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("sufficient: yes"), std::string::npos) << r.out;

  auto doc = nlohmann::json::parse(slurp(path("i.json")));
  doc["instances"].erase(doc["instances"].size() - 1);
  std::ofstream(path("i65.json")) << doc.dump();
  r = run("check --instances i65.json --mask full");
  EXPECT_NE(r.out.find("sufficient: no"), std::string::npos) << r.out;

  doc["instances"].erase(doc["instances"].begin() + 11, doc["instances"].end());
  std::ofstream(path("i11.json")) << doc.dump();
  r = run("check --instances i11.json --mask linear");
  EXPECT_NE(r.out.find("required: 11"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("sufficient: yes"), std::string::npos) << r.out;
}

TEST_F(Cli, SeededCommandsAreByteIdentical) {
  for (const char* tag : {"a", "b"}) {
    const std::string t(tag);
    ASSERT_EQ(run("gen instances --n 3 --chain --count 25 --seed 9 --continuous --lo -1 --hi 1 --out i" + t + ".json")
                  .status,
              0);
    ASSERT_EQ(run("gen model --instances i" + t + ".json --seed 4 --out m" + t + ".json").status, 0);
    ASSERT_EQ(run("gen synthetic --model m" + t + ".json --instances i" + t + ".json --shots 200 --seed 6 --out d" + t)
                  .status,
              0);
    ASSERT_EQ(run("fit --data d" + t + " --out f" + t + ".json").status, 0);
    ASSERT_EQ(run("gen layouts --count 10 --seed 2 --out l" + t + ".json").status, 0);
  }
  for (const char* name : {"i", "m", "f", "l"}) {
    EXPECT_EQ(slurp(path(std::string(name) + "a.json")), slurp(path(std::string(name) + "b.json"))) << name;
  }
  EXPECT_EQ(slurp(path("da/samples/00007.txt")), slurp(path("db/samples/00007.txt")));
}

TEST_F(Cli, GoldenFitIsReproduced) {
  const std::string golden = ISR_GOLDEN_DIR;
  const Outcome r = run("fit --data '" + golden + "/dataset' --tol 1e-8 --out f.json");
  ASSERT_EQ(r.status, 0) << r.out;
  const ResponseModel fitted = load_model(path("f.json"));
  const ResponseModel shipped = load_model(golden + "/fitted.json");
  const ResponseModel planted = load_model(golden + "/planted.json");
  for (const auto& [term, p] : fitted.terms()) {
    const Eigen::VectorXd mine = to_feature_coefficients(p);
    EXPECT_LT((mine - to_feature_coefficients(shipped.at(term))).lpNorm<Eigen::Infinity>(), 1e-4) << term.label();
    EXPECT_LT((mine - to_feature_coefficients(planted.at(term))).lpNorm<Eigen::Infinity>(), 1e-4) << term.label();
  }
}

TEST_F(Cli, PipelineOnExactPlantedData) {
  ASSERT_EQ(run("gen instances --n 3 --complete --count 40 --seed 2 --continuous --lo -1 --hi 1 --out train.json").status,
            0);
  ASSERT_EQ(run("gen instances --n 3 --complete --count 4 --seed 3 --continuous --lo -1 --hi 1 --out test.json").status,
            0);
  ASSERT_EQ(run("gen model --instances train.json --seed 8 --out planted.json").status, 0);
  ASSERT_EQ(run("gen synthetic --model planted.json --instances train.json --exact --out train").status, 0);
  ASSERT_EQ(run("gen synthetic --model planted.json --instances test.json --exact --out test").status, 0);
  ASSERT_EQ(run("fit --data train --out model.json --report report.json").status, 0);
  const auto report = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_TRUE(report.contains("qubits"));
  const Outcome r = run("evaluate --model model.json --data test --out eval.json");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto eval = nlohmann::json::parse(slurp(path("eval.json")));
  EXPECT_LT(eval["summary"]["all"]["rmse"].get<double>(), 1e-4);
  EXPECT_TRUE(eval["warnings"].empty());

  const Outcome overlap = run("evaluate --model model.json --data train");
  EXPECT_NE(overlap.out.find("training"), std::string::npos) << overlap.out;
}

TEST_F(Cli, EvaluateIdentityDevice) {
  ASSERT_EQ(run("gen instances --n 4 --complete --count 3 --seed 4 --continuous --lo -1 --hi 1 --out i.json").status, 0);
  ASSERT_EQ(run("gen model --instances i.json --kind identity --out id.json").status, 0);
  ASSERT_EQ(run("gen synthetic --model id.json --instances i.json --exact --out d").status, 0);
  ASSERT_EQ(run("evaluate --model id.json --data d --out e.json").status, 0);
  const auto eval = nlohmann::json::parse(slurp(path("e.json")));
  EXPECT_GT(eval["summary"]["all"]["pearson"].get<double>(), 0.9999);
  for (const auto& inst : eval["instances"]) {
    for (const auto& p : inst["points"]) {
      EXPECT_NEAR(p["predicted"].get<double>(), p["reconstructed"].get<double>(), 1e-4);
    }
  }
}

TEST_F(Cli, StreamingFitRuns) {
  ASSERT_EQ(run("gen instances --n 2 --chain --count 10 --seed 1 --continuous --lo -1 --hi 1 --out i.json").status, 0);
  ASSERT_EQ(run("gen model --instances i.json --seed 1 --out m.json").status, 0);
  ASSERT_EQ(run("gen synthetic --model m.json --instances i.json --exact --out d").status, 0);
  const Outcome r = run("fit --data d --streaming --epochs 3 --out f.json");
  EXPECT_NE(r.out.find("30 online steps"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(path("f.json")));
}

TEST_F(Cli, GeometryConvertAndTile) {
  ASSERT_EQ(run("gen layouts --count 2 --seed 3 --out l.json").status, 0);
  ASSERT_EQ(run("geometry convert --layouts l.json --normalize --out i.json").status, 0);
  const auto instances = load_instances(path("i.json"));
  ASSERT_EQ(instances.size(), 2u);
  EXPECT_EQ(instances[0].dimension(), 10u);
  EXPECT_NEAR(instances[0].theta.head(6).cwiseAbs().maxCoeff(), 1.0, 1e-12);
  const Outcome r = run("geometry tile --layouts l.json --out t.json");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(load_layouts(path("t.json"))[0].size(), 16u);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help").status, 0);
  EXPECT_EQ(run("fit --bogus").status, 2);
  EXPECT_EQ(run("gen instances --n 3 --edges 0-5 --out i.json").status, 2);
  std::ofstream(path("bad.json")) << R"({"format": "isr.instances", "version": 1, "topology": {"n": "x"}})";
  const Outcome r = run("check --instances bad.json");
  EXPECT_EQ(r.status, 4) << r.out;
  EXPECT_NE(r.out.find("topology.n"), std::string::npos) << r.out;
  std::ofstream(path("future.json")) << R"({"format": "isr.instances", "version": 99})";
  EXPECT_EQ(run("check --instances future.json").status, 4);

  ASSERT_EQ(run("gen instances --n 3 --chain --count 30 --seed 2 --continuous --lo -1 --hi 1 --out i.json").status, 0);
  ASSERT_EQ(run("gen model --instances i.json --seed 3 --out m.json").status, 0);
  ASSERT_EQ(run("gen synthetic --model m.json --instances i.json --exact --out d").status, 0);
  EXPECT_EQ(run("fit --data d --max-iter 1 --out f.json").status, 3);
}

}  // namespace
}  // namespace isr
