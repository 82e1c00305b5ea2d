// Copyright 2026 The msfdpm Authors
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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"
#include "msfdpm/fmap_io.h"
#include "msfdpm/image_io.h"
#include "msfdpm/synthetic.h"
#include "test_util.h"

namespace msfdpm {
namespace {

using testing::TempDir;

int run(const std::string& args) {
  const std::string cmd = std::string(MSFDPM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream f(p);
  return nlohmann::json::parse(f);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const StereoPair pair = shifted_pair(64, 128, 3, 1);
    save_image(dir.path() / "main.ppm", pair.main);
    save_image(dir.path() / "side.ppm", pair.side);
    save_image(dir.path() / "odd.ppm", textured_image(64, 96, 2));
  }
  std::string p(const std::string& name) const { return (dir.path() / name).string(); }
  TempDir dir{"cli"};
};

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("run --main " + p("missing.png") + " --side " + p("side.ppm")), 2);
  EXPECT_EQ(run("run --main " + p("main.ppm") + " --side " + p("odd.ppm") + " -C 2"), 3);
  EXPECT_EQ(run("run --main " + p("main.ppm") + " --side " + p("side.ppm") + " -B 12"), 4);
  EXPECT_EQ(run("bench --synthetic 64x192 -C 2 --repetitions 1"), 4);
  EXPECT_EQ(run("frobnicate"), 4);
}

TEST_F(CliTest, StepwiseMatchesEndToEnd) {
  const std::string common = " -C 3 --seed 4";
  ASSERT_EQ(run("gen-weights --out-dir " + p("w") + common), 0);
  ASSERT_EQ(run("encode --image " + p("main.ppm") + " --latent-out " + p("main.fmap") + common), 0);
  ASSERT_EQ(run("encode --image " + p("side.ppm") + " --latent-out " + p("side.fmap") + common), 0);
  ASSERT_EQ(run("decode --latent " + p("main.fmap") + " --pyramid-out " + p("main_pyr") +
                " --image-out " + p("x1.fmap") + " --weights " + p("w")),
            0);
  ASSERT_EQ(run("decode --latent " + p("side.fmap") + " --pyramid-out " + p("side_pyr") + common),
            0);
  ASSERT_EQ(run("extract --image " + p("side.ppm") + " --pyramid-out " + p("lossless") + common),
            0);
  ASSERT_EQ(run("--out " + p("match.json") + " match --main " + p("main_pyr") + " --side " +
                p("side_pyr") + " --lossless " + p("lossless") + " --aligned-out " +
                p("aligned") + common),
            0);
  EXPECT_EQ(read_json(p("match.json"))["best"]["level1"].size(), 8u);
  ASSERT_EQ(run("fuse --main " + p("main_pyr") + " --aligned " + p("aligned") + " --x1 " +
                p("x1.fmap") + " --fmap-out " + p("x2.fmap") + common),
            0);
  ASSERT_EQ(run("run --main " + p("main.ppm") + " --side " + p("side.ppm") + " --x2-out " +
                p("x2_run.fmap") + common),
            0);
  // The stepwise path round-trips features through float32 files.
  EXPECT_LT(testing::max_abs_diff(read_fmap(p("x2.fmap")), read_fmap(p("x2_run.fmap"))), 1e-4);
}

TEST_F(CliTest, EvalModes) {
  ASSERT_EQ(run("--out " + p("eval.json") + " eval --reference " + p("main.ppm") + " --test " +
                p("main.ppm")),
            0);
  EXPECT_EQ(read_json(p("eval.json"))["ms_ssim"], 1.0);
  ASSERT_EQ(run("--out " + p("pr.json") + " eval --gain-before 0.02 --gain-after 0.015"), 0);
  EXPECT_EQ(read_json(p("pr.json"))["pr"], 0.25);
  std::ofstream(p("ref.json")) << R"([{"bpp":0.1,"psnr":28,"ms_ssim":0.9},
    {"bpp":0.2,"psnr":31,"ms_ssim":0.93},{"bpp":0.4,"psnr":33,"ms_ssim":0.95},
    {"bpp":0.8,"psnr":35,"ms_ssim":0.97}])";
  ASSERT_EQ(run("--out " + p("bd.json") + " eval --ref-curve " + p("ref.json") +
                " --test-curve " + p("ref.json")),
            0);
  EXPECT_NEAR(read_json(p("bd.json"))["bd_rate_p"].get<double>(), 0.0, 1e-9);
  EXPECT_EQ(run("eval"), 4);
}

TEST_F(CliTest, SweepAndBench) {
  ASSERT_EQ(run("--out " + p("sweep.json") + " sweep --main " + p("main.ppm") + " --side " +
                p("side.ppm") + " --factors 1.0,0.8 -C 2"),
            0);
  EXPECT_EQ(read_json(p("sweep.json"))["rows"].size(), 2u);
  ASSERT_EQ(run("--out " + p("bench.json") + " bench --synthetic 64x192 -C 2 --repetitions 5"), 0);
  EXPECT_TRUE(read_json(p("bench.json"))["level1_identical"].get<bool>());
}

}  // namespace
}  // namespace msfdpm
