// Copyright 2026 The n2nvc Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "n2n/cli/cli.h"
#include "n2n/data/manifest.h"
#include "n2n/eval/harness.h"
#include "n2n/signal/waveform.h"
#include "n2n/vc/vqvae.h"
#include "test_util.h"

namespace n2n::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome Call(const std::vector<std::string> &args) {
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Tiny corpus plus briefly trained models, shared by the tests below.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(testing::ScratchDir("cli"));
    const std::string r = root_->string();
    ASSERT_EQ(Call({"-q", "mix", "--toy", "--seed", "3", "--out", r + "/c", "--utterances", "8",
                    "--noise-clips", "8", "--min-seconds", "0.4", "--max-seconds", "0.5",
                    "--eval-levels", "0,20"})
                  .code,
              0);
    ASSERT_EQ(Call({"-q", "train-denoiser", "--corpus", r + "/c", "--out", r + "/den", "--steps",
                    "2", "--batch", "2", "--crop-seconds", "0.25", "--channels", "2,2",
                    "--rnn-width", "4"})
                  .code,
              0);
    ASSERT_EQ(Call({"-q", "train-vc", "--corpus", r + "/c", "--out", r + "/vcp", "--denoiser",
                    r + "/den/denoiser.ckpt", "--steps", "2", "--batch", "2", "--segment", "64",
                    "--rnn-width", "8", "--codebook-size", "8", "--latent-dim", "4"})
                  .code,
              0);
    ASSERT_EQ(Call({"-q", "train-vc", "--corpus", r + "/c", "--out", r + "/vcb", "--variant",
                    "baseline", "--noise-source", "mixing", "--steps", "2", "--batch", "2",
                    "--segment", "64", "--rnn-width", "8", "--codebook-size", "8",
                    "--latent-dim", "4"})
                  .code,
              0);
  }
  static void TearDownTestSuite() { delete root_; }

  static std::string R(const std::string &rel) { return (*root_ / rel).string(); }
  static std::string Input() {
    for (const auto &e : data::ReadManifest(R("c/eval/snr_0/manifest.jsonl"))) {
      return e.mixture_path;
    }
    return {};
  }
  static std::vector<std::string> ConvertArgs(const std::string &vc, const std::string &mode,
                                              const std::string &output) {
    return {"-q",      "convert", "--denoiser", R("den/denoiser.ckpt"), "--vc",   R(vc),
            "--input", Input(),   "--output",   R(output),              "--target", "spk01",
            "--mode",  mode,      "--seed",     "4"};
  }

  static fs::path *root_;
};

fs::path *CliTest::root_ = nullptr;

TEST_F(CliTest, MixIsDeterministic) {
  const auto a = Call({"-q", "mix", "--toy", "--seed", "3", "--out", R("c2"), "--utterances", "8",
                       "--noise-clips", "8", "--min-seconds", "0.4", "--max-seconds", "0.5",
                       "--eval-levels", "0,20"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, fs::path(R("c2/corpus/manifest.jsonl")).string() + "\n");
  EXPECT_EQ(Slurp(R("c/corpus/manifest.jsonl")), Slurp(R("c2/corpus/manifest.jsonl")));
  EXPECT_EQ(Slurp(R("c/eval/snr_20/manifest.jsonl")), Slurp(R("c2/eval/snr_20/manifest.jsonl")));
  EXPECT_TRUE(fs::exists(R("c/run_config.ini")));
}

TEST_F(CliTest, MixArgumentErrors) {
  EXPECT_EQ(Call({"mix", "--toy", "--out", R("x"), "--snr-grid", ""}).code, kExitUsage);
  EXPECT_EQ(Call({"mix", "--toy", "--out", R("x"), "--snr-grid", "6,,8"}).code, kExitUsage);
  EXPECT_EQ(Call({"mix", "--toy", "--out", R("x"), "--bogus"}).code, kExitUsage);
  EXPECT_EQ(Call({"mix", "--out", R("x")}).code, kExitUsage);
  EXPECT_EQ(Call({"mix", "--toy", "--speech-dir", R("s"), "--noise-dir", R("n"), "--out", R("x")})
                .code,
            kExitUsage);
  EXPECT_EQ(Call({}).code, kExitUsage);
  EXPECT_EQ(Call({"frobnicate"}).code, kExitUsage);
}

TEST_F(CliTest, FullTrainGridIsAccepted) {
  const auto a = Call({"-q", "mix", "--toy", "--out", R("grid"), "--utterances", "8",
                       "--noise-clips", "8", "--min-seconds", "0.4", "--max-seconds", "0.5",
                       "--snr-grid", "6,8,10,12,14,16,18,20", "--eval-levels", "5"});
  EXPECT_EQ(a.code, 0) << a.err;
}

TEST_F(CliTest, HelpDocumentsEveryFlag) {
  for (const std::string sub : {"mix", "train-denoiser", "train-vc", "convert", "evaluate"}) {
    const auto h = Call({sub, "--help"});
    EXPECT_EQ(h.code, 0) << sub;
    EXPECT_NE(h.out.find("--"), std::string::npos) << sub;
  }
  const auto h = Call({"train-vc", "--help"});
  for (const char *flag : {"--variant", "--resume", "--denoiser", "--noise-source", "--seed"}) {
    EXPECT_NE(h.out.find(flag), std::string::npos) << flag;
  }
}

TEST_F(CliTest, TrainVcVariantsAndResume) {
  const auto p = vc::VQVAEModel::Load(R("vcp/vc.ckpt"));
  const auto b = vc::VQVAEModel::Load(R("vcb/vc.ckpt"));
  EXPECT_EQ(p.variant(), vc::Variant::kNoiseConditioned);
  EXPECT_EQ(b.variant(), vc::Variant::kBaseline);
  EXPECT_EQ(p.trained_steps(), 2);
  const auto wrong = Call({"-q", "train-vc", "--corpus", R("c"), "--out", R("vcp"), "--variant",
                           "baseline", "--noise-source", "mixing", "--steps", "3", "--resume",
                           "--rnn-width", "8", "--codebook-size", "8", "--latent-dim", "4"});
  EXPECT_EQ(wrong.code, kExitUsage);
  EXPECT_NE(wrong.err.find("variant"), std::string::npos) << wrong.err;
  EXPECT_EQ(Call({"-q", "train-vc", "--corpus", R("nowhere"), "--out", R("v"), "--noise-source",
                  "mixing"})
                .code,
            kExitData);
  EXPECT_EQ(Call({"-q", "train-vc", "--corpus", R("c"), "--out", R("v")}).code, kExitUsage);
  EXPECT_EQ(Call({"-q", "train-vc", "--corpus", R("c"), "--out", R("v"), "--variant", "other"})
                .code,
            kExitUsage);
}

TEST_F(CliTest, ConvertModesAndErrors) {
  for (const std::string mode : {"direct", "clean", "indirect"}) {
    const auto a = Call(ConvertArgs("vcp/vc.ckpt", mode, "o_" + mode + ".wav"));
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(signal::ReadWav(R("o_" + mode + ".wav")).size(), signal::ReadWav(Input()).size());
  }
  auto again = Call(ConvertArgs("vcp/vc.ckpt", "direct", "o_direct2.wav"));
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(Slurp(R("o_direct.wav")), Slurp(R("o_direct2.wav")));

  auto sup = ConvertArgs("vcb/vc.ckpt", "baseline", "o_b.wav");
  sup.push_back("--superimpose");
  EXPECT_EQ(Call(sup).code, 0);
  EXPECT_EQ(Call(ConvertArgs("vcb/vc.ckpt", "direct", "o_x.wav")).code, kExitUsage);

  auto unknown = ConvertArgs("vcp/vc.ckpt", "direct", "o_x.wav");
  unknown[11] = "nobody";
  EXPECT_EQ(Call(unknown).code, kExitUsage);

  signal::WriteWav(R("hi_rate.wav"), signal::Waveform(std::vector<double>(4410, 0.1), 44100));
  auto rate = ConvertArgs("vcp/vc.ckpt", "direct", "o_x.wav");
  rate[7] = R("hi_rate.wav");
  const auto r = Call(rate);
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("8000 Hz"), std::string::npos) << r.err;
}

TEST_F(CliTest, EvaluateReport) {
  const auto a = Call({"-q", "evaluate", "--corpus", R("c"), "--out", R("rep"), "--denoiser",
                       R("den/denoiser.ckpt"), "--clean-vc", R("vcb/vc.ckpt"), "--baseline",
                       R("vcb/vc.ckpt"), "--proposed", R("vcp/vc.ckpt"), "--levels", "0,20"});
  ASSERT_EQ(a.code, 0) << a.err;
  const eval::EvalReport r = eval::ReadReport(R("rep"));
  EXPECT_EQ(r.cells.size(), 6u);
  for (double level : {0.0, 20.0}) {
    int rows = 0;
    for (const auto &c : r.cells) rows += c.snr_db == level;
    EXPECT_EQ(rows, 3);
  }
  EXPECT_EQ(Call({"-q", "evaluate", "--corpus", R("c"), "--out", R("rep"), "--denoiser",
                  R("den/denoiser.ckpt")})
                .code,
            kExitUsage);
  EXPECT_EQ(Call({"-q", "evaluate", "--corpus", R("c"), "--out", R("rep"), "--denoiser",
                  R("den/denoiser.ckpt"), "--proposed", R("missing.ckpt"), "--levels", "0"})
                .code,
            kExitData);
  EXPECT_EQ(Call({"-q", "evaluate", "--corpus", R("c"), "--out", R("rep"), "--denoiser",
                  R("den/denoiser.ckpt"), "--proposed", R("vcp/vc.ckpt"), "--levels", "7"})
                .code,
            kExitData);
}

TEST_F(CliTest, ConfigFileSuppliesFlags) {
  {
    std::ofstream cfg(R("mix.ini"));
    cfg << "[mix]\ntoy=true\nseed=3\nutterances=8\nnoise-clips=8\nmin-seconds=0.4\n"
           "max-seconds=0.5\neval-levels=\"0,20\"\n";
  }
  const auto a = Call({"-q", "--config", R("mix.ini"), "mix", "--out", R("c3")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(Slurp(R("c/corpus/manifest.jsonl")), Slurp(R("c3/corpus/manifest.jsonl")));
}

}  // namespace
}  // namespace n2n::cli
