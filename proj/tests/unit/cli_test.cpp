// Copyright 2026 The satdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <string>

#include "oracles.hpp"

#ifdef SATDETECT_CLI_PATH

namespace satdetect {
namespace {

using testing::TempDir;

struct Outcome {
  int exit_code = -1;
  std::string out;
};

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(SATDETECT_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli("").exit_code, 1);
  EXPECT_EQ(run_cli("no-such-command").exit_code, 1);
  EXPECT_EQ(run_cli("run --no-such-flag").exit_code, 1);
  EXPECT_EQ(run_cli("run --set not_a_key=1 --corpus x").exit_code, 1);
  EXPECT_EQ(run_cli("run --min-df 0.9 --corpus x").exit_code, 1);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run_cli("--help").exit_code, 0); }

TEST(Cli, DataErrorsExitTwo) {
  TempDir dir;
  const auto out = (dir / "out").string();
  EXPECT_EQ(run_cli("build-vocab --corpus " + (dir / "missing.jsonl").string() + " --out-dir " + out).exit_code, 2);
  EXPECT_EQ(run_cli("predict --manifest " + out).exit_code, 2);
  EXPECT_EQ(run_cli("balance --corpus " + (dir / "missing.jsonl").string()).exit_code, 2);
}

TEST(Cli, SynthAndBalance) {
  TempDir dir;
  const auto corpus = (dir / "c.jsonl").string();
  ASSERT_EQ(run_cli("synth --out " + corpus + " --documents 40").exit_code, 0);
  const auto r = run_cli("balance --corpus " + corpus);
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["documents"], 40);
  EXPECT_EQ(j["satire"], 20);
  EXPECT_EQ(j["real"], 20);
}

TEST(Cli, EndToEndRunPredictEval) {
  TempDir dir;
  const auto corpus = (dir / "c.jsonl").string();
  const auto out = (dir / "out").string();
  ASSERT_EQ(run_cli("synth --out " + corpus + " --documents 80").exit_code, 0);
  const auto run = run_cli("-q run --corpus " + corpus + " --out-dir " + out + " --epochs 1 --max-terms 30");
  ASSERT_EQ(run.exit_code, 0);
  EXPECT_NE(run.out.find("accuracy"), std::string::npos);

  testing::write_file(dir / "in.jsonl", "{\"id\": \"a\", \"text\": \"sat0001 sat0002\"}\n{\"text\": \"\"}\n");
  const auto pred = run_cli("predict --manifest " + out + " --input " + (dir / "in.jsonl").string());
  ASSERT_EQ(pred.exit_code, 0);
  EXPECT_EQ(std::count(pred.out.begin(), pred.out.end(), '\n'), 2);

  const auto eval = run_cli("eval --manifest " + out + " --corpus " + corpus);
  ASSERT_EQ(eval.exit_code, 0);
  EXPECT_NE(eval.out.find("true SATIRE"), std::string::npos);

  // A later stage rerun needs only the output directory.
  EXPECT_EQ(run_cli("-q report --out-dir " + out).exit_code, 0);

  testing::write_file(dir / "bad.jsonl", "{\"text\": \"ok\"}\nnot json\n");
  EXPECT_EQ(run_cli("predict --manifest " + out + " --input " + (dir / "bad.jsonl").string()).exit_code, 2);
}

}  // namespace
}  // namespace satdetect

#endif
