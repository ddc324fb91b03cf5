/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "mevhas/partition_map.hpp"
#include "mevhas/y4m.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class Workspace {
 public:
  Workspace() {
    dir_ = fs::temp_directory_path() /
           ("mevhas_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  const fs::path& dir() const { return dir_; }
  fs::path path(const std::string& name) const { return dir_ / name; }

  CmdResult run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(MEVHAS_CLI_PATH) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CmdResult result;
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
  }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

fs::path write_clip(const Workspace& ws, const std::string& name, int w,
                    int h, int frames, const char* kind,
                    std::uint64_t seed = 1) {
  const fs::path path = ws.path(name);
  mevhas::write_y4m_file(mevhas::test::make_clip(w, h, frames, kind, seed),
                         path.string());
  return path;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("help exits zero, bad usage exits two") {
  Workspace ws;
  CHECK(ws.run("--help").exit_code == 0);
  CHECK(ws.run("encode --help").exit_code == 0);
  CHECK(ws.run("bogus-subcommand").exit_code == 2);
  CHECK(ws.run("encode --no-such-flag x").exit_code == 2);
  CHECK(ws.run("encode").exit_code == 2);  // missing required flags
  CHECK(ws.run("encode --input a.y4m --qp 99").exit_code == 2);
}

TEST_CASE("encode writes stats and record") {
  Workspace ws;
  const fs::path clip = write_clip(ws, "in.y4m", 64, 64, 2, "mixed");
  const CmdResult r = ws.run("encode --input " + clip.string() +
                             " --qp 32 --out-stats " +
                             ws.path("stats.json").string() +
                             " --out-record " + ws.path("rec.jsonl").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("bits=") != std::string::npos);

  const json stats = json::parse(slurp(ws.path("stats.json")));
  CHECK(stats["mode_evaluations"].get<std::uint64_t>() > 0);
  CHECK(stats["total_bits"].get<std::int64_t>() > 0);

  std::istringstream record(slurp(ws.path("rec.jsonl")));
  std::string line;
  int lines = 0;
  while (std::getline(record, line)) {
    const json cu = json::parse(line);
    CHECK(cu.contains("frame"));
    CHECK(cu.contains("w"));
    ++lines;
  }
  CHECK(lines >= 2);  // at least one CU per frame
}

TEST_CASE("a map that does not cover the frame names both geometries") {
  Workspace ws;
  const fs::path clip = write_clip(ws, "in.y4m", 256, 128, 1, "mixed");
  mevhas::PartitionMap small;
  small.frame_width = small.frame_height = 128;
  small.cells.assign(256, mevhas::CuSize{128, 128});
  mevhas::write_map_file(ws.path("small.mevhasmap").string(), small);

  const CmdResult r =
      ws.run("encode --input " + clip.string() + " --qp 32 --map " +
             ws.path("small.mevhasmap").string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("128x128") != std::string::npos);
  CHECK(r.err.find("256x128") != std::string::npos);
}

TEST_CASE("a covering map reduces the searched modes") {
  Workspace ws;
  const fs::path clip = write_clip(ws, "in.y4m", 256, 128, 1, "noise", 3);
  mevhas::PartitionMap map;
  map.frame_width = map.frame_height = 256;
  map.cells.assign(static_cast<std::size_t>(32) * 32,
                   mevhas::CuSize{128, 128});
  mevhas::write_map_file(ws.path("full.mevhasmap").string(), map);

  const CmdResult plain =
      ws.run("encode --input " + clip.string() + " --qp 32 --out-stats " +
             ws.path("plain.json").string());
  const CmdResult gated =
      ws.run("encode --input " + clip.string() + " --qp 32 --map " +
             ws.path("full.mevhasmap").string() + " --out-stats " +
             ws.path("gated.json").string());
  REQUIRE(plain.exit_code == 0);
  REQUIRE(gated.exit_code == 0);
  const json a = json::parse(slurp(ws.path("plain.json")));
  const json b = json::parse(slurp(ws.path("gated.json")));
  CHECK(b["mode_evaluations"].get<std::uint64_t>() <
        a["mode_evaluations"].get<std::uint64_t>());
}

TEST_CASE("repeated encodes differ only in wall time") {
  Workspace ws;
  const fs::path clip = write_clip(ws, "in.y4m", 64, 64, 2, "mixed", 8);
  const std::string base = "encode --input " + clip.string() + " --qp 37";
  REQUIRE(ws.run(base + " --out-stats " + ws.path("a.json").string() +
                 " --out-record " + ws.path("a.jsonl").string())
              .exit_code == 0);
  REQUIRE(ws.run(base + " --out-stats " + ws.path("b.json").string() +
                 " --out-record " + ws.path("b.jsonl").string())
              .exit_code == 0);
  json a = json::parse(slurp(ws.path("a.json")));
  json b = json::parse(slurp(ws.path("b.json")));
  a.erase("wall_time");
  b.erase("wall_time");
  CHECK(a == b);
  CHECK(slurp(ws.path("a.jsonl")) == slurp(ws.path("b.jsonl")));
}

TEST_CASE("ladder both writes reports and a comparison") {
  Workspace ws;
  const fs::path clip = write_clip(ws, "in.y4m", 64, 32, 2, "mixed", 4);
  const fs::path out = ws.path("out");
  const CmdResult r = ws.run("ladder --input " + clip.string() + " --out " +
                             out.string() + " --mode both");
  REQUIRE(r.exit_code == 0);
  for (const char* name :
       {"baseline.csv", "baseline.json", "mevhas.csv", "mevhas.json",
        "comparison.json"}) {
    CHECK(fs::exists(out / name));
  }

  const json mevhas_report = json::parse(slurp(out / "mevhas.json"));
  int references = 0;
  for (const auto& row : mevhas_report["rows"]) {
    if (row["role"] == "reference") {
      ++references;
      CHECK(row["width"] == 32);
      CHECK(row["height"] == 16);
      const int qp = row["qp"].get<int>();
      CHECK((qp == 37 || qp == 32));
    }
  }
  CHECK(references == 2);

  const json comparison = json::parse(slurp(out / "comparison.json"));
  CHECK(comparison["per_qp"].size() == 4);
  CHECK(comparison.contains("bd"));
  for (const auto& row : comparison["per_qp"]) {
    CHECK(row.contains("delta_wall_s"));
    CHECK(row.contains("delta_bits"));
    CHECK(row.contains("delta_psnr_db"));
  }
}

TEST_CASE("constant content compares as all zeros") {
  Workspace ws;
  const fs::path clip = write_clip(ws, "flat.y4m", 64, 32, 2, "constant");
  const fs::path out = ws.path("out");
  REQUIRE(ws.run("ladder --input " + clip.string() + " --out " +
                 out.string() + " --mode both")
              .exit_code == 0);
  const json comparison = json::parse(slurp(out / "comparison.json"));
  CHECK(comparison["bd"]["bd_rate_percent"].get<double>() == 0.0);
  CHECK(comparison["bd"]["bd_time_percent"].get<double>() == 0.0);
}

TEST_CASE("bd fixtures print two-decimal values") {
  Workspace ws;
  write_file(ws.path("anchor.csv"),
             "1000,30\n2000,33.5\n4200,36.9\n9500,41.2\n");
  write_file(ws.path("shift.csv"),
             "1100,30\n2200,33.5\n4620,36.9\n10450,41.2\n");
  CmdResult r = ws.run("bd --anchor " + ws.path("anchor.csv").string() +
                       " --test " + ws.path("anchor.csv").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "0.00\n");

  r = ws.run("bd --anchor " + ws.path("anchor.csv").string() + " --test " +
             ws.path("shift.csv").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "10.00\n");

  // Halved encode times at equal quality.
  write_file(ws.path("t_anchor.csv"), "100,30\n140,33.5\n200,36.9\n320,41.2\n");
  write_file(ws.path("t_fast.csv"), "50,30\n70,33.5\n100,36.9\n160,41.2\n");
  r = ws.run("bd --kind time --anchor " + ws.path("t_anchor.csv").string() +
             " --test " + ws.path("t_fast.csv").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "50.00\n");

  CmdResult bad = ws.run("bd --anchor " + ws.path("anchor.csv").string() +
                         " --test " + ws.path("nonexistent.csv").string());
  CHECK(bad.exit_code == 2);
  write_file(ws.path("broken.csv"), "not,a number\n");
  bad = ws.run("bd --anchor " + ws.path("anchor.csv").string() + " --test " +
               ws.path("broken.csv").string());
  CHECK(bad.exit_code == 2);
}

TEST_CASE("the combined summary formats like the report table") {
  Workspace ws;
  // Rates shifted by exactly 1.0211x and times by 0.8327x.
  std::ostringstream anchor_rate, test_rate, anchor_time, test_time;
  const double rates[] = {1000, 2000, 4200, 9500};
  const double times[] = {100, 140, 200, 320};
  const double qualities[] = {30, 33.5, 36.9, 41.2};
  for (int i = 0; i < 4; ++i) {
    anchor_rate << rates[i] << ',' << qualities[i] << '\n';
    test_rate << rates[i] * 1.0211 << ',' << qualities[i] << '\n';
    anchor_time << times[i] << ',' << qualities[i] << '\n';
    test_time << times[i] * 0.8327 << ',' << qualities[i] << '\n';
  }
  write_file(ws.path("ar.csv"), anchor_rate.str());
  write_file(ws.path("tr.csv"), test_rate.str());
  write_file(ws.path("at.csv"), anchor_time.str());
  write_file(ws.path("tt.csv"), test_time.str());
  const CmdResult r = ws.run(
      "bd --anchor " + ws.path("ar.csv").string() + " --test " +
      ws.path("tr.csv").string() + " --anchor-time " +
      ws.path("at.csv").string() + " --test-time " + ws.path("tt.csv").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "BDT 16.73 | BDBR 2.11 | BDBR/BDT 0.13\n");
}

TEST_CASE("complexity prints four-decimal features and matching JSON") {
  Workspace ws;
  const fs::path flat = write_clip(ws, "flat.y4m", 64, 64, 2, "constant");
  CmdResult r = ws.run("complexity --input " + flat.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("E 0.0000\n") != std::string::npos);
  CHECK(r.out.find("h 0.0000\n") != std::string::npos);

  // Static textured clip: energy without temporal change.
  mevhas::VideoSequence still;
  const mevhas::LumaFrame textured = mevhas::test::noise_frame(64, 64, 11);
  still.frames = {textured, textured, textured};
  mevhas::write_y4m_file(still, ws.path("still.y4m").string());
  r = ws.run("complexity --input " + ws.path("still.y4m").string() +
             " --out-json " + ws.path("features.json").string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("h 0.0000\n") != std::string::npos);

  const json features = json::parse(slurp(ws.path("features.json")));
  CHECK(features["E"].get<double>() > 0.0);
  CHECK(features["h"].get<double>() == 0.0);

  // The printed text and the JSON agree to the printed precision.
  std::istringstream lines(r.out);
  std::string label;
  double printed_e = 0.0, printed_h = 0.0;
  lines >> label >> printed_e >> label >> printed_h;
  CHECK(std::abs(printed_e - features["E"].get<double>()) < 5e-5);
  CHECK(std::abs(printed_h - features["h"].get<double>()) < 5e-5);
}
