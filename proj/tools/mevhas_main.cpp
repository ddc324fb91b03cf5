/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "mevhas/encoder.hpp"
#include "mevhas/ladder.hpp"
#include "mevhas/metrics.hpp"
#include "mevhas/partition_map.hpp"
#include "mevhas/policy.hpp"
#include "mevhas/y4m.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProcessing = 1;
constexpr int kExitUsage = 2;

std::string format_fixed(double value, int decimals) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(decimals) << value;
  return out.str();
}

std::vector<mevhas::RdCurvePoint> load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  return mevhas::read_curve_csv(in);
}

struct EncodeArgs {
  std::string input;
  int qp = 32;
  std::string map_path;
  std::string out_stats;
  std::string out_record;
  std::string out_maps;  // stem for <stem>.f<index>.mevhasmap
};

int run_encode(const EncodeArgs& args) {
  const mevhas::VideoSequence sequence = mevhas::read_y4m_file(args.input);
  mevhas::EncoderConfig config;
  config.qp = args.qp;

  std::optional<mevhas::MapGatingPolicy> policy;
  if (!args.map_path.empty()) {
    policy.emplace(mevhas::read_map_file(args.map_path));
  }

  mevhas::EncodeStats totals;
  std::vector<mevhas::LumaFrame> recon;
  std::ofstream record_out;
  if (!args.out_record.empty()) {
    record_out.open(args.out_record, std::ios::binary);
    if (!record_out) {
      throw std::runtime_error("cannot open '" + args.out_record +
                               "' for writing");
    }
  }
  for (std::size_t f = 0; f < sequence.frames.size(); ++f) {
    mevhas::EncodeResult result = mevhas::encode_frame(
        sequence.frames[f], config, policy ? &*policy : nullptr);
    totals.mode_evaluations += result.stats.mode_evaluations;
    totals.nodes_visited += result.stats.nodes_visited;
    totals.total_bits += result.stats.total_bits;
    totals.sse += result.stats.sse;
    totals.gate_fallbacks += result.stats.gate_fallbacks;
    totals.wall_time += result.stats.wall_time;
    if (record_out.is_open()) {
      mevhas::write_record_jsonl(record_out, result.record,
                                 static_cast<int>(f));
    }
    if (!args.out_maps.empty()) {
      // Interpolated per-frame maps, ready to gate an encode at twice this
      // resolution.
      const mevhas::PartitionMap low = mevhas::extract_map(
          result.record, result.record.frame_width,
          result.record.frame_height, args.qp);
      mevhas::write_map_file(
          args.out_maps + ".f" + std::to_string(f) + ".mevhasmap",
          mevhas::interpolate_2x(low));
    }
    recon.push_back(std::move(result.recon));
  }
  if (!args.out_stats.empty()) {
    std::ofstream stats_out(args.out_stats, std::ios::binary);
    if (!stats_out) {
      throw std::runtime_error("cannot open '" + args.out_stats +
                               "' for writing");
    }
    mevhas::write_stats_json(stats_out, totals);
  }
  const double quality = mevhas::psnr_frames(sequence.frames, recon);
  std::cout << "frames=" << sequence.frames.size()
            << " bits=" << totals.total_bits << " sse=" << totals.sse
            << " psnr_db=" << format_fixed(quality, 4)
            << " mode_evals=" << totals.mode_evaluations
            << " nodes=" << totals.nodes_visited
            << " gate_fallbacks=" << totals.gate_fallbacks
            << " wall_s=" << format_fixed(totals.wall_time, 6) << "\n";
  return kExitOk;
}

struct LadderArgs {
  std::string input;
  std::vector<int> qps{27, 32, 37, 42};
  std::string mode = "both";
  std::string out_dir;
  int jobs = 1;
};

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  out << text;
}

void write_ladder_outputs(const std::filesystem::path& dir,
                          const mevhas::LadderReport& report) {
  const std::string mode = mevhas::ladder_mode_name(report.mode);
  std::ostringstream csv;
  mevhas::write_report_csv(csv, report);
  write_text_file(dir / (mode + ".csv"), csv.str());
  std::ostringstream json;
  mevhas::write_report_json(json, report);
  write_text_file(dir / (mode + ".json"), json.str());
}

const mevhas::RepresentationReport* find_dependent(
    const mevhas::LadderReport& report, int qp) {
  for (const auto& row : report.rows) {
    if (row.spec.role == mevhas::RepresentationRole::kDependent &&
        row.spec.qp == qp) {
      return &row;
    }
  }
  return nullptr;
}

nlohmann::json make_comparison(const mevhas::LadderReport& baseline,
                               const mevhas::LadderReport& mevhas_report,
                               const std::vector<int>& qps) {
  nlohmann::json doc;
  doc["anchor"] = "baseline";
  doc["test"] = "mevhas";
  doc["per_qp"] = nlohmann::json::array();

  std::vector<mevhas::RdCurvePoint> anchor_rate, test_rate;
  std::vector<mevhas::RdCurvePoint> anchor_time, test_time;
  for (const int qp : qps) {
    const auto* base = find_dependent(baseline, qp);
    const auto* test = find_dependent(mevhas_report, qp);
    if (base == nullptr || test == nullptr) continue;
    nlohmann::json row;
    row["qp"] = qp;
    row["baseline_wall_s"] = base->wall_s;
    row["mevhas_wall_s"] = test->wall_s;
    row["delta_wall_s"] = test->wall_s - base->wall_s;
    row["baseline_bits"] = base->stats.total_bits;
    row["mevhas_bits"] = test->stats.total_bits;
    row["delta_bits"] = test->stats.total_bits - base->stats.total_bits;
    row["baseline_psnr_db"] = base->psnr_db;
    row["mevhas_psnr_db"] = test->psnr_db;
    row["delta_psnr_db"] = test->psnr_db - base->psnr_db;
    row["baseline_mode_evals"] = base->stats.mode_evaluations;
    row["mevhas_mode_evals"] = test->stats.mode_evaluations;
    doc["per_qp"].push_back(std::move(row));

    anchor_rate.push_back({base->bitrate_bps, base->psnr_db});
    test_rate.push_back({test->bitrate_bps, test->psnr_db});
    anchor_time.push_back({base->wall_s, base->psnr_db});
    test_time.push_back({test->wall_s, test->psnr_db});
  }

  // Bit-identical dependent outputs mean the gate changed nothing; the
  // deltas are zero by definition and the time noise carries no signal.
  bool outputs_identical = !anchor_rate.empty();
  for (std::size_t i = 0; i < anchor_rate.size(); ++i) {
    if (anchor_rate[i].rate != test_rate[i].rate ||
        anchor_rate[i].quality != test_rate[i].quality) {
      outputs_identical = false;
      break;
    }
  }

  nlohmann::json bd;
  std::optional<double> bdbr, bdt;
  if (outputs_identical) {
    bdbr = 0.0;
    bdt = 0.0;
    bd["bd_rate_percent"] = 0.0;
    bd["bd_time_percent"] = 0.0;
  } else {
    try {
      bdbr = mevhas::bd_rate(anchor_rate, test_rate);
      bd["bd_rate_percent"] = *bdbr;
    } catch (const std::exception& e) {
      bd["bd_rate_percent"] = nullptr;
      bd["bd_rate_error"] = e.what();
    }
    try {
      bdt = mevhas::bd_time(anchor_time, test_time);
      bd["bd_time_percent"] = *bdt;
    } catch (const std::exception& e) {
      bd["bd_time_percent"] = nullptr;
      bd["bd_time_error"] = e.what();
    }
  }
  if (bdbr && bdt && *bdt != 0.0) {
    bd["efficiency_ratio"] = mevhas::efficiency_ratio(*bdbr, *bdt);
  } else {
    bd["efficiency_ratio"] = nullptr;
  }
  doc["bd"] = std::move(bd);
  return doc;
}

int run_ladder_cmd(const LadderArgs& args) {
  if (args.mode != "both" && args.mode != "baseline" &&
      args.mode != "mevhas") {
    throw std::runtime_error("mode must be both, baseline or mevhas");
  }
  const mevhas::VideoSequence sequence = mevhas::read_y4m_file(args.input);
  const std::filesystem::path out_dir(args.out_dir);
  std::filesystem::create_directories(out_dir);

  std::optional<mevhas::LadderReport> baseline, accelerated;
  if (args.mode == "both" || args.mode == "baseline") {
    const mevhas::LadderPlan plan =
        mevhas::plan_ladder(sequence, args.qps, mevhas::LadderMode::kBaseline);
    baseline = mevhas::run_ladder(plan, args.jobs);
    write_ladder_outputs(out_dir, *baseline);
  }
  if (args.mode == "both" || args.mode == "mevhas") {
    const mevhas::LadderPlan plan =
        mevhas::plan_ladder(sequence, args.qps, mevhas::LadderMode::kMevhas);
    accelerated = mevhas::run_ladder(plan, args.jobs);
    write_ladder_outputs(out_dir, *accelerated);
  }
  if (baseline && accelerated) {
    const nlohmann::json comparison =
        make_comparison(*baseline, *accelerated, args.qps);
    write_text_file(out_dir / "comparison.json", comparison.dump(2) + "\n");
  }
  std::cout << "reports written to " << out_dir.string() << "\n";
  return kExitOk;
}

struct BdArgs {
  std::string anchor;
  std::string test;
  std::string kind = "rate";
  std::string anchor_time;
  std::string test_time;
  std::string out_json;
};

int run_bd(const BdArgs& args) {
  const bool combined = !args.anchor_time.empty() || !args.test_time.empty();
  if (combined && (args.anchor_time.empty() || args.test_time.empty())) {
    std::cerr << "error: --anchor-time and --test-time go together\n";
    return kExitUsage;
  }

  std::vector<mevhas::RdCurvePoint> anchor, test, anchor_time, test_time;
  try {
    anchor = load_curve(args.anchor);
    test = load_curve(args.test);
    if (combined) {
      anchor_time = load_curve(args.anchor_time);
      test_time = load_curve(args.test_time);
    }
  } catch (const std::exception& e) {
    // Unreadable or malformed curve files are operator mistakes.
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  nlohmann::json doc;
  if (combined) {
    const double bdbr = mevhas::bd_rate(anchor, test);
    const double bdt = mevhas::bd_time(anchor_time, test_time);
    std::cout << "BDT " << format_fixed(bdt, 2) << " | BDBR "
              << format_fixed(bdbr, 2) << " | BDBR/BDT "
              << format_fixed(mevhas::efficiency_ratio(bdbr, bdt), 2) << "\n";
    doc["bd_time_percent"] = bdt;
    doc["bd_rate_percent"] = bdbr;
    doc["efficiency_ratio"] = mevhas::efficiency_ratio(bdbr, bdt);
  } else {
    const double value = args.kind == "time" ? mevhas::bd_time(anchor, test)
                                             : mevhas::bd_rate(anchor, test);
    std::cout << format_fixed(value, 2) << "\n";
    doc[args.kind == "time" ? "bd_time_percent" : "bd_rate_percent"] = value;
  }
  if (!args.out_json.empty()) {
    write_text_file(args.out_json, doc.dump(2) + "\n");
  }
  return kExitOk;
}

struct ComplexityArgs {
  std::string input;
  std::string out_json;
};

int run_complexity(const ComplexityArgs& args) {
  const mevhas::VideoSequence sequence = mevhas::read_y4m_file(args.input);
  const mevhas::ComplexityFeatures features =
      mevhas::complexity_features(sequence);
  std::cout << "E " << format_fixed(features.E, 4) << "\n"
            << "h " << format_fixed(features.h, 4) << "\n";
  nlohmann::json doc;
  doc["E"] = features.E;
  doc["h"] = features.h;
  if (!args.out_json.empty()) {
    write_text_file(args.out_json, doc.dump(2) + "\n");
  } else {
    std::cout << doc.dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-resolution encoding testbed"};
  app.require_subcommand(1);

  EncodeArgs encode_args;
  CLI::App* encode = app.add_subcommand(
      "encode", "Encode one representation from a Y4M file");
  encode->add_option("--input", encode_args.input, "Y4M input file")
      ->required();
  encode->add_option("--qp", encode_args.qp, "quantization parameter")
      ->required()
      ->check(CLI::Range(0, 51));
  encode->add_option("--map", encode_args.map_path,
                     "MEVHASMAP file enabling gated search");
  encode->add_option("--out-stats", encode_args.out_stats,
                     "write encode stats JSON here");
  encode->add_option("--out-record", encode_args.out_record,
                     "write the CU record (JSON lines) here");
  encode->add_option(
      "--out-maps", encode_args.out_maps,
      "stem for interpolated per-frame maps (<stem>.f<n>.mevhasmap)");

  LadderArgs ladder_args;
  CLI::App* ladder = app.add_subcommand(
      "ladder", "Run a bitrate ladder in baseline and/or accelerated mode");
  ladder->add_option("--input", ladder_args.input, "Y4M input file")
      ->required();
  ladder
      ->add_option("--qps", ladder_args.qps,
                   "dependent QPs (default 27,32,37,42)")
      ->delimiter(',');
  ladder->add_option("--mode", ladder_args.mode,
                     "both | baseline | mevhas (default both)");
  ladder->add_option("--out", ladder_args.out_dir, "output directory")
      ->required();
  ladder
      ->add_option("--jobs", ladder_args.jobs,
                   "parallel dependent encodes (default 1)")
      ->check(CLI::Range(1, 64));

  BdArgs bd_args;
  CLI::App* bd = app.add_subcommand(
      "bd", "Bjontegaard delta between two 4-point curves");
  bd->add_option("--anchor", bd_args.anchor, "anchor curve CSV (rate,psnr)")
      ->required();
  bd->add_option("--test", bd_args.test, "test curve CSV (rate,psnr)")
      ->required();
  bd->add_option("--kind", bd_args.kind, "rate | time (default rate)");
  bd->add_option("--anchor-time", bd_args.anchor_time,
                 "anchor time curve CSV; prints the combined summary");
  bd->add_option("--test-time", bd_args.test_time,
                 "test time curve CSV; prints the combined summary");
  bd->add_option("--out-json", bd_args.out_json,
                 "write the machine-readable result here");

  ComplexityArgs complexity_args;
  CLI::App* complexity = app.add_subcommand(
      "complexity", "Spatial/temporal complexity features of a clip");
  complexity->add_option("--input", complexity_args.input, "Y4M input file")
      ->required();
  complexity->add_option("--out-json", complexity_args.out_json,
                         "write the features JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (encode->parsed()) return run_encode(encode_args);
    if (ladder->parsed()) return run_ladder_cmd(ladder_args);
    if (bd->parsed()) return run_bd(bd_args);
    if (complexity->parsed()) return run_complexity(complexity_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitUsage;
}
