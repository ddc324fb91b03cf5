/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/ladder.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mevhas/encoder.hpp"
#include "mevhas/gate.hpp"
#include "mevhas/metrics.hpp"
#include "mevhas/partition_map.hpp"
#include "mevhas/policy.hpp"

namespace mevhas {

namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("ladder: " + what);
}

std::string spec_id(RepresentationRole role, int width, int height, int qp) {
  std::ostringstream id;
  id << (role == RepresentationRole::kReference ? "ref" : "dep") << "_"
     << width << "x" << height << "_q" << qp;
  return id.str();
}

struct RepresentationOutcome {
  EncodeStats stats;
  double psnr_db = 0.0;
  double bitrate_bps = 0.0;
  double wall_s = 0.0;
  double start_s = 0.0;
  std::vector<PartitionRecord> records;
};

RepresentationOutcome encode_representation(
    const std::vector<LumaFrame>& source_frames, Fps fps, int qp,
    const GatingPolicy* policy, Clock::time_point run_start,
    bool keep_records) {
  RepresentationOutcome outcome;
  const auto start = Clock::now();
  outcome.start_s = std::chrono::duration<double>(start - run_start).count();

  EncoderConfig config;
  config.qp = qp;
  std::vector<LumaFrame> recon;
  recon.reserve(source_frames.size());
  for (const LumaFrame& frame : source_frames) {
    EncodeResult result = encode_frame(frame, config, policy);
    outcome.stats.mode_evaluations += result.stats.mode_evaluations;
    outcome.stats.nodes_visited += result.stats.nodes_visited;
    outcome.stats.total_bits += result.stats.total_bits;
    outcome.stats.sse += result.stats.sse;
    outcome.stats.gate_fallbacks += result.stats.gate_fallbacks;
    recon.push_back(std::move(result.recon));
    if (keep_records) {
      outcome.records.push_back(std::move(result.record));
    } else if (outcome.records.empty()) {
      outcome.records.push_back(std::move(result.record));  // frame 0 only
    }
  }
  outcome.psnr_db = psnr_frames(source_frames, recon);
  outcome.bitrate_bps = static_cast<double>(outcome.stats.total_bits) *
                        fps.to_double() /
                        static_cast<double>(source_frames.size());
  outcome.wall_s =
      std::chrono::duration<double>(Clock::now() - start).count();
  outcome.stats.wall_time = outcome.wall_s;
  return outcome;
}

}  // namespace

const char* ladder_mode_name(LadderMode mode) {
  return mode == LadderMode::kBaseline ? "baseline" : "mevhas";
}

LadderPlan plan_ladder(const VideoSequence& source, const std::vector<int>& qps,
                       LadderMode mode) {
  if (source.frames.empty()) fail("source has no frames");
  const LumaFrame& first = source.frames.front();
  if (first.width % 2 != 0 || first.height % 2 != 0) {
    std::ostringstream msg;
    msg << "source dimensions " << first.width << "x" << first.height
        << " must be even";
    fail(msg.str());
  }
  if (first.width < 16 || first.height < 16) {
    std::ostringstream msg;
    msg << "source " << first.width << "x" << first.height
        << " is below the 16x16 minimum";
    fail(msg.str());
  }
  if (qps.empty()) fail("QP list is empty");
  for (const int qp : qps) {
    if (qp < 0 || qp > 51) {
      std::ostringstream msg;
      msg << "qp " << qp << " outside [0, 51]";
      fail(msg.str());
    }
  }

  LadderPlan plan;
  plan.source = &source;
  plan.mode = mode;

  std::vector<int> dependent_qps;
  for (const int qp : qps) {
    if (std::find(dependent_qps.begin(), dependent_qps.end(), qp) ==
        dependent_qps.end()) {
      dependent_qps.push_back(qp);
    }
  }

  if (mode == LadderMode::kMevhas) {
    std::vector<int> reference_qps;
    for (const int qp : dependent_qps) {
      const int ref_qp = reference_qp_for(qp, ReferenceQpMode::kExtended);
      if (std::find(reference_qps.begin(), reference_qps.end(), ref_qp) ==
          reference_qps.end()) {
        reference_qps.push_back(ref_qp);
      }
    }
    std::sort(reference_qps.begin(), reference_qps.end(), std::greater<>());
    for (const int ref_qp : reference_qps) {
      RepresentationSpec spec;
      spec.width = first.width / 2;
      spec.height = first.height / 2;
      spec.qp = ref_qp;
      spec.role = RepresentationRole::kReference;
      spec.id = spec_id(spec.role, spec.width, spec.height, ref_qp);
      plan.representations.push_back(spec);
    }
  }
  for (const int qp : dependent_qps) {
    RepresentationSpec spec;
    spec.width = first.width;
    spec.height = first.height;
    spec.qp = qp;
    spec.role = RepresentationRole::kDependent;
    spec.id = spec_id(spec.role, spec.width, spec.height, qp);
    if (mode == LadderMode::kMevhas) {
      const int ref_qp = reference_qp_for(qp, ReferenceQpMode::kExtended);
      spec.reference_id = spec_id(RepresentationRole::kReference,
                                  first.width / 2, first.height / 2, ref_qp);
    }
    plan.representations.push_back(spec);
  }
  return plan;
}

LadderReport run_ladder(const LadderPlan& plan, int jobs) {
  if (plan.source == nullptr || plan.source->frames.empty()) {
    fail("plan has no source");
  }
  if (jobs < 1) fail("jobs must be at least 1");
  const VideoSequence& source = *plan.source;

  // Index references and check dependent links up front.
  std::map<std::string, std::size_t> reference_index;
  for (std::size_t i = 0; i < plan.representations.size(); ++i) {
    const RepresentationSpec& spec = plan.representations[i];
    if (spec.role == RepresentationRole::kReference) {
      reference_index[spec.id] = i;
    }
  }
  for (const RepresentationSpec& spec : plan.representations) {
    if (spec.role != RepresentationRole::kDependent ||
        spec.reference_id.empty()) {
      continue;
    }
    const auto it = reference_index.find(spec.reference_id);
    if (it == reference_index.end()) {
      fail("dependent " + spec.id + " names unknown reference '" +
           spec.reference_id + "'");
    }
    const RepresentationSpec& ref = plan.representations[it->second];
    if (ref.width * 2 != spec.width || ref.height * 2 != spec.height) {
      fail("dependent " + spec.id + " is not exactly twice reference " +
           ref.id);
    }
  }

  const bool needs_half = !reference_index.empty();
  std::vector<LumaFrame> half_frames;
  if (needs_half) {
    half_frames.reserve(source.frames.size());
    for (const LumaFrame& frame : source.frames) {
      half_frames.push_back(downscale_half(frame));
    }
  }

  const auto run_start = Clock::now();
  LadderReport report;
  report.mode = plan.mode;
  report.rows.resize(plan.representations.size());

  // References run first, one after the other.
  std::map<std::string, std::shared_ptr<const MapGatingPolicy>> policies;
  for (std::size_t i = 0; i < plan.representations.size(); ++i) {
    const RepresentationSpec& spec = plan.representations[i];
    if (spec.role != RepresentationRole::kReference) continue;
    try {
      RepresentationOutcome outcome = encode_representation(
          half_frames, source.fps, spec.qp, nullptr, run_start, false);
      const PartitionRecord& frame0 = outcome.records.front();
      const PartitionMap low = extract_map(frame0, frame0.frame_width,
                                           frame0.frame_height, spec.qp);
      policies[spec.id] =
          std::make_shared<const MapGatingPolicy>(interpolate_2x(low));
      RepresentationReport& row = report.rows[i];
      row.spec = spec;
      row.stats = outcome.stats;
      row.psnr_db = outcome.psnr_db;
      row.bitrate_bps = outcome.bitrate_bps;
      row.wall_s = outcome.wall_s;
      row.start_s = outcome.start_s;
    } catch (const std::exception& e) {
      fail("representation " + spec.id + ": " + e.what());
    }
  }

  // Dependents fan out once their references exist.
  std::vector<std::size_t> dependent_rows;
  for (std::size_t i = 0; i < plan.representations.size(); ++i) {
    if (plan.representations[i].role == RepresentationRole::kDependent) {
      dependent_rows.push_back(i);
    }
  }
  std::atomic<std::size_t> cursor{0};
  std::vector<std::string> errors(dependent_rows.size());
  auto worker = [&]() {
    while (true) {
      const std::size_t slot = cursor.fetch_add(1);
      if (slot >= dependent_rows.size()) break;
      const std::size_t row_index = dependent_rows[slot];
      const RepresentationSpec& spec = plan.representations[row_index];
      try {
        const GatingPolicy* policy = nullptr;
        if (!spec.reference_id.empty()) {
          policy = policies.at(spec.reference_id).get();
        }
        RepresentationOutcome outcome = encode_representation(
            source.frames, source.fps, spec.qp, policy, run_start, false);
        RepresentationReport& row = report.rows[row_index];
        row.spec = spec;
        row.stats = outcome.stats;
        row.psnr_db = outcome.psnr_db;
        row.bitrate_bps = outcome.bitrate_bps;
        row.wall_s = outcome.wall_s;
        row.start_s = outcome.start_s;
      } catch (const std::exception& e) {
        errors[slot] = "representation " + spec.id + ": " + e.what();
      }
    }
  };
  const int worker_count =
      std::max(1, std::min<int>(jobs, static_cast<int>(dependent_rows.size())));
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(worker_count);
    for (int t = 0; t < worker_count; ++t) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }
  for (const std::string& error : errors) {
    if (!error.empty()) fail(error);
  }

  for (const RepresentationReport& row : report.rows) {
    report.totals.bits += row.stats.total_bits;
    report.totals.mode_evaluations += row.stats.mode_evaluations;
    report.totals.nodes_visited += row.stats.nodes_visited;
    report.totals.gate_fallbacks += row.stats.gate_fallbacks;
    report.totals.wall_s += row.wall_s;
  }
  return report;
}

void write_report_csv(std::ostream& out, const LadderReport& report) {
  out << "id,role,width,height,qp,bits,bitrate_bps,psnr_db,mode_evals,nodes,"
         "wall_s\n";
  for (const RepresentationReport& row : report.rows) {
    out << row.spec.id << ','
        << (row.spec.role == RepresentationRole::kReference ? "reference"
                                                            : "dependent")
        << ',' << row.spec.width << ',' << row.spec.height << ','
        << row.spec.qp << ',' << row.stats.total_bits << ',' << std::fixed
        << std::setprecision(3) << row.bitrate_bps << ','
        << std::setprecision(4) << row.psnr_db << ','
        << row.stats.mode_evaluations << ',' << row.stats.nodes_visited << ','
        << std::setprecision(6) << row.wall_s << '\n';
    out.unsetf(std::ios_base::floatfield);
  }
}

void write_report_json(std::ostream& out, const LadderReport& report) {
  nlohmann::json doc;
  doc["mode"] = ladder_mode_name(report.mode);
  doc["rows"] = nlohmann::json::array();
  for (const RepresentationReport& row : report.rows) {
    nlohmann::json r;
    r["id"] = row.spec.id;
    r["role"] = row.spec.role == RepresentationRole::kReference
                    ? "reference"
                    : "dependent";
    r["width"] = row.spec.width;
    r["height"] = row.spec.height;
    r["qp"] = row.spec.qp;
    if (!row.spec.reference_id.empty()) {
      r["reference_id"] = row.spec.reference_id;
    }
    r["bits"] = row.stats.total_bits;
    r["bitrate_bps"] = row.bitrate_bps;
    r["psnr_db"] = row.psnr_db;
    r["sse"] = row.stats.sse;
    r["mode_evals"] = row.stats.mode_evaluations;
    r["nodes"] = row.stats.nodes_visited;
    r["gate_fallbacks"] = row.stats.gate_fallbacks;
    r["wall_s"] = row.wall_s;
    r["start_s"] = row.start_s;
    doc["rows"].push_back(std::move(r));
  }
  doc["totals"] = {{"bits", report.totals.bits},
                   {"mode_evals", report.totals.mode_evaluations},
                   {"nodes", report.totals.nodes_visited},
                   {"gate_fallbacks", report.totals.gate_fallbacks},
                   {"wall_s", report.totals.wall_s}};
  out << doc.dump(2) << '\n';
}

}  // namespace mevhas
