/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_LADDER_HPP_
#define MEVHAS_LADDER_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "mevhas/block.hpp"
#include "mevhas/frame.hpp"

namespace mevhas {

enum class RepresentationRole { kReference, kDependent };
enum class LadderMode { kBaseline, kMevhas };

const char* ladder_mode_name(LadderMode mode);

struct RepresentationSpec {
  std::string id;
  int width = 0;
  int height = 0;
  int qp = 0;
  RepresentationRole role = RepresentationRole::kDependent;
  std::string reference_id;  // empty for references and in baseline mode
};

// Dependency-ordered encode set over one source: references first, then the
// dependents they guide.
struct LadderPlan {
  const VideoSequence* source = nullptr;  // not owned
  LadderMode mode = LadderMode::kBaseline;
  std::vector<RepresentationSpec> representations;
};

struct RepresentationReport {
  RepresentationSpec spec;
  EncodeStats stats;       // summed over frames
  double psnr_db = 0.0;
  double bitrate_bps = 0.0;
  double wall_s = 0.0;
  double start_s = 0.0;    // offset from the start of the run
};

struct LadderTotals {
  std::int64_t bits = 0;
  std::uint64_t mode_evaluations = 0;
  std::uint64_t nodes_visited = 0;
  std::uint64_t gate_fallbacks = 0;
  double wall_s = 0.0;
};

struct LadderReport {
  LadderMode mode = LadderMode::kBaseline;
  std::vector<RepresentationReport> rows;  // plan order
  LadderTotals totals;
};

// Baseline mode plans only full-resolution dependents; mevhas mode adds the
// half-resolution references required by the reference-QP rule (the ladder
// set {27, 32, 37, 42} yields references at QP 37 and 32).
LadderPlan plan_ladder(const VideoSequence& source, const std::vector<int>& qps,
                       LadderMode mode);

// Encodes the plan: references sequentially without gating on the
// half-resolution source, then dependents bound to their reference's
// interpolated frame-0 partition map (mevhas) or ungated (baseline). With
// jobs > 1 dependents fan out across threads once every reference is done;
// everything except the timing fields stays identical.
LadderReport run_ladder(const LadderPlan& plan, int jobs = 1);

// CSV with the stable column set
// id,role,width,height,qp,bits,bitrate_bps,psnr_db,mode_evals,nodes,wall_s.
void write_report_csv(std::ostream& out, const LadderReport& report);

// JSON object with rows (including start offsets) and totals.
void write_report_json(std::ostream& out, const LadderReport& report);

}  // namespace mevhas

#endif  // MEVHAS_LADDER_HPP_
