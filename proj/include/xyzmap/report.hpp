#pragma once

// Evaluation reports: one row per (seed, object), per-object aggregate means
// over the rows that were evaluated, written as CSV and as an aligned table.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xyzmap/metrics.hpp"

namespace xyzmap {

enum class EvalMode { kVesselScale, kContentScale, kSegmentation };

const char* to_string(EvalMode mode);
/// "vessel-scale", "content-scale" or "segmentation"; InvalidArgument otherwise.
EvalMode parse_eval_mode(std::string_view text);

enum class RowStatus { kOk, kMissing, kFailed };

const char* to_string(RowStatus status);

struct ReportRow {
  std::uint64_t seed = 0;
  std::string object;
  RowStatus status = RowStatus::kOk;
  std::string message;
  std::optional<EvalReport> eval;
  std::optional<SegReport> seg;
};

struct ReportAggregate {
  std::string object;
  std::int64_t rows = 0;
  std::optional<EvalReport> eval;
  std::optional<SegReport> seg;
};

struct ReportDocument {
  EvalMode mode = EvalMode::kVesselScale;
  std::string tool_version;
  std::vector<ReportRow> rows;
  std::vector<ReportAggregate> aggregates;

  std::int64_t count(RowStatus status) const;
};

/// Sorts rows by seed, then vessel, content, opening, and recomputes the
/// aggregates over kOk rows.
void finalize(ReportDocument& doc);

/// Machine table: full-precision values, ratios as fractions.
void write_csv(std::ostream& out, const ReportDocument& doc);
/// Human table: ratios as percentages.
void write_text(std::ostream& out, const ReportDocument& doc);

}  // namespace xyzmap
