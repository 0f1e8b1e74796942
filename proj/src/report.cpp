#include "xyzmap/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>

namespace xyzmap {

namespace {

int object_rank(const std::string& object) {
  if (object == "vessel") return 0;
  if (object == "content") return 1;
  if (object == "opening") return 2;
  return 3;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string full(double v) { return fmt("%.17g", v); }
std::string pct(double v) { return fmt("%.3f", 100.0 * v); }
std::string fixed(double v) { return fmt("%.6f", v); }

std::vector<std::string> eval_columns_csv() {
  return {"mae", "mad", "max_dst", "mae_over_mad", "mae_over_maxdst", "chamfer",
          "chamfer_over_mad", "chamfer_over_maxdst", "r_squared"};
}

std::vector<std::string> eval_values_csv(const EvalReport& e) {
  return {full(e.mae), full(e.mad), full(e.max_dst), full(e.mae_over_mad),
          full(e.mae_over_maxdst), full(e.chamfer), full(e.chamfer_over_mad),
          full(e.chamfer_over_maxdst), full(e.r_squared)};
}

std::vector<std::string> seg_columns_csv() {
  return {"iou", "precision", "recall", "intersection", "union"};
}

std::vector<std::string> seg_values_csv(const SegReport& s) {
  return {full(s.iou), full(s.precision), full(s.recall), std::to_string(s.intersection),
          std::to_string(s.union_count)};
}

std::vector<std::string> eval_columns_text() {
  return {"MAE/MAD %", "MAE/MaxDst %", "Chamfer/MAD %", "Chamfer/MaxDst %", "R^2", "MAE m"};
}

std::vector<std::string> eval_values_text(const EvalReport& e) {
  return {pct(e.mae_over_mad), pct(e.mae_over_maxdst), pct(e.chamfer_over_mad),
          pct(e.chamfer_over_maxdst), fixed(e.r_squared), fixed(e.mae)};
}

std::vector<std::string> seg_columns_text() { return {"IOU %", "Precision %", "Recall %"}; }

std::vector<std::string> seg_values_text(const SegReport& s) {
  return {pct(s.iou), pct(s.precision), pct(s.recall)};
}

bool segmentation(const ReportDocument& doc) { return doc.mode == EvalMode::kSegmentation; }

}  // namespace

const char* to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::kVesselScale: return "vessel-scale";
    case EvalMode::kContentScale: return "content-scale";
    case EvalMode::kSegmentation: return "segmentation";
  }
  return "?";
}

EvalMode parse_eval_mode(std::string_view text) {
  if (text == "vessel-scale") return EvalMode::kVesselScale;
  if (text == "content-scale") return EvalMode::kContentScale;
  if (text == "segmentation") return EvalMode::kSegmentation;
  fail(ErrorCode::kInvalidArgument, "unknown eval mode '" + std::string(text) + "'");
}

const char* to_string(RowStatus status) {
  switch (status) {
    case RowStatus::kOk: return "ok";
    case RowStatus::kMissing: return "missing";
    case RowStatus::kFailed: return "failed";
  }
  return "?";
}

std::int64_t ReportDocument::count(RowStatus status) const {
  return std::count_if(rows.begin(), rows.end(),
                       [status](const ReportRow& r) { return r.status == status; });
}

void finalize(ReportDocument& doc) {
  std::stable_sort(doc.rows.begin(), doc.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.seed != b.seed) return a.seed < b.seed;
    return object_rank(a.object) < object_rank(b.object);
  });

  std::map<std::pair<int, std::string>, ReportAggregate> acc;
  for (const auto& row : doc.rows) {
    if (row.status != RowStatus::kOk) continue;
    auto& a = acc[{object_rank(row.object), row.object}];
    a.object = row.object;
    ++a.rows;
    if (row.eval) {
      if (!a.eval) a.eval = EvalReport{};
      EvalReport& s = *a.eval;
      s.mae += row.eval->mae;
      s.mad += row.eval->mad;
      s.max_dst += row.eval->max_dst;
      s.mae_over_mad += row.eval->mae_over_mad;
      s.mae_over_maxdst += row.eval->mae_over_maxdst;
      s.chamfer += row.eval->chamfer;
      s.chamfer_over_mad += row.eval->chamfer_over_mad;
      s.chamfer_over_maxdst += row.eval->chamfer_over_maxdst;
      s.r_squared += row.eval->r_squared;
    }
    if (row.seg) {
      if (!a.seg) a.seg = SegReport{};
      SegReport& s = *a.seg;
      s.iou += row.seg->iou;
      s.precision += row.seg->precision;
      s.recall += row.seg->recall;
      s.intersection += row.seg->intersection;
      s.union_count += row.seg->union_count;
    }
  }

  doc.aggregates.clear();
  for (auto& [key, a] : acc) {
    const double n = double(a.rows);
    if (a.eval) {
      EvalReport& s = *a.eval;
      s.mae /= n;
      s.mad /= n;
      s.max_dst /= n;
      s.mae_over_mad /= n;
      s.mae_over_maxdst /= n;
      s.chamfer /= n;
      s.chamfer_over_mad /= n;
      s.chamfer_over_maxdst /= n;
      s.r_squared /= n;
    }
    // Pixel counts stay summed; the ratios are per-image means.
    if (a.seg) {
      a.seg->iou /= n;
      a.seg->precision /= n;
      a.seg->recall /= n;
    }
    doc.aggregates.push_back(std::move(a));
  }
}

void write_csv(std::ostream& out, const ReportDocument& doc) {
  const bool seg = segmentation(doc);
  out << "# mode=" << to_string(doc.mode) << " tool_version=" << doc.tool_version
      << " ratios=per-image-mean\n";
  out << "seed,object,status";
  for (const auto& c : seg ? seg_columns_csv() : eval_columns_csv()) out << ',' << c;
  out << ",message\n";
  const std::size_t ncols = seg ? seg_columns_csv().size() : eval_columns_csv().size();

  auto write_values = [&](const std::optional<EvalReport>& e, const std::optional<SegReport>& s) {
    std::vector<std::string> values;
    if (seg && s) values = seg_values_csv(*s);
    if (!seg && e) values = eval_values_csv(*e);
    values.resize(ncols);
    for (const auto& v : values) out << ',' << v;
  };

  for (const auto& row : doc.rows) {
    out << row.seed << ',' << row.object << ',' << to_string(row.status);
    write_values(row.eval, row.seg);
    std::string message = row.message;
    std::replace(message.begin(), message.end(), ',', ';');
    std::replace(message.begin(), message.end(), '\n', ' ');
    out << ',' << message << '\n';
  }
  for (const auto& a : doc.aggregates) {
    out << "mean," << a.object << ",rows=" << a.rows;
    write_values(a.eval, a.seg);
    out << ",\n";
  }
}

void write_text(std::ostream& out, const ReportDocument& doc) {
  const bool seg = segmentation(doc);
  std::vector<std::string> header{"Seed", "Object", "Status"};
  for (const auto& c : seg ? seg_columns_text() : eval_columns_text()) header.push_back(c);
  const std::size_t ncols = header.size();

  std::vector<std::vector<std::string>> table;
  auto add = [&](std::string seed, const std::string& object, std::string status,
                 const std::optional<EvalReport>& e, const std::optional<SegReport>& s) {
    std::vector<std::string> line{std::move(seed), object, std::move(status)};
    std::vector<std::string> values;
    if (seg && s) values = seg_values_text(*s);
    if (!seg && e) values = eval_values_text(*e);
    line.insert(line.end(), values.begin(), values.end());
    line.resize(ncols, "-");
    table.push_back(std::move(line));
  };
  for (const auto& row : doc.rows) {
    add(std::to_string(row.seed), row.object, to_string(row.status), row.eval, row.seg);
  }
  const std::size_t separator = table.size();
  for (const auto& a : doc.aggregates) {
    add("mean", a.object, "n=" + std::to_string(a.rows), a.eval, a.seg);
  }

  std::vector<std::size_t> width(ncols);
  for (std::size_t c = 0; c < ncols; ++c) width[c] = header[c].size();
  for (const auto& line : table) {
    for (std::size_t c = 0; c < ncols; ++c) width[c] = std::max(width[c], line[c].size());
  }
  auto print = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c) out << "  ";
      const std::size_t pad = width[c] - line[c].size();
      // Text columns left-aligned, numbers right-aligned.
      if (c < 3) {
        out << line[c] << std::string(pad, ' ');
      } else {
        out << std::string(pad, ' ') << line[c];
      }
    }
    out << '\n';
  };
  std::size_t total = 0;
  for (auto w : width) total += w;
  total += 2 * (ncols - 1);

  out << "mode: " << to_string(doc.mode) << "   tool: " << doc.tool_version
      << "   ratios: per-image mean\n";
  print(header);
  out << std::string(total, '-') << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i == separator) out << std::string(total, '-') << '\n';
    print(table[i]);
  }
  for (const auto& row : doc.rows) {
    if (row.status != RowStatus::kOk) {
      out << "note: seed " << row.seed << ' ' << row.object << ": " << row.message << '\n';
    }
  }
}

}  // namespace xyzmap
