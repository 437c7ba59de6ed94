#pragma once

// CSV trace schema and locale-independent number formatting.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rssvrg {

inline constexpr std::string_view kTraceHeader = "run_id,solver,dist,seed,epoch,grad_evals,objective,gap,wall_ms";

struct TraceRow {
  std::string run_id;
  std::string solver;
  std::string dist;
  std::uint64_t seed = 0;
  int epoch = 0;
  std::uint64_t grad_evals = 0;
  double objective = 0.0;
  double gap = 0.0;
  double wall_ms = 0.0;
};

/// Shortest round-trip-safe text with at most 17 significant digits; never
/// depends on the global locale.
std::string format_double(double v);
/// Strict parse of a full field; throws InputError on trailing garbage.
double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

/// Splits on commas (fields in this schema never contain quotes or commas).
std::vector<std::string> split_csv_line(std::string_view line);

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out);
/// Validates the header exactly and every field's type.
std::vector<TraceRow> read_trace_csv(std::istream& in);

}  // namespace rssvrg
