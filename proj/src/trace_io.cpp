#include "rssvrg/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "rssvrg/errors.hpp"

namespace rssvrg {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InputError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InputError("not a non-negative integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    out << r.run_id << ',' << r.solver << ',' << r.dist << ',' << std::to_string(r.seed) << ','
        << std::to_string(r.epoch) << ',' << std::to_string(r.grad_evals) << ',' << format_double(r.objective) << ','
        << format_double(r.gap) << ',' << format_double(r.wall_ms) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("trace CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw InputError("trace CSV header mismatch: '" + line + "'");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw InputError("trace CSV line " + std::to_string(lineno) + ": expected 9 fields");
    TraceRow r;
    r.run_id = f[0];
    r.solver = f[1];
    r.dist = f[2];
    r.seed = parse_uint(f[3]);
    r.epoch = static_cast<int>(parse_uint(f[4]));
    r.grad_evals = parse_uint(f[5]);
    r.objective = parse_double(f[6]);
    r.gap = parse_double(f[7]);
    r.wall_ms = parse_double(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace rssvrg
