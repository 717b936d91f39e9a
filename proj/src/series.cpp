#include "tsph/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "tsph/error.hpp"

namespace tsph {

TimeSeries::TimeSeries(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) {
    throw ValidationError("times and values differ in length");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || !std::isfinite(times_[i])) {
      throw ValidationError("non-finite sample at index " + std::to_string(i));
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw ValidationError("times not strictly increasing at index " +
                            std::to_string(i));
    }
  }
}

TimeSeries TimeSeries::from_values(std::vector<double> values) {
  std::vector<double> times(values.size());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i);
  return TimeSeries(std::move(times), std::move(values));
}

std::vector<CriticalPoint> CriticalSequence::interior() const {
  if (points.size() <= 2) return {};
  return {points.begin() + 1, points.end() - 1};
}

namespace {

struct Run {
  std::size_t first;
  std::size_t last;
};

// Maximal runs of equal consecutive values.
std::vector<Run> plateau_runs(const std::vector<double>& v) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (runs.empty() || v[i] != v[runs.back().last]) {
      runs.push_back({i, i});
    } else {
      runs.back().last = i;
    }
  }
  return runs;
}

// Extrema over plateau runs, without the genericity check. Each entry
// carries the index of its run.
std::vector<std::pair<CriticalPoint, std::size_t>> raw_extrema(
    const TimeSeries& series) {
  const auto& v = series.values();
  const auto runs = plateau_runs(v);
  if (runs.size() < 2) {
    throw ConstantSeriesError("constant series has no critical structure");
  }
  std::vector<std::pair<CriticalPoint, std::size_t>> out;
  auto emit = [&](std::size_t r, ExtremumKind kind, bool boundary) {
    const std::size_t i = runs[r].first;
    out.push_back({{i, series.time(i), v[i], kind, boundary}, r});
  };
  const std::size_t n = runs.size();
  emit(0, v[runs[1].first] > v[runs[0].first] ? ExtremumKind::kMin : ExtremumKind::kMax,
       true);
  for (std::size_t r = 1; r + 1 < n; ++r) {
    const double here = v[runs[r].first];
    const double prev = v[runs[r - 1].first];
    const double next = v[runs[r + 1].first];
    if (prev < here && next < here) emit(r, ExtremumKind::kMax, false);
    if (prev > here && next > here) emit(r, ExtremumKind::kMin, false);
  }
  emit(n - 1,
       v[runs[n - 2].first] < v[runs[n - 1].first] ? ExtremumKind::kMax
                                                    : ExtremumKind::kMin,
       true);
  return out;
}

bool distinct_values(const std::vector<std::pair<CriticalPoint, std::size_t>>& ext) {
  std::vector<double> vals;
  vals.reserve(ext.size());
  for (const auto& [p, r] : ext) vals.push_back(p.value);
  std::sort(vals.begin(), vals.end());
  return std::adjacent_find(vals.begin(), vals.end()) == vals.end();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

TimeSeries parse_csv(const std::string& text, CsvColumns columns) {
  if (columns.value < 0) throw ValidationError("value column must be non-negative");
  std::string_view rest(text);
  if (rest.starts_with("\xEF\xBB\xBF")) rest.remove_prefix(3);

  std::vector<double> times;
  std::vector<double> values;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    const int needed = std::max(columns.time, columns.value);
    double t = static_cast<double>(values.size());
    double v = 0.0;
    const bool ok = static_cast<int>(fields.size()) > needed &&
                    (columns.time < 0 || parse_double(fields[columns.time], t)) &&
                    parse_double(fields[columns.value], v);
    if (!ok) {
      if (!seen_content) {  // header row
        seen_content = true;
        continue;
      }
      throw ParseError("malformed CSV row at line " + std::to_string(line_no) +
                       ": '" + std::string(line) + "'");
    }
    seen_content = true;
    times.push_back(t);
    values.push_back(v);
  }
  if (values.size() < 2) throw ValidationError("a series needs at least two rows");
  return TimeSeries(std::move(times), std::move(values));
}

TimeSeries load_csv(const std::filesystem::path& path, CsvColumns columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), columns);
}

std::string to_csv(const TimeSeries& series, bool header) {
  std::string out = header ? "time,value\n" : "";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_double(series.time(i));
    out += ',';
    out += format_double(series.value(i));
    out += '\n';
  }
  return out;
}

void save_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << to_csv(series);
}

bool is_generic(const TimeSeries& series) {
  try {
    return distinct_values(raw_extrema(series));
  } catch (const ConstantSeriesError&) {
    return false;
  }
}

TimeSeries make_generic(const TimeSeries& series, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  const auto& v = series.values();

  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end());
  double min_gap = INFINITY;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] != sorted[i - 1]) min_gap = std::min(min_gap, sorted[i] - sorted[i - 1]);
  }
  if (!(epsilon < min_gap / 2.0)) {
    throw ValidationError("epsilon too large: would reorder distinct values");
  }

  const auto ext = raw_extrema(series);
  if (distinct_values(ext)) return series;

  const auto runs = plateau_runs(v);
  std::map<double, std::vector<std::size_t>> groups;  // value -> run ids, by index
  for (const auto& [p, r] : ext) groups[p.value].push_back(r);

  std::vector<double> out(v);
  for (const auto& [value, members] : groups) {
    const std::size_t g = members.size();
    if (g < 2) continue;
    for (std::size_t j = 1; j < g; ++j) {
      const double shift = epsilon * static_cast<double>(j) / static_cast<double>(g);
      for (std::size_t i = runs[members[j]].first; i <= runs[members[j]].last; ++i) {
        out[i] = value - shift;
      }
    }
  }
  return TimeSeries(series.times(), std::move(out));
}

CriticalSequence critical_points(const TimeSeries& series) {
  auto ext = raw_extrema(series);
  if (!distinct_values(ext)) throw NonGenericError("tied extreme values");
  CriticalSequence seq;
  seq.points.reserve(ext.size());
  for (auto& [p, r] : ext) seq.points.push_back(p);
  return seq;
}

TimeSeries augment(const TimeSeries& series) {
  if (series.empty()) throw ValidationError("cannot augment an empty series");
  const auto& v = series.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double offset = std::max(0.01 * (*hi - *lo), 1e-9);
  const std::size_t n = series.size();
  const double dt_front = n > 1 ? series.time(1) - series.time(0) : 1.0;
  const double dt_back = n > 1 ? series.time(n - 1) - series.time(n - 2) : 1.0;

  std::vector<double> times;
  std::vector<double> values;
  times.reserve(n + 2);
  values.reserve(n + 2);
  times.push_back(series.time(0) - dt_front);
  values.push_back(*lo - offset);
  times.insert(times.end(), series.times().begin(), series.times().end());
  values.insert(values.end(), v.begin(), v.end());
  times.push_back(series.time(n - 1) + dt_back);
  values.push_back(*hi + offset);
  return TimeSeries(std::move(times), std::move(values));
}

bool is_augmented(const TimeSeries& series) {
  const auto& v = series.values();
  if (v.size() < 2) return false;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v.front())) return false;
  }
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i] < v.back())) return false;
  }
  return true;
}

TimeSeries reversed(const TimeSeries& series) {
  const std::size_t n = series.size();
  std::vector<double> times(n);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = -series.time(n - 1 - i);
    values[i] = series.value(n - 1 - i);
  }
  return TimeSeries(std::move(times), std::move(values));
}

}  // namespace tsph
