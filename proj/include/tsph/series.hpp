#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tsph {

/// Sampled univariate function, linearly interpolated between samples.
///
/// Construction validates the invariants: equal lengths, strictly
/// increasing times and finite values.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(std::vector<double> times, std::vector<double> values);

  /// Samples at integer times 0, 1, ..., n-1.
  static TimeSeries from_values(std::vector<double> values);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double time(std::size_t i) const { return times_[i]; }
  double value(std::size_t i) const { return values_[i]; }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

enum class ExtremumKind { kMin, kMax };

struct CriticalPoint {
  std::size_t index;  // leftmost sample of the plateau
  double time;
  double value;
  ExtremumKind kind;
  bool boundary;  // first or last entry of the series

  friend bool operator==(const CriticalPoint&, const CriticalPoint&) = default;
};

/// Alternating minima and maxima of a series. The first and last entries
/// are the boundary samples; everything in between is an interior extremum.
struct CriticalSequence {
  std::vector<CriticalPoint> points;

  std::vector<CriticalPoint> interior() const;
};

/// Column selection for CSV input. A negative time column means the row
/// number is used as the timestamp.
struct CsvColumns {
  int time = 0;
  int value = 1;
};

TimeSeries parse_csv(const std::string& text, CsvColumns columns = {});
TimeSeries load_csv(const std::filesystem::path& path, CsvColumns columns = {});
std::string to_csv(const TimeSeries& series, bool header = true);
void save_csv(const TimeSeries& series, const std::filesystem::path& path);

/// Extreme values (boundary samples included) are pairwise distinct.
bool is_generic(const TimeSeries& series);

/// Breaks ties between extreme values by lowering later members of each
/// tied group by less than `epsilon`. Identity on generic input.
TimeSeries make_generic(const TimeSeries& series, double epsilon);

/// Plateaus collapse to their leftmost sample. Throws NonGenericError on
/// tied extreme values and ConstantSeriesError on constant input.
CriticalSequence critical_points(const TimeSeries& series);

/// Prepends a sample strictly below every value and appends one strictly
/// above, offset by 1% of the value range (at least 1e-9).
TimeSeries augment(const TimeSeries& series);

/// First sample is the strict global minimum and last the strict maximum.
bool is_augmented(const TimeSeries& series);

TimeSeries reversed(const TimeSeries& series);

}  // namespace tsph
