#include "tsph/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "tsph/error.hpp"

namespace tsph {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // Two rounds of the splitmix64 finalizer over (master, stream).
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& xs) { return pairwise_sum(xs.data(), xs.size()); }

Estimate mean_estimate(const std::vector<double>& xs) {
  Estimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  const double n = static_cast<double>(xs.size());
  e.estimate = pairwise_sum(xs) / n;
  if (xs.size() > 1) {
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - e.estimate) * (xs[i] - e.estimate);
    e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return e;
}

Estimate covariance_estimate(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("covariance of unequal samples");
  Estimate e;
  e.n = xs.size();
  if (xs.size() < 2) return e;
  const double n = static_cast<double>(xs.size());
  const double mx = pairwise_sum(xs) / n;
  const double my = pairwise_sum(ys) / n;
  std::vector<double> prod(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) prod[i] = (xs[i] - mx) * (ys[i] - my);
  const double mean = pairwise_sum(prod) / n;
  e.estimate = mean * n / (n - 1.0);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (prod[i] - mean) * (prod[i] - mean);
  e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return e;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

ChiSquareResult finish(double stat, std::size_t cells, std::size_t constraints) {
  ChiSquareResult r;
  r.statistic = stat;
  if (cells <= constraints) throw ValidationError("too few cells for a chi-square test");
  r.dof = cells - constraints;
  boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
  return r;
}

}  // namespace

ChiSquareResult chi_square_gof(const std::vector<std::size_t>& counts,
                               const std::function<double(std::size_t)>& pmf, double min_expected) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw ValidationError("chi-square test on an empty sample");

  // Cells 0..K-1 individually, everything from K on pooled into one tail cell.
  std::size_t cut = 0;
  double head_prob = 0.0;
  while (true) {
    const double e = pmf(cut) * total;
    const double tail = (1.0 - head_prob - pmf(cut)) * total;
    if (e < min_expected || tail < min_expected) break;
    head_prob += pmf(cut);
    ++cut;
  }
  double stat = 0.0;
  double observed_head = 0.0;
  for (std::size_t k = 0; k < cut; ++k) {
    const double o = k < counts.size() ? static_cast<double>(counts[k]) : 0.0;
    const double e = pmf(k) * total;
    stat += (o - e) * (o - e) / e;
    observed_head += o;
  }
  const double o_tail = total - observed_head;
  const double e_tail = (1.0 - head_prob) * total;
  stat += (o_tail - e_tail) * (o_tail - e_tail) / e_tail;
  return finish(stat, cut + 1, 1);
}

ChiSquareResult chi_square_cells(const std::vector<std::size_t>& counts,
                                 const std::vector<double>& probabilities) {
  if (counts.size() != probabilities.size() || counts.size() < 2) {
    throw ValidationError("chi-square test needs matching cells");
  }
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw ValidationError("chi-square test on an empty sample");
  double stat = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = probabilities[k] * total;
    if (!(e > 0.0)) throw ValidationError("chi-square cell with zero expectation");
    stat += (static_cast<double>(counts[k]) - e) * (static_cast<double>(counts[k]) - e) / e;
  }
  return finish(stat, counts.size(), 1);
}

ChiSquareResult chi_square_uniform(const std::vector<std::size_t>& counts) {
  return chi_square_cells(counts, std::vector<double>(counts.size(), 1.0 / static_cast<double>(counts.size())));
}

ChiSquareResult chi_square_two_sample(const std::vector<std::size_t>& a,
                                      const std::vector<std::size_t>& b, double min_expected) {
  const std::size_t cells = std::max(a.size(), b.size());
  auto at = [](const std::vector<std::size_t>& v, std::size_t k) {
    return k < v.size() ? static_cast<double>(v[k]) : 0.0;
  };
  double na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    na += at(a, k);
    nb += at(b, k);
  }
  if (na <= 0.0 || nb <= 0.0) throw ValidationError("chi-square test on an empty sample");
  const double n = na + nb;

  // Pool the tail so that every cell's smaller expected count is large enough.
  std::vector<std::pair<double, double>> merged;
  std::pair<double, double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < cells; ++k) {
    acc.first += at(a, k);
    acc.second += at(b, k);
    const double col = acc.first + acc.second;
    double rest = 0.0;
    for (std::size_t j = k + 1; j < cells; ++j) rest += at(a, j) + at(b, j);
    if (std::min(na, nb) * col / n >= min_expected && std::min(na, nb) * rest / n >= min_expected) {
      merged.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (merged.empty()) {
      merged.push_back(acc);
    } else {
      merged.back().first += acc.first;
      merged.back().second += acc.second;
    }
  }
  double stat = 0.0;
  for (const auto& [oa, ob] : merged) {
    const double col = oa + ob;
    const double ea = na * col / n;
    const double eb = nb * col / n;
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  return finish(stat, merged.size(), 1);
}

}  // namespace tsph
