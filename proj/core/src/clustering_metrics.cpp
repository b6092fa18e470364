#include "fedclave/clustering_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fedclave/errors.hpp"

namespace fedclave {

namespace {

std::vector<std::size_t> compact(std::span<const int> labels, std::size_t& distinct) {
  std::map<int, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const int l : labels) {
    const auto [it, inserted] = ids.emplace(l, ids.size());
    out.push_back(it->second);
  }
  distinct = ids.size();
  return out;
}

double comb2(std::size_t n) {
  const auto x = static_cast<double>(n);
  return x * (x - 1.0) / 2.0;
}

double entropy(std::span<const std::size_t> sums, std::size_t total) {
  double h = 0.0;
  const auto n = static_cast<double>(total);
  for (const auto s : sums) {
    if (s == 0) continue;
    const double p = static_cast<double>(s) / n;
    h -= p * std::log(p);
  }
  return h;
}

double mutual_information(const ContingencyTable& t) {
  const auto n = static_cast<double>(t.total);
  double mi = 0.0;
  for (std::size_t i = 0; i < t.row_sums.size(); ++i) {
    for (std::size_t j = 0; j < t.col_sums.size(); ++j) {
      const auto nij = t.counts[i][j];
      if (nij == 0) continue;
      const double v = static_cast<double>(nij);
      mi += v / n *
            std::log(n * v / (static_cast<double>(t.row_sums[i]) * static_cast<double>(t.col_sums[j])));
    }
  }
  return mi;
}

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// E[MI] over all relabelings with fixed marginals (hypergeometric model).
double expected_mutual_information(const ContingencyTable& t) {
  const std::size_t n = t.total;
  const auto nd = static_cast<double>(n);
  const double log_n_fact = log_factorial(n);
  double emi = 0.0;
  for (const auto a : t.row_sums) {
    for (const auto b : t.col_sums) {
      const std::size_t lo = std::max<std::size_t>(1, a + b > n ? a + b - n : 0);
      const std::size_t hi = std::min(a, b);
      const double log_const = log_factorial(a) + log_factorial(b) + log_factorial(n - a) +
                               log_factorial(n - b) - log_n_fact;
      for (std::size_t nij = lo; nij <= hi; ++nij) {
        const double v = static_cast<double>(nij);
        const double term = v / nd *
                            std::log(nd * v / (static_cast<double>(a) * static_cast<double>(b)));
        const double log_p = log_const - log_factorial(nij) - log_factorial(a - nij) -
                             log_factorial(b - nij) - log_factorial(n - a - b + nij);
        emi += term * std::exp(log_p);
      }
    }
  }
  return emi;
}

bool same_partition(const ContingencyTable& t) {
  if (t.row_sums.size() != t.col_sums.size()) return false;
  for (const auto& row : t.counts) {
    if (std::count_if(row.begin(), row.end(), [](std::size_t c) { return c != 0; }) != 1) {
      return false;
    }
  }
  return true;
}

}  // namespace

ContingencyTable ContingencyTable::build(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch, "label sequences differ in length");
  }
  if (truth.size() < 2) throw Error(ErrorCode::kTooFewItems, "need at least 2 items");
  std::size_t nu = 0;
  std::size_t nv = 0;
  const auto u = compact(truth, nu);
  const auto v = compact(pred, nv);
  ContingencyTable t;
  t.counts.assign(nu, std::vector<std::size_t>(nv, 0));
  t.row_sums.assign(nu, 0);
  t.col_sums.assign(nv, 0);
  t.total = truth.size();
  for (std::size_t k = 0; k < u.size(); ++k) {
    ++t.counts[u[k]][v[k]];
    ++t.row_sums[u[k]];
    ++t.col_sums[v[k]];
  }
  return t;
}

double adjusted_rand_index(std::span<const int> truth, std::span<const int> pred) {
  const auto t = ContingencyTable::build(truth, pred);
  double index = 0.0;
  for (const auto& row : t.counts) {
    for (const auto c : row) index += comb2(c);
  }
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (const auto a : t.row_sums) sum_a += comb2(a);
  for (const auto b : t.col_sums) sum_b += comb2(b);
  const double expected = sum_a * sum_b / comb2(t.total);
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double adjusted_mutual_information(std::span<const int> truth, std::span<const int> pred) {
  const auto t = ContingencyTable::build(truth, pred);
  if (t.row_sums.size() == 1 && t.col_sums.size() == 1) return 1.0;
  const double mi = mutual_information(t);
  const double emi = expected_mutual_information(t);
  const double normalizer = 0.5 * (entropy(t.row_sums, t.total) + entropy(t.col_sums, t.total));
  const double denominator = normalizer - emi;
  if (std::abs(denominator) < 1e-12) return same_partition(t) ? 1.0 : 0.0;
  return (mi - emi) / denominator;
}

HomogeneityCompleteness homogeneity_completeness_v(std::span<const int> truth,
                                                   std::span<const int> pred) {
  const auto t = ContingencyTable::build(truth, pred);
  const double h_u = entropy(t.row_sums, t.total);
  const double h_v = entropy(t.col_sums, t.total);
  const double mi = mutual_information(t);
  // H(U|V) = H(U) - MI and H(V|U) = H(V) - MI.
  HomogeneityCompleteness out;
  out.homogeneity = h_u == 0.0 ? 1.0 : std::clamp(mi / h_u, 0.0, 1.0);
  out.completeness = h_v == 0.0 ? 1.0 : std::clamp(mi / h_v, 0.0, 1.0);
  const double s = out.homogeneity + out.completeness;
  out.v_measure = s == 0.0 ? 0.0 : 2.0 * out.homogeneity * out.completeness / s;
  return out;
}

MetricsReport clustering_metrics(std::span<const int> truth, std::span<const int> pred) {
  MetricsReport r;
  r.ari = adjusted_rand_index(truth, pred);
  r.ami = adjusted_mutual_information(truth, pred);
  const auto hcv = homogeneity_completeness_v(truth, pred);
  r.homogeneity = hcv.homogeneity;
  r.completeness = hcv.completeness;
  r.v_measure = hcv.v_measure;
  return r;
}

}  // namespace fedclave
