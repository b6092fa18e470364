#pragma once

// Brute-force reference implementations used to check the library. Nothing
// here calls into fedclave; each score is computed from its definition.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

struct PairCounts {
  double same_both = 0;   // pairs together in truth and in pred
  double same_truth = 0;  // pairs together in truth
  double same_pred = 0;   // pairs together in pred
  double pairs = 0;
};

inline PairCounts count_pairs(const std::vector<int>& truth, const std::vector<int>& pred) {
  PairCounts pc;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = i + 1; j < truth.size(); ++j) {
      const bool t = truth[i] == truth[j];
      const bool p = pred[i] == pred[j];
      pc.pairs += 1;
      pc.same_truth += t;
      pc.same_pred += p;
      pc.same_both += t && p;
    }
  }
  return pc;
}

inline double ari(const std::vector<int>& truth, const std::vector<int>& pred) {
  const auto pc = count_pairs(truth, pred);
  const double expected = pc.same_truth * pc.same_pred / pc.pairs;
  const double max_index = 0.5 * (pc.same_truth + pc.same_pred);
  if (max_index == expected) return 1.0;
  return (pc.same_both - expected) / (max_index - expected);
}

inline double entropy(const std::vector<int>& labels) {
  std::map<int, double> counts;
  for (int v : labels) counts[v] += 1;
  const double n = static_cast<double>(labels.size());
  double h = 0;
  for (const auto& [_, c] : counts) h -= (c / n) * std::log(c / n);
  return h;
}

// H(a | b)
inline double conditional_entropy(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> marg;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    marg[b[i]] += 1;
  }
  const double n = static_cast<double>(a.size());
  double h = 0;
  for (const auto& [key, c] : joint) h -= (c / n) * std::log(c / marg[key.second]);
  return h;
}

inline double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ma, mb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ma[a[i]] += 1;
    mb[b[i]] += 1;
  }
  const double n = static_cast<double>(a.size());
  double mi = 0;
  for (const auto& [key, c] : joint) {
    mi += (c / n) * std::log(c * n / (ma[key.first] * mb[key.second]));
  }
  return mi;
}

// Expected MI under random relabeling with fixed marginals, by averaging MI
// over every distinct arrangement of `pred`. All distinct arrangements of a
// multiset are equally likely under a uniform permutation.
inline double expected_mi_enumerated(const std::vector<int>& truth, std::vector<int> pred) {
  // Compact labels so the joint table fits a small array; n is tiny here.
  auto compact = [](const std::vector<int>& v) {
    std::map<int, int> ids;
    std::vector<int> out;
    for (int x : v) out.push_back(ids.emplace(x, static_cast<int>(ids.size())).first->second);
    return std::pair{out, static_cast<int>(ids.size())};
  };
  const auto [t, kt] = compact(truth);
  auto [p, kp] = compact(pred);
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(t.size());
  std::vector<double> mt(static_cast<std::size_t>(kt)), mp(static_cast<std::size_t>(kp));
  for (int x : t) mt[static_cast<std::size_t>(x)] += 1;
  for (int x : p) mp[static_cast<std::size_t>(x)] += 1;
  std::vector<double> joint(static_cast<std::size_t>(kt * kp));
  double sum = 0;
  double count = 0;
  do {
    std::fill(joint.begin(), joint.end(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) joint[static_cast<std::size_t>(t[i] * kp + p[i])] += 1;
    double mi = 0;
    for (int a = 0; a < kt; ++a) {
      for (int b = 0; b < kp; ++b) {
        const double c = joint[static_cast<std::size_t>(a * kp + b)];
        if (c > 0) mi += (c / n) * std::log(c * n / (mt[static_cast<std::size_t>(a)] * mp[static_cast<std::size_t>(b)]));
      }
    }
    sum += mi;
    count += 1;
  } while (std::next_permutation(p.begin(), p.end()));
  return sum / count;
}

inline int distinct(const std::vector<int>& v) {
  return static_cast<int>(std::set<int>(v.begin(), v.end()).size());
}

// Same partition up to relabeling.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

inline double ami(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (distinct(truth) == 1 && distinct(pred) == 1) return 1.0;
  const double mi = mutual_information(truth, pred);
  const double emi = expected_mi_enumerated(truth, pred);
  const double denom = 0.5 * (entropy(truth) + entropy(pred)) - emi;
  if (std::abs(denom) < 1e-12) return same_partition(truth, pred) ? 1.0 : 0.0;
  return (mi - emi) / denom;
}

inline double homogeneity(const std::vector<int>& truth, const std::vector<int>& pred) {
  const double h = entropy(truth);
  if (h == 0) return 1.0;
  return 1.0 - conditional_entropy(truth, pred) / h;
}

inline double completeness(const std::vector<int>& truth, const std::vector<int>& pred) {
  return homogeneity(pred, truth);
}

inline double v_measure(const std::vector<int>& truth, const std::vector<int>& pred) {
  const double h = homogeneity(truth, pred);
  const double c = completeness(truth, pred);
  if (h + c == 0) return 0.0;
  return 2 * h * c / (h + c);
}

}  // namespace oracle

namespace oracle {

// Mean softmax cross-entropy of the 784-200-10 ReLU network written as plain
// loops over the flat [w1 | b1 | w2 | b2] layout (w1 row-major input x hidden).
template <typename Pixels, typename Labels>
double mlp_loss(const std::vector<double>& p, const Pixels& pixels, const Labels& labels,
                const std::vector<std::size_t>& batch) {
  constexpr std::size_t in = 784, hid = 200, out = 10;
  const double* w1 = p.data();
  const double* b1 = w1 + in * hid;
  const double* w2 = b1 + hid;
  const double* b2 = w2 + hid * out;
  double total = 0;
  std::vector<double> h(hid);
  for (const auto s : batch) {
    for (std::size_t j = 0; j < hid; ++j) {
      double a = b1[j];
      for (std::size_t i = 0; i < in; ++i) a += static_cast<double>(pixels[s * in + i]) * w1[i * hid + j];
      h[j] = a > 0 ? a : 0;
    }
    double z[out];
    double zmax = -1e300;
    for (std::size_t k = 0; k < out; ++k) {
      z[k] = b2[k];
      for (std::size_t j = 0; j < hid; ++j) z[k] += h[j] * w2[j * out + k];
      zmax = std::max(zmax, z[k]);
    }
    double sum = 0;
    for (std::size_t k = 0; k < out; ++k) sum += std::exp(z[k] - zmax);
    total += std::log(sum) + zmax - z[labels[s]];
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace oracle
