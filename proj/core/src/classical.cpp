#include "aiid/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "aiid/errors.hpp"

namespace aiid {

namespace {

constexpr double kProbSumTol = 1e-12;

void require_key(const std::string& key, int d, int n) {
  if (static_cast<int>(key.size()) != n)
    throw std::invalid_argument("distribution key has wrong length: " + key);
  for (char c : key)
    if (c < '0' || c >= '0' + d)
      throw std::invalid_argument("distribution key has digit out of range: " + key);
}

std::string digit_string(int d, int n, long long index) {
  std::string s(n, '0');
  for (int i = n - 1; i >= 0; --i) {
    s[i] = static_cast<char>('0' + index % d);
    index /= d;
  }
  return s;
}

}  // namespace

ClassicalDistribution ClassicalDistribution::make(
    int d, int n, std::map<std::string, double> probs) {
  if (d < 2 || d > 10)
    throw std::invalid_argument("alphabet size must be in [2, 10] for digit keys");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  double sum = 0.0;
  for (auto it = probs.begin(); it != probs.end();) {
    require_key(it->first, d, n);
    if (it->second < -kProbSumTol)
      throw std::invalid_argument("negative probability for key " + it->first);
    if (it->second <= 0.0) {
      it = probs.erase(it);
      continue;
    }
    sum += it->second;
    ++it;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "probabilities sum to " << sum << ", not 1";
    throw std::invalid_argument(os.str());
  }
  return ClassicalDistribution{d, n, std::move(probs)};
}

ClassicalDistribution ClassicalDistribution::point_mass(int d, const std::string& x) {
  return make(d, static_cast<int>(x.size()), {{x, 1.0}});
}

ClassicalDistribution ClassicalDistribution::uniform_symbol(int d) {
  std::map<std::string, double> probs;
  for (int i = 0; i < d; ++i) probs[std::string(1, char('0' + i))] = 1.0 / d;
  return make(d, 1, std::move(probs));
}

double ClassicalDistribution::prob(const std::string& x) const {
  auto it = probs.find(x);
  return it == probs.end() ? 0.0 : it->second;
}

TypeVector TypeVector::make(std::vector<long long> counts) {
  long long n = 0;
  for (long long c : counts) {
    if (c < 0) throw std::invalid_argument("TypeVector: negative count");
    n += c;
  }
  if (counts.size() < 2) throw std::invalid_argument("TypeVector: need d >= 2");
  if (n < 1) throw std::invalid_argument("TypeVector: empty type");
  return TypeVector{static_cast<int>(n), std::move(counts)};
}

int hamming_distance(const std::string& x, const std::string& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("hamming_distance: length mismatch");
  int dist = 0;
  for (std::size_t i = 0; i < x.size(); ++i) dist += (x[i] != y[i]);
  return dist;
}

TransportResult hamming_w1(const ClassicalDistribution& p,
                           const ClassicalDistribution& q) {
  if (p.d != q.d || p.n != q.n)
    throw std::invalid_argument("hamming_w1: distributions on different spaces");

  std::vector<std::string> px, qx;
  std::vector<double> pa, qb;
  for (const auto& [k, v] : p.probs) { px.push_back(k); pa.push_back(v); }
  for (const auto& [k, v] : q.probs) { qx.push_back(k); qb.push_back(v); }
  const int S = static_cast<int>(px.size());
  const int T = static_cast<int>(qx.size());
  if (static_cast<long long>(S) * T > 1000000)
    throw GuardError("hamming_w1: support product exceeds 1e6");

  std::vector<std::vector<int>> cost(S, std::vector<int>(T));
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < T; ++j) cost[i][j] = hamming_distance(px[i], qx[j]);

  // Successive shortest paths over the bipartite residual graph. Costs are
  // integers, so potentials and distances stay integral and the Dijkstra
  // comparisons are exact.
  const int N = S + T;
  std::vector<double> pot(N, 0.0), rem_a(pa), rem_b(qb);
  std::vector<std::map<int, double>> flow(S);  // flow[i][j] > 0
  std::vector<std::vector<int>> back(T);       // sources with flow into j

  const double inf = std::numeric_limits<double>::infinity();
  double remaining = 1.0;
  int augmentations = 0;
  const int cap = 20 * (S + T) + 100;

  while (remaining > 1e-15) {
    if (++augmentations > cap)
      throw SolverError("hamming_w1: augmentation cap exceeded");

    std::vector<double> dist(N, inf);
    std::vector<int> parent(N, -1);  // previous node on path
    std::vector<char> settled(N, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (int i = 0; i < S; ++i)
      if (rem_a[i] > 0) {
        dist[i] = 0.0;
        heap.push({0.0, i});
      }

    while (!heap.empty()) {
      auto [dv, v] = heap.top();
      heap.pop();
      if (settled[v] || dv > dist[v]) continue;
      settled[v] = 1;
      if (v < S) {
        for (int j = 0; j < T; ++j) {
          const double rc = cost[v][j] + pot[v] - pot[S + j];
          if (dist[v] + rc < dist[S + j] - 1e-12) {
            dist[S + j] = dist[v] + rc;
            parent[S + j] = v;
            heap.push({dist[S + j], S + j});
          }
        }
      } else {
        const int j = v - S;
        for (int i : back[j]) {
          auto it = flow[i].find(j);
          if (it == flow[i].end() || it->second <= 0) continue;
          const double rc = -cost[i][j] + pot[v] - pot[i];
          if (dist[v] + rc < dist[i] - 1e-12) {
            dist[i] = dist[v] + rc;
            parent[i] = v;
            heap.push({dist[i], i});
          }
        }
      }
    }

    int target = -1;
    double tdist = inf;
    for (int j = 0; j < T; ++j)
      if (rem_b[j] > 0 && dist[S + j] < tdist) {
        tdist = dist[S + j];
        target = j;
      }
    if (target < 0)
      throw SolverError("hamming_w1: no augmenting path (unbalanced input?)");

    // Walk back to find the bottleneck.
    double delta = rem_b[target];
    int v = S + target;
    while (parent[v] != -1) {
      const int u = parent[v];
      if (u >= S) delta = std::min(delta, flow[v][u - S]);  // backward arc
      v = u;
    }
    delta = std::min(delta, rem_a[v]);

    int w = S + target;
    while (parent[w] != -1) {
      const int u = parent[w];
      if (u < S) {
        double& fl = flow[u][w - S];
        if (fl == 0.0) back[w - S].push_back(u);
        fl += delta;
      } else {
        double& fl = flow[w][u - S];
        fl -= delta;
        if (fl < 1e-15) fl = 0.0;
      }
      w = u;
    }
    rem_a[w] -= delta;
    if (rem_a[w] < 1e-15) rem_a[w] = 0.0;
    rem_b[target] -= delta;
    if (rem_b[target] < 1e-15) rem_b[target] = 0.0;
    remaining -= delta;

    for (int u = 0; u < N; ++u)
      if (dist[u] < inf) pot[u] += std::min(dist[u], tdist);
  }

  TransportResult out;
  out.coupling.p = p;
  out.coupling.q = q;
  for (int i = 0; i < S; ++i)
    for (const auto& [j, f] : flow[i])
      if (f > 0) {
        out.value += f * cost[i][j];
        out.coupling.mass[{px[i], qx[j]}] = f;
      }
  for (int j = 0; j < T; ++j) out.dual_value += qb[j] * pot[S + j];
  for (int i = 0; i < S; ++i) out.dual_value -= pa[i] * pot[i];
  return out;
}

ClassicalDistribution type_class_uniform(const TypeVector& t) {
  if (t.n > 20) throw GuardError("type_class_uniform: n > 20");
  std::string base;
  for (int sym = 0; sym < t.alphabet(); ++sym)
    base.append(static_cast<std::size_t>(t.counts[sym]), char('0' + sym));
  const double size = static_cast<double>(type_class_size(t));
  std::map<std::string, double> probs;
  std::string s = base;
  do {
    probs[s] = 1.0 / size;
  } while (std::next_permutation(s.begin(), s.end()));
  return ClassicalDistribution::make(t.alphabet(), t.n, std::move(probs));
}

long long type_class_size(const TypeVector& t) {
  if (t.n > 20) throw GuardError("type_class_size: n > 20");
  long long size = 1, placed = 0;
  for (long long c : t.counts) {
    placed += c;
    // multiply by C(placed, c)
    long long binom = 1;
    for (long long i = 1; i <= c; ++i)
      binom = binom * (placed - c + i) / i;
    size *= binom;
  }
  return size;
}

ClassicalDistribution iid_distribution(const ClassicalDistribution& p, int n) {
  if (p.n != 1) throw std::invalid_argument("iid_distribution: p must be single-symbol");
  if (n > 20) throw GuardError("iid_distribution: n > 20");
  double support = 1.0;
  for (int i = 0; i < n; ++i) support *= static_cast<double>(p.probs.size());
  if (support > 1e6) throw GuardError("iid_distribution: support exceeds 1e6");

  std::map<std::string, double> acc{{"", 1.0}};
  for (int i = 0; i < n; ++i) {
    std::map<std::string, double> next;
    for (const auto& [prefix, w] : acc)
      for (const auto& [sym, ps] : p.probs) next[prefix + sym] = w * ps;
    acc = std::move(next);
  }
  return ClassicalDistribution::make(p.d, n, std::move(acc));
}

ClassicalDistribution paired_source(const ClassicalDistribution& p, int n) {
  if (p.n != 1) throw std::invalid_argument("paired_source: p must be single-symbol");
  if (n < 1) throw std::invalid_argument("paired_source: n must be >= 1");
  const int blocks = (n + 1) / 2;
  double support = 1.0;
  for (int i = 0; i < blocks; ++i) support *= static_cast<double>(p.probs.size());
  if (support > 1e6) throw GuardError("paired_source: support exceeds 1e6");

  std::map<std::string, double> acc{{"", 1.0}};
  for (int b = 0; b < blocks; ++b) {
    const bool full_pair = 2 * (b + 1) <= n;
    std::map<std::string, double> next;
    for (const auto& [prefix, w] : acc)
      for (const auto& [sym, ps] : p.probs) {
        std::string key = prefix + sym;
        if (full_pair) key += sym;
        next[key] = w * ps;
      }
    acc = std::move(next);
  }
  return ClassicalDistribution::make(p.d, n, std::move(acc));
}

ClassicalDistribution paired_source_marginal(const ClassicalDistribution& p,
                                             int n, const SiteSubset& sites) {
  if (p.n != 1)
    throw std::invalid_argument("paired_source_marginal: p must be single-symbol");
  if (sites.n != n)
    throw std::invalid_argument("paired_source_marginal: subset ambient mismatch");
  // Runs of sites sharing a pair block {2m-1, 2m}; each run draws one symbol.
  std::vector<int> run_sizes;
  int prev_block = -1;
  for (int s : sites.indices) {
    const int block = (s + 1) / 2;
    if (block == prev_block) {
      run_sizes.back() += 1;
    } else {
      run_sizes.push_back(1);
      prev_block = block;
    }
  }
  std::map<std::string, double> acc{{"", 1.0}};
  for (int len : run_sizes) {
    std::map<std::string, double> next;
    for (const auto& [prefix, w] : acc)
      for (const auto& [sym, ps] : p.probs) {
        std::string key = prefix;
        key.append(static_cast<std::size_t>(len), sym[0]);
        next[key] = w * ps;
      }
    acc = std::move(next);
  }
  return ClassicalDistribution::make(p.d, sites.size(), std::move(acc));
}

ClassicalDistribution xi_distribution(int n) {
  if (n < 1) throw std::invalid_argument("xi_distribution: n must be >= 1");
  if (n == 1) return ClassicalDistribution::uniform_symbol(2);
  if (n % 2 == 1)
    return product(xi_distribution(n - 1), ClassicalDistribution::uniform_symbol(2));
  return type_class_uniform(TypeVector::make({n / 2, n / 2}));
}

ClassicalDistribution marginal(const ClassicalDistribution& p,
                               const SiteSubset& sites) {
  if (sites.n != p.n)
    throw std::invalid_argument("marginal: subset ambient mismatch");
  std::map<std::string, double> probs;
  for (const auto& [key, v] : p.probs) {
    std::string sub;
    sub.reserve(sites.indices.size());
    for (int s : sites.indices) sub += key[s - 1];
    probs[sub] += v;
  }
  return ClassicalDistribution::make(p.d, sites.size(), std::move(probs));
}

ClassicalDistribution product(const ClassicalDistribution& a,
                              const ClassicalDistribution& b) {
  if (a.d != b.d) throw std::invalid_argument("product: alphabet mismatch");
  std::map<std::string, double> probs;
  for (const auto& [ka, va] : a.probs)
    for (const auto& [kb, vb] : b.probs) probs[ka + kb] = va * vb;
  return ClassicalDistribution::make(a.d, a.n + b.n, std::move(probs));
}

double l1_distance(const ClassicalDistribution& p,
                   const ClassicalDistribution& q) {
  if (p.d != q.d || p.n != q.n)
    throw std::invalid_argument("l1_distance: shape mismatch");
  double acc = 0.0;
  auto ip = p.probs.begin();
  auto iq = q.probs.begin();
  while (ip != p.probs.end() || iq != q.probs.end()) {
    if (iq == q.probs.end() || (ip != p.probs.end() && ip->first < iq->first)) {
      acc += std::abs(ip->second);
      ++ip;
    } else if (ip == p.probs.end() || iq->first < ip->first) {
      acc += std::abs(iq->second);
      ++iq;
    } else {
      acc += std::abs(ip->second - iq->second);
      ++ip;
      ++iq;
    }
  }
  return acc;
}

double avg_marginal_tv(const ClassicalDistribution& p_n,
                       const ClassicalDistribution& p_single, int k) {
  const ClassicalDistribution iid_k = iid_distribution(p_single, k);
  return subset_average(p_n.n, k, [&](const SiteSubset& I) {
    return l1_distance(marginal(p_n, I), iid_k);
  });
}

SampledEstimate avg_marginal_tv_sampled(
    const std::function<ClassicalDistribution(const SiteSubset&)>& marginal_of,
    const ClassicalDistribution& p_single, int n, int k, int samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("avg_marginal_tv_sampled: samples < 1");
  const ClassicalDistribution iid_k = iid_distribution(p_single, k);
  std::vector<int> pool(n);
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) pool[i] = i + 1;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(rng.uniform_index(n - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<int> idx(pool.begin(), pool.begin() + k);
    std::sort(idx.begin(), idx.end());
    const double tv =
        l1_distance(marginal_of(SiteSubset::make(n, idx)), iid_k);
    sum += tv;
    sumsq += tv * tv;
  }
  SampledEstimate est;
  est.samples = samples;
  est.mean = sum / samples;
  if (samples > 1) {
    const double var =
        std::max(0.0, (sumsq - samples * est.mean * est.mean) / (samples - 1));
    est.stderr_ = std::sqrt(var / samples);
  }
  return est;
}

double classical_entropy(const ClassicalDistribution& p) {
  double s = 0.0;
  for (const auto& [key, v] : p.probs)
    if (v > 0) s -= v * std::log(v);
  return s;
}

double kl_divergence(const ClassicalDistribution& p,
                     const ClassicalDistribution& q) {
  if (p.d != q.d || p.n != q.n)
    throw std::invalid_argument("kl_divergence: shape mismatch");
  double s = 0.0;
  for (const auto& [key, v] : p.probs) {
    const double qv = q.prob(key);
    if (qv <= 0.0) return std::numeric_limits<double>::infinity();
    s += v * std::log(v / qv);
  }
  return std::max(0.0, s);
}

double quantitative_wass_bound(const TypeVector& t, int n) {
  if (t.n != n) throw std::invalid_argument("quantitative_wass_bound: type sums to wrong n");
  const int d = t.alphabet();
  return std::sqrt((d - 1) * std::log(n + 1.0) / (2.0 * n));
}

DensityOperator classical_to_density(const ClassicalDistribution& p) {
  const int dim = checked_power(p.d, p.n, 4096);
  Mat m = Mat::Zero(dim, dim);
  for (const auto& [key, v] : p.probs) {
    long long idx = 0;
    for (char c : key) idx = idx * p.d + (c - '0');
    m(idx, idx) = Cd(v, 0.0);
  }
  return DensityOperator::trusted(p.d, p.n, std::move(m));
}

ClassicalDistribution diagonal_distribution(const DensityOperator& rho) {
  const int d = rho.site_dim;
  const int n = rho.n_sites;
  double off = 0.0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i)
    for (Eigen::Index j = 0; j < rho.dim(); ++j)
      if (i != j) off = std::max(off, std::abs(rho.mat(i, j)));
  if (off > 1e-10)
    throw std::invalid_argument("diagonal_distribution: operator is not diagonal");
  std::map<std::string, double> probs;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    const double v = rho.mat(i, i).real();
    if (v > 1e-15) probs[digit_string(d, n, i)] = v;
  }
  return ClassicalDistribution::make(d, n, std::move(probs));
}

}  // namespace aiid
