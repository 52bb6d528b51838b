#include "catsforge/lne.hpp"

#include <cmath>
#include <cstdio>

#include "catsforge/rng.hpp"

namespace catsforge {

namespace {

constexpr double kLayerNormEpsilon = 1e-5;

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& x : m.data) x = rng.uniform(-0.1, 0.1);
  return m;
}

void check(bool ok, const char* what) {
  if (!ok) throw ShapeMismatch(what);
}

}  // namespace

LneParams LneParams::seeded(std::size_t d, std::size_t heads, std::size_t segment_count,
                            std::uint64_t seed) {
  check(heads > 0 && d % heads == 0, "d must be divisible by the head count");
  Rng rng(seed);
  LneParams p;
  p.segment_table = random_matrix(segment_count, d, rng);
  const std::size_t dh = d / heads;
  for (std::size_t h = 0; h < heads; ++h) p.w_query.push_back(random_matrix(d, dh, rng));
  for (std::size_t h = 0; h < heads; ++h) p.w_key.push_back(random_matrix(d, dh, rng));
  for (std::size_t h = 0; h < heads; ++h) p.w_value.push_back(random_matrix(d, dh, rng));
  p.ln_gain.assign(d, 1.0);
  p.ln_bias.assign(d, 0.0);
  return p;
}

Matrix node_embed(const Matrix& h, const std::vector<int>& segments, const LneParams& p) {
  const std::size_t d = p.width();
  check(h.cols == d, "state width differs from parameter width");
  check(segments.size() == h.rows, "one segment id per row required");
  check(p.ln_bias.size() == d, "gain/bias width mismatch");
  check(p.segment_table.cols == d, "segment table width mismatch");
  for (int s : segments) {
    check(s >= 0 && static_cast<std::size_t>(s) < p.segment_table.rows,
          "segment id out of range");
  }
  Matrix out(h.rows, d);
  for (std::size_t v = 0; v < h.rows; ++v) {
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += h.at(v, j);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = h.at(v, j) - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    const int seg = segments[v];
    for (std::size_t j = 0; j < d; ++j) {
      const double normalized = (h.at(v, j) - mean) * inv;
      out.at(v, j) = normalized * p.ln_gain[j] + p.ln_bias[j] +
                     p.segment_table.at(static_cast<std::size_t>(seg), j);
    }
  }
  return out;
}

Matrix gat_forward(const Matrix& he, const std::vector<std::vector<std::uint8_t>>& adj,
                   const LneParams& p, std::vector<Matrix>* attention) {
  const std::size_t n = he.rows;
  const std::size_t d = p.width();
  const std::size_t heads = p.heads();
  check(heads > 0 && d % heads == 0, "d must be divisible by the head count");
  const std::size_t dh = d / heads;
  check(he.cols == d, "state width differs from parameter width");
  check(adj.size() == n, "adjacency size differs from row count");
  for (std::size_t v = 0; v < n; ++v) {
    check(adj[v].size() == n, "adjacency must be square");
    check(adj[v][v] == 1, "adjacency must carry unit diagonal");
    for (std::size_t u = 0; u < n; ++u) {
      check(adj[v][u] == adj[u][v], "adjacency must be symmetric");
    }
  }
  check(p.w_key.size() == heads && p.w_value.size() == heads, "per-head projections mismatch");

  if (attention) attention->assign(heads, Matrix(n, n));
  Matrix out(n, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Matrix q(n, dh), k(n, dh), value(n, dh);
  for (std::size_t head = 0; head < heads; ++head) {
    const Matrix& wq = p.w_query[head];
    const Matrix& wk = p.w_key[head];
    const Matrix& wv = p.w_value[head];
    check(wq.rows == d && wq.cols == dh, "W_Q shape mismatch");
    check(wk.rows == d && wk.cols == dh, "W_K shape mismatch");
    check(wv.rows == d && wv.cols == dh, "W_V shape mismatch");
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t j = 0; j < dh; ++j) {
        double sq = 0.0, sk = 0.0, sv = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double x = he.at(v, i);
          sq += x * wq.at(i, j);
          sk += x * wk.at(i, j);
          sv += x * wv.at(i, j);
        }
        q.at(v, j) = sq;
        k.at(v, j) = sk;
        value.at(v, j) = sv;
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      // scores over the neighborhood only; softmax shifted by the max
      double max_score = -1e308;
      std::vector<double> scores(n, 0.0);
      for (std::size_t u = 0; u < n; ++u) {
        if (!adj[v][u]) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < dh; ++j) s += q.at(v, j) * k.at(u, j);
        s *= scale;
        scores[u] = s;
        if (s > max_score) max_score = s;
      }
      double denom = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        if (adj[v][u]) denom += std::exp(scores[u] - max_score);
      }
      for (std::size_t u = 0; u < n; ++u) {
        if (!adj[v][u]) continue;
        const double alpha = std::exp(scores[u] - max_score) / denom;
        if (attention) (*attention)[head].at(v, u) = alpha;
        for (std::size_t j = 0; j < dh; ++j) {
          out.at(v, head * dh + j) += alpha * value.at(u, j);
        }
      }
    }
  }
  return out;
}

std::uint64_t matrix_digest(const Matrix& m) {
  std::uint64_t hash = 1469598103934665603ULL;
  const auto feed = [&hash](const char* bytes, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
      hash ^= static_cast<std::uint8_t>(bytes[i]);
      hash *= 1099511628211ULL;
    }
  };
  char buf[64];
  int len = std::snprintf(buf, sizeof(buf), "%zux%zu;", m.rows, m.cols);
  feed(buf, static_cast<std::size_t>(len));
  for (const double x : m.data) {
    len = std::snprintf(buf, sizeof(buf), "%.17g;", x);
    feed(buf, static_cast<std::size_t>(len));
  }
  return hash;
}

}  // namespace catsforge
