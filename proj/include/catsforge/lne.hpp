#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "catsforge/graph.hpp"

namespace catsforge {

class ShapeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major double matrix; all kernel arithmetic is 64-bit.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct LneParams {
  Matrix segment_table;            // segment_count x d
  std::vector<Matrix> w_query;     // per head, d x (d/H)
  std::vector<Matrix> w_key;
  std::vector<Matrix> w_value;
  std::vector<double> ln_gain;     // d
  std::vector<double> ln_bias;     // d

  std::size_t heads() const { return w_query.size(); }
  std::size_t width() const { return ln_gain.size(); }

  // Uniform values in [-0.1, 0.1] from a SplitMix64 stream; gain starts
  // at 1 and bias at 0.
  static LneParams seeded(std::size_t d, std::size_t heads, std::size_t segment_count,
                          std::uint64_t seed);
};

// Node embedding layer: row v becomes LayerNorm(h_v) (affine, epsilon
// 1e-5 over the feature axis) plus the segment embedding of v's segment.
// Zero-variance rows normalize to ~0 before gain/bias.
Matrix node_embed(const Matrix& h, const std::vector<int>& segments, const LneParams& p);

// Masked multi-head attention over graph neighborhoods: per head,
// scores(v,n) = (he_v Wq)(he_n Wk)^T / sqrt(d/H), softmax restricted to
// {n : adj[v][n] == 1}, output row v concatenates the per-head sums of
// attention-weighted value projections. `attention` (when given) receives
// one N x N matrix per head with exact zeros off-neighborhood.
Matrix gat_forward(const Matrix& he, const std::vector<std::vector<std::uint8_t>>& adj,
                   const LneParams& p, std::vector<Matrix>* attention = nullptr);

// FNV-1a over the canonical text of every entry; stable across runs.
std::uint64_t matrix_digest(const Matrix& m);

}  // namespace catsforge
