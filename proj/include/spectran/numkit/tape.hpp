#pragma once

#include <functional>
#include <vector>

#include "spectran/numkit/matrix.hpp"
#include "spectran/numkit/param_store.hpp"

namespace spectran::numkit {

/// Reverse-mode gradient engine: a recorded tape over a fixed set of primitive
/// ops, not a general autodiff. Each builder runs the forward computation
/// immediately and records a closure that scatters adjoints to its parents.
/// backward() walks the tape once in reverse and accumulates into the
/// ParamStore gradients of every param leaf.
///
/// Subgradient conventions: softshrink uses 0 inside the dead zone and at the
/// kinks |x| = lambda; relu uses 0 at x = 0; abs_scalar uses 0 at 0.
class Tape {
 public:
  using Id = int;

  explicit Tape(bool training = false) : training_(training) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool training() const { return training_; }

  // leaves
  Id constant(Matrix v);
  Id param(ParamStore& store, const std::string& name);

  // dense algebra
  Id matmul(Id a, Id b);     // a * b
  Id matmul_nt(Id a, Id b);  // a * b^T
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id scale(Id a, double s);

  // activations
  Id relu(Id a);
  Id tanh_act(Id a);
  Id softshrink(Id x, Id lambda);  // lambda: 1x1, value must be >= 0
  Id abs_scalar(Id a);             // 1x1

  // spectral positional encoding pieces
  /// w_i = sigma[0] * sum_k alpha_k (sigma[i]/sigma[0])^k for i in [0, d).
  /// alpha is a 1x(n+1) node; output is 1xd.
  Id taylor_weights(Id alpha, const std::vector<double>& sigma, int d);
  /// Embed a 1xd weight vector as [diag(w), 0] of shape d x r.
  Id diag_block(Id w, int r);

  // structure / indexing
  /// out row k = table row ids[k]; ids[k] == pad_id yields a zero row that
  /// receives no gradient. Out-of-range ids raise a contract error.
  Id gather_rows(Id table, const std::vector<int>& ids, int pad_id = -1);
  Id tile_rows(Id a, int times);    // [a; a; ...] stacked
  Id repeat_rows(Id a, int times);  // each row repeated `times` consecutively
  Id reshape(Id a, std::size_t rows, std::size_t cols);
  Id concat_cols(Id a, Id b);
  Id slice_cols(Id a, std::size_t start, std::size_t len);

  // masking / normalization
  /// Elementwise product with a constant mask (RxC, or Rx1 broadcast across
  /// columns). Used for padding masks and inverted dropout.
  Id mul_mask(Id a, Matrix mask);
  /// Row softmax restricted to entries where mask != 0; fully masked rows
  /// produce all-zero output.
  Id masked_softmax_rows(Id a, Matrix mask);
  Id layer_norm_rows(Id a, double eps);
  Id mul_row_broadcast(Id a, Id g);  // g: 1xC
  Id add_row_broadcast(Id a, Id b);  // b: 1xC

  // batched blocks: a tensor of B sequences is stored as a (B*L)xC matrix
  Id bmm_nt(Id a, Id b, int batch);  // per block: a_i * b_i^T
  Id bmm_nn(Id a, Id b, int batch);  // per block: a_i * b_i

  // reductions
  Id rows_dot(Id a, Id b);    // Rx1, dot of corresponding rows
  Id logsumexp_rows(Id a);    // Rx1, numerically stabilized
  Id mean_all(Id a);          // 1x1
  Id sum_all(Id a);           // 1x1

  const Matrix& val(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Matrix& grad_of(Id id) const { return nodes_[static_cast<std::size_t>(id)].grad; }

  /// Backpropagate from a scalar (1x1) loss node. Accumulates into the
  /// gradients of every ParamStore entry that appears as a leaf and marks
  /// them populated.
  void backward(Id loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void()> back;  // empty for leaves and constants
    ParamStore* store = nullptr;
    int store_index = -1;
  };

  Id push(Matrix value) {
    nodes_.push_back(Node{std::move(value), Matrix(), nullptr, nullptr, -1});
    return static_cast<Id>(nodes_.size() - 1);
  }

  Matrix& g(Id id) { return nodes_[static_cast<std::size_t>(id)].grad; }
  const Matrix& v(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }

  std::vector<Node> nodes_;
  bool training_ = false;
};

}  // namespace spectran::numkit
