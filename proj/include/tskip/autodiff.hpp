#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "tskip/tensor.hpp"

namespace tskip {
namespace ad {

// One vertex of a reverse-mode differentiation graph. Leaves hold parameters
// or constants; interior nodes are created by the op functions below, each of
// which installs the local backward rule as a closure. The graph is acyclic
// by construction (inputs exist before outputs).
//
// Gradients accumulate: when a node feeds several consumers, each consumer
// adds into `grad`. Parameter leaves keep their accumulated gradient across
// backward() calls until zero_grad(), which is what batch accumulation and
// the training loop rely on. Interior nodes are single-use per backward pass.
struct Node {
    Tensor value;
    Tensor grad;  // allocated on first use, same shape as value
    std::vector<std::shared_ptr<Node>> inputs;
    std::function<void(Node&)> backprop;  // reads grad, accumulates into inputs
    bool requires_grad = false;

    Tensor& ensure_grad();
};

using NodePtr = std::shared_ptr<Node>;

NodePtr constant(Tensor v);
NodePtr parameter(Tensor v);

NodePtr matmul(NodePtr a, NodePtr b);
NodePtr transpose(NodePtr a);
NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr hadamard(NodePtr a, NodePtr b);
NodePtr abs(NodePtr a);
NodePtr sigmoid(NodePtr a);
NodePtr tanh(NodePtr a);
NodePtr scale(NodePtr a, real c);
NodePtr concat_cols(NodePtr a, NodePtr b);
NodePtr concat_rows(std::vector<NodePtr> rows);
NodePtr slice_cols(NodePtr a, int first, int count);
// Gathers rows of `a` (typically an embedding matrix) by index; repeated
// indices accumulate their gradients into the same row.
NodePtr select_rows(NodePtr a, std::vector<int> row_ids);
NodePtr mean_rows(NodePtr h);
// Ties broken toward the lowest row index, so the backward pass is
// deterministic.
NodePtr max_rows(NodePtr h);
// -log softmax(logits)[target] for a 1 x V logits row, computed with
// max-subtraction; backward is softmax - onehot(target).
NodePtr softmax_xent(NodePtr logits, int target);
// Mean over rows of the cross-entropy between softmax(logits) and the given
// target distributions (n x C each).
NodePtr softmax_xent_rows(NodePtr logits, Tensor target_dist);
NodePtr sum_all(NodePtr a);

// Reverse pass from a scalar (1 x 1) loss node. Seeds d(loss)/d(loss) = 1 and
// propagates in reverse topological order.
void backward(const NodePtr& loss);

void zero_grad(const std::vector<NodePtr>& params);

// Central-difference gradient checker: builds the loss twice per parameter
// entry at theta +/- eps and compares (f+ - f-)/2eps against the backward
// pass entrywise. Returns the max over entries of |a-n| / max(|a|,|n|,1e-8).
// The builder must be a pure function of the leaves it is handed.
double gradient_check(const std::function<NodePtr(const std::vector<NodePtr>&)>& build,
                      const std::vector<Tensor>& params, double eps);

}  // namespace ad
}  // namespace tskip
