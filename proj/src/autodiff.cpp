#include "tskip/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace tskip {
namespace ad {

Tensor& Node::ensure_grad() {
    if (grad.rows == 0) grad = Tensor::zeros(value.rows, value.cols);
    return grad;
}

NodePtr constant(Tensor v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    return n;
}

NodePtr parameter(Tensor v) {
    auto n = constant(std::move(v));
    n->requires_grad = true;
    return n;
}

namespace {

NodePtr make_op(Tensor value, std::vector<NodePtr> inputs, std::function<void(Node&)> backprop) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    for (const auto& in : inputs)
        if (in->requires_grad) n->requires_grad = true;
    n->inputs = std::move(inputs);
    n->backprop = std::move(backprop);
    return n;
}

}  // namespace

NodePtr matmul(NodePtr a, NodePtr b) {
    Tensor v = tskip::matmul(a->value, b->value);
    return make_op(std::move(v), {a, b}, [](Node& self) {
        const Tensor& g = self.grad;
        Node& a = *self.inputs[0];
        Node& b = *self.inputs[1];
        // dA = G * B^T, dB = A^T * G
        a.ensure_grad().add_inplace(tskip::matmul(g, tskip::transpose(b.value)));
        b.ensure_grad().add_inplace(tskip::matmul(tskip::transpose(a.value), g));
    });
}

NodePtr transpose(NodePtr a) {
    return make_op(tskip::transpose(a->value), {a}, [](Node& self) {
        self.inputs[0]->ensure_grad().add_inplace(tskip::transpose(self.grad));
    });
}

NodePtr add(NodePtr a, NodePtr b) {
    return make_op(tskip::add(a->value, b->value), {a, b}, [](Node& self) {
        self.inputs[0]->ensure_grad().add_inplace(self.grad);
        self.inputs[1]->ensure_grad().add_inplace(self.grad);
    });
}

NodePtr sub(NodePtr a, NodePtr b) {
    return make_op(tskip::sub(a->value, b->value), {a, b}, [](Node& self) {
        self.inputs[0]->ensure_grad().add_inplace(self.grad);
        Tensor& gb = self.inputs[1]->ensure_grad();
        for (int i = 0; i < gb.size(); ++i) gb.data[i] -= self.grad.data[i];
    });
}

NodePtr hadamard(NodePtr a, NodePtr b) {
    return make_op(tskip::hadamard(a->value, b->value), {a, b}, [](Node& self) {
        Node& a = *self.inputs[0];
        Node& b = *self.inputs[1];
        a.ensure_grad().add_inplace(tskip::hadamard(self.grad, b.value));
        b.ensure_grad().add_inplace(tskip::hadamard(self.grad, a.value));
    });
}

NodePtr abs(NodePtr a) {
    return make_op(tskip::abs(a->value), {a}, [](Node& self) {
        const Tensor& x = self.inputs[0]->value;
        Tensor& gx = self.inputs[0]->ensure_grad();
        // subgradient 0 at x = 0
        for (int i = 0; i < x.size(); ++i) {
            real s = x.data[i] > 0 ? real(1) : (x.data[i] < 0 ? real(-1) : real(0));
            gx.data[i] += s * self.grad.data[i];
        }
    });
}

NodePtr sigmoid(NodePtr a) {
    return make_op(tskip::sigmoid(a->value), {a}, [](Node& self) {
        const Tensor& y = self.value;
        Tensor& gx = self.inputs[0]->ensure_grad();
        for (int i = 0; i < y.size(); ++i)
            gx.data[i] += y.data[i] * (real(1) - y.data[i]) * self.grad.data[i];
    });
}

NodePtr tanh(NodePtr a) {
    return make_op(tskip::tanh(a->value), {a}, [](Node& self) {
        const Tensor& y = self.value;
        Tensor& gx = self.inputs[0]->ensure_grad();
        for (int i = 0; i < y.size(); ++i)
            gx.data[i] += (real(1) - y.data[i] * y.data[i]) * self.grad.data[i];
    });
}

NodePtr scale(NodePtr a, real c) {
    return make_op(tskip::scale(a->value, c), {a}, [c](Node& self) {
        Tensor& gx = self.inputs[0]->ensure_grad();
        for (int i = 0; i < gx.size(); ++i) gx.data[i] += c * self.grad.data[i];
    });
}

NodePtr concat_cols(NodePtr a, NodePtr b) {
    return make_op(tskip::concat_cols(a->value, b->value), {a, b}, [](Node& self) {
        Node& a = *self.inputs[0];
        Node& b = *self.inputs[1];
        Tensor& ga = a.ensure_grad();
        Tensor& gb = b.ensure_grad();
        for (int i = 0; i < self.grad.rows; ++i) {
            for (int j = 0; j < ga.cols; ++j) ga.at(i, j) += self.grad.at(i, j);
            for (int j = 0; j < gb.cols; ++j) gb.at(i, j) += self.grad.at(i, ga.cols + j);
        }
    });
}

NodePtr concat_rows(std::vector<NodePtr> rows) {
    if (rows.empty()) throw std::invalid_argument("concat_rows: empty input");
    int cols = rows[0]->value.cols;
    int total = 0;
    for (const auto& r : rows) {
        if (r->value.cols != cols)
            throw std::invalid_argument("concat_rows: column counts differ: " +
                                        shape_str(rows[0]->value) + " vs " + shape_str(r->value));
        total += r->value.rows;
    }
    Tensor v(total, cols);
    int off = 0;
    for (const auto& r : rows) {
        for (int i = 0; i < r->value.rows; ++i)
            for (int j = 0; j < cols; ++j) v.at(off + i, j) = r->value.at(i, j);
        off += r->value.rows;
    }
    return make_op(std::move(v), std::move(rows), [](Node& self) {
        int off = 0;
        for (auto& in : self.inputs) {
            Tensor& g = in->ensure_grad();
            for (int i = 0; i < g.rows; ++i)
                for (int j = 0; j < g.cols; ++j) g.at(i, j) += self.grad.at(off + i, j);
            off += g.rows;
        }
    });
}

NodePtr slice_cols(NodePtr a, int first, int count) {
    if (first < 0 || count < 0 || first + count > a->value.cols)
        throw std::invalid_argument("slice_cols: range [" + std::to_string(first) + ", " +
                                    std::to_string(first + count) + ") out of " + shape_str(a->value));
    Tensor v(a->value.rows, count);
    for (int i = 0; i < v.rows; ++i)
        for (int j = 0; j < count; ++j) v.at(i, j) = a->value.at(i, first + j);
    return make_op(std::move(v), {a}, [first, count](Node& self) {
        Tensor& g = self.inputs[0]->ensure_grad();
        for (int i = 0; i < self.grad.rows; ++i)
            for (int j = 0; j < count; ++j) g.at(i, first + j) += self.grad.at(i, j);
    });
}

NodePtr select_rows(NodePtr a, std::vector<int> row_ids) {
    const Tensor& src = a->value;
    for (int id : row_ids)
        if (id < 0 || id >= src.rows)
            throw std::out_of_range("select_rows: row " + std::to_string(id) + " out of " + shape_str(src));
    Tensor v(static_cast<int>(row_ids.size()), src.cols);
    for (std::size_t i = 0; i < row_ids.size(); ++i)
        for (int j = 0; j < src.cols; ++j) v.at(static_cast<int>(i), j) = src.at(row_ids[i], j);
    return make_op(std::move(v), {a}, [ids = std::move(row_ids)](Node& self) {
        Tensor& g = self.inputs[0]->ensure_grad();
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (int j = 0; j < g.cols; ++j) g.at(ids[i], j) += self.grad.at(static_cast<int>(i), j);
    });
}

NodePtr mean_rows(NodePtr h) {
    int n = h->value.rows;
    return make_op(tskip::mean_rows(h->value), {h}, [n](Node& self) {
        Tensor& g = self.inputs[0]->ensure_grad();
        real inv = real(1) / n;
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) g.at(i, j) += inv * self.grad.at(0, j);
    });
}

NodePtr max_rows(NodePtr h) {
    std::vector<int> argmax;
    Tensor v = tskip::max_rows(h->value, &argmax);
    return make_op(std::move(v), {h}, [argmax = std::move(argmax)](Node& self) {
        Tensor& g = self.inputs[0]->ensure_grad();
        for (int j = 0; j < g.cols; ++j) g.at(argmax[j], j) += self.grad.at(0, j);
    });
}

NodePtr softmax_xent(NodePtr logits, int target) {
    const Tensor& l = logits->value;
    if (l.rows != 1) throw std::invalid_argument("softmax_xent: logits must be 1 x V, got " + shape_str(l));
    if (target < 0 || target >= l.cols)
        throw std::out_of_range("softmax_xent: target " + std::to_string(target) + " out of [0, " +
                                std::to_string(l.cols) + ")");
    real m = l.data[0];
    for (int j = 1; j < l.cols; ++j) m = std::max(m, l.data[j]);
    real z = 0;
    for (int j = 0; j < l.cols; ++j) z += std::exp(l.data[j] - m);
    Tensor v(1, 1);
    v.data[0] = std::log(z) + m - l.data[target];
    return make_op(std::move(v), {logits}, [target](Node& self) {
        Tensor p = softmax_rows(self.inputs[0]->value);
        p.data[target] -= real(1);
        Tensor& g = self.inputs[0]->ensure_grad();
        real gy = self.grad.data[0];
        for (int j = 0; j < g.cols; ++j) g.data[j] += gy * p.data[j];
    });
}

NodePtr softmax_xent_rows(NodePtr logits, Tensor target_dist) {
    const Tensor& l = logits->value;
    if (!l.same_shape(target_dist))
        throw std::invalid_argument("softmax_xent_rows: shape mismatch " + shape_str(l) + " vs " +
                                    shape_str(target_dist));
    Tensor p = softmax_rows(l);
    real loss = 0;
    for (int i = 0; i < l.rows; ++i) {
        real m = l.at(i, 0);
        for (int j = 1; j < l.cols; ++j) m = std::max(m, l.at(i, j));
        real z = 0;
        for (int j = 0; j < l.cols; ++j) z += std::exp(l.at(i, j) - m);
        real logz = std::log(z) + m;
        for (int j = 0; j < l.cols; ++j)
            if (target_dist.at(i, j) != real(0)) loss += target_dist.at(i, j) * (logz - l.at(i, j));
    }
    Tensor v(1, 1);
    v.data[0] = loss / l.rows;
    return make_op(std::move(v), {logits},
                   [p = std::move(p), r = std::move(target_dist)](Node& self) {
                       Tensor& g = self.inputs[0]->ensure_grad();
                       real gy = self.grad.data[0] / p.rows;
                       for (int i = 0; i < p.size(); ++i) g.data[i] += gy * (p.data[i] - r.data[i]);
                   });
}

NodePtr sum_all(NodePtr a) {
    Tensor v(1, 1);
    for (real x : a->value.data) v.data[0] += x;
    return make_op(std::move(v), {a}, [](Node& self) {
        Tensor& g = self.inputs[0]->ensure_grad();
        real gy = self.grad.data[0];
        for (int i = 0; i < g.size(); ++i) g.data[i] += gy;
    });
}

void backward(const NodePtr& loss) {
    if (loss->value.rows != 1 || loss->value.cols != 1)
        throw std::invalid_argument("backward: loss must be 1 x 1, got " + shape_str(loss->value));

    // Iterative post-order DFS; creation order already topologically sorts
    // the graph, but DFS keeps the pass local to nodes reachable from loss.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(loss.get(), 0);
    visited.insert(loss.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            Node* in = node->inputs[next++].get();
            if (in->requires_grad && visited.insert(in).second) stack.emplace_back(in, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss->ensure_grad().data[0] += real(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backprop && n->requires_grad) {
            n->ensure_grad();
            n->backprop(*n);
        }
    }
}

void zero_grad(const std::vector<NodePtr>& params) {
    for (const auto& p : params)
        if (p->grad.rows != 0) p->grad.fill(real(0));
}

double gradient_check(const std::function<NodePtr(const std::vector<NodePtr>&)>& build,
                      const std::vector<Tensor>& params, double eps) {
    std::vector<NodePtr> leaves;
    leaves.reserve(params.size());
    for (const auto& t : params) leaves.push_back(parameter(t));

    NodePtr loss = build(leaves);
    backward(loss);
    std::vector<Tensor> analytic;
    analytic.reserve(leaves.size());
    for (const auto& l : leaves) analytic.push_back(l->ensure_grad());

    auto eval_at = [&](const std::vector<Tensor>& theta) {
        std::vector<NodePtr> ls;
        ls.reserve(theta.size());
        for (const auto& t : theta) ls.push_back(parameter(t));
        double f = build(ls)->value.data[0];
        if (!std::isfinite(f)) throw std::runtime_error("gradient_check: non-finite loss at perturbed point");
        return f;
    };

    double max_rel = 0;
    std::vector<Tensor> theta = params;
    for (std::size_t p = 0; p < theta.size(); ++p) {
        for (int i = 0; i < theta[p].size(); ++i) {
            real saved = theta[p].data[i];
            theta[p].data[i] = saved + static_cast<real>(eps);
            double fp = eval_at(theta);
            theta[p].data[i] = saved - static_cast<real>(eps);
            double fm = eval_at(theta);
            theta[p].data[i] = saved;
            double numeric = (fp - fm) / (2 * eps);
            double a = analytic[p].data[i];
            double rel = std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-8});
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace ad
}  // namespace tskip
