#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "tskip/rng.hpp"

namespace tskip {

#ifdef TSKIP_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

// Dense 2-D array in row-major order. The single numeric currency of the
// project: parameters, hidden states, gradients and feature matrices are all
// Tensors. Row vectors (1 x d) represent single states/embeddings.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<real> data;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, real(0)) {}

    static Tensor zeros(int r, int c) { return Tensor(r, c); }
    static Tensor full(int r, int c, real v);
    static Tensor uniform(int r, int c, real lo, real hi, Rng& rng);
    static Tensor from(std::initializer_list<std::initializer_list<real>> rows);

    real& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    real at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    int size() const { return rows * cols; }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

    void fill(real v);
    void add_inplace(const Tensor& o);
    void scale_inplace(real c);
    real max_abs() const;
    bool all_finite() const;
};

std::string shape_str(const Tensor& t);

// Value-level kernels. The autodiff layer wraps these; evaluation and
// retrieval code uses them directly on frozen vectors.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor abs(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor scale(const Tensor& a, real c);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor mean_rows(const Tensor& h);
// Max over rows per column; when argmax_rows is non-null it receives the
// lowest row index attaining the maximum in each column.
Tensor max_rows(const Tensor& h, std::vector<int>* argmax_rows = nullptr);
// Row-wise softmax with max-subtraction stabilization.
Tensor softmax_rows(const Tensor& logits);

}  // namespace tskip
