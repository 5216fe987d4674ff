#include "tskip/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace tskip {

Tensor Tensor::full(int r, int c, real v) {
    Tensor t(r, c);
    t.fill(v);
    return t;
}

Tensor Tensor::uniform(int r, int c, real lo, real hi, Rng& rng) {
    Tensor t(r, c);
    for (auto& x : t.data) x = static_cast<real>(rng.uniform(lo, hi));
    return t;
}

Tensor Tensor::from(std::initializer_list<std::initializer_list<real>> rows) {
    Tensor t(static_cast<int>(rows.size()), rows.size() ? static_cast<int>(rows.begin()->size()) : 0);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != t.cols)
            throw std::invalid_argument("Tensor::from: ragged rows");
        int j = 0;
        for (real v : row) t.at(i, j++) = v;
        ++i;
    }
    return t;
}

void Tensor::fill(real v) {
    for (auto& x : data) x = v;
}

void Tensor::add_inplace(const Tensor& o) {
    if (!same_shape(o))
        throw std::invalid_argument("add_inplace: shape mismatch " + shape_str(*this) + " vs " + shape_str(o));
    for (int i = 0; i < size(); ++i) data[i] += o.data[i];
}

void Tensor::scale_inplace(real c) {
    for (auto& x : data) x *= c;
}

real Tensor::max_abs() const {
    real m = 0;
    for (real x : data) m = std::max(m, std::abs(x));
    return m;
}

bool Tensor::all_finite() const {
    for (real x : data)
        if (!std::isfinite(x)) return false;
    return true;
}

std::string shape_str(const Tensor& t) {
    return std::to_string(t.rows) + "x" + std::to_string(t.cols);
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: inner dimensions disagree: " + shape_str(a) + " vs " + shape_str(b));
    Tensor out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            real aik = a.at(i, k);
            if (aik == real(0)) continue;
            const real* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
            real* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
            for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    Tensor out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = a;
    for (int i = 0; i < out.size(); ++i) out.data[i] += b.data[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = a;
    for (int i = 0; i < out.size(); ++i) out.data[i] -= b.data[i];
    return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "hadamard");
    Tensor out = a;
    for (int i = 0; i < out.size(); ++i) out.data[i] *= b.data[i];
    return out;
}

Tensor abs(const Tensor& a) {
    Tensor out = a;
    for (auto& x : out.data) x = std::abs(x);
    return out;
}

Tensor sigmoid(const Tensor& a) {
    Tensor out = a;
    for (auto& x : out.data) x = real(1) / (real(1) + std::exp(-x));
    return out;
}

Tensor tanh(const Tensor& a) {
    Tensor out = a;
    for (auto& x : out.data) x = std::tanh(x);
    return out;
}

Tensor scale(const Tensor& a, real c) {
    Tensor out = a;
    out.scale_inplace(c);
    return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    if (a.rows != b.rows)
        throw std::invalid_argument("concat_cols: row counts differ: " + shape_str(a) + " vs " + shape_str(b));
    Tensor out(a.rows, a.cols + b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) out.at(i, j) = a.at(i, j);
        for (int j = 0; j < b.cols; ++j) out.at(i, a.cols + j) = b.at(i, j);
    }
    return out;
}

Tensor mean_rows(const Tensor& h) {
    if (h.rows < 1) throw std::invalid_argument("mean_rows: empty input");
    Tensor out(1, h.cols);
    for (int i = 0; i < h.rows; ++i)
        for (int j = 0; j < h.cols; ++j) out.at(0, j) += h.at(i, j);
    out.scale_inplace(real(1) / h.rows);
    return out;
}

Tensor max_rows(const Tensor& h, std::vector<int>* argmax_rows) {
    if (h.rows < 1) throw std::invalid_argument("max_rows: empty input");
    Tensor out(1, h.cols);
    if (argmax_rows) argmax_rows->assign(h.cols, 0);
    for (int j = 0; j < h.cols; ++j) {
        real best = h.at(0, j);
        int best_row = 0;
        for (int i = 1; i < h.rows; ++i) {
            if (h.at(i, j) > best) {
                best = h.at(i, j);
                best_row = i;
            }
        }
        out.at(0, j) = best;
        if (argmax_rows) (*argmax_rows)[j] = best_row;
    }
    return out;
}

Tensor softmax_rows(const Tensor& logits) {
    Tensor out = logits;
    for (int i = 0; i < logits.rows; ++i) {
        real m = logits.at(i, 0);
        for (int j = 1; j < logits.cols; ++j) m = std::max(m, logits.at(i, j));
        real z = 0;
        for (int j = 0; j < logits.cols; ++j) {
            real e = std::exp(logits.at(i, j) - m);
            out.at(i, j) = e;
            z += e;
        }
        for (int j = 0; j < logits.cols; ++j) out.at(i, j) /= z;
    }
    return out;
}

}  // namespace tskip
