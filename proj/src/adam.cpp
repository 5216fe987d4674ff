#include "tskip/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace tskip {

void clip_inplace(Tensor& t, real bound) {
    for (auto& x : t.data) {
        if (x > bound) x = bound;
        if (x < -bound) x = -bound;
    }
}

void clip_gradients(const std::vector<ad::NodePtr>& params, real bound) {
    for (const auto& p : params) clip_inplace(p->ensure_grad(), bound);
}

Adam::Adam(const std::vector<ad::NodePtr>& params, AdamConfig cfg) : cfg_(cfg) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
        m_.emplace_back(p->value.rows, p->value.cols);
        v_.emplace_back(p->value.rows, p->value.cols);
    }
}

void Adam::step(const std::vector<ad::NodePtr>& params) {
    if (params.size() != m_.size())
        throw std::invalid_argument("Adam::step: parameter list size changed");
    ++t_;
    real bc1 = real(1) - std::pow(cfg_.beta1, static_cast<real>(t_));
    real bc2 = real(1) - std::pow(cfg_.beta2, static_cast<real>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& theta = params[i]->value;
        const Tensor& g = params[i]->ensure_grad();
        if (!theta.same_shape(m_[i]))
            throw std::invalid_argument("Adam::step: parameter " + std::to_string(i) + " shape changed");
        for (int j = 0; j < theta.size(); ++j) {
            real gj = g.data[j];
            m_[i].data[j] = cfg_.beta1 * m_[i].data[j] + (real(1) - cfg_.beta1) * gj;
            v_[i].data[j] = cfg_.beta2 * v_[i].data[j] + (real(1) - cfg_.beta2) * gj * gj;
            real m_hat = m_[i].data[j] / bc1;
            real v_hat = v_[i].data[j] / bc2;
            theta.data[j] -= cfg_.alpha * m_hat / (std::sqrt(v_hat) + cfg_.eps);
        }
    }
}

void Adam::restore(long long t, std::vector<Tensor> m, std::vector<Tensor> v) {
    if (m.size() != m_.size() || v.size() != v_.size())
        throw std::invalid_argument("Adam::restore: moment list size mismatch");
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m[i].same_shape(m_[i]) || !v[i].same_shape(v_[i]))
            throw std::invalid_argument("Adam::restore: moment shape mismatch at " + std::to_string(i));
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
}

}  // namespace tskip
