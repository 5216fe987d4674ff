#pragma once

#include <vector>

#include "tskip/autodiff.hpp"

namespace tskip {

struct AdamConfig {
    real alpha = real(1e-3);
    real beta1 = real(0.9);
    real beta2 = real(0.999);
    real eps = real(1e-8);
};

// Entrywise clamp to [-bound, bound]. Hard value clipping, not norm scaling.
void clip_inplace(Tensor& t, real bound);
void clip_gradients(const std::vector<ad::NodePtr>& params, real bound = real(1));

// Bias-corrected Adam over a fixed parameter list. Moments are kept in list
// order, so the caller must pass the same list to every step.
class Adam {
public:
    Adam(const std::vector<ad::NodePtr>& params, AdamConfig cfg = {});

    // theta <- theta - alpha * m_hat / (sqrt(v_hat) + eps), reading each
    // parameter's accumulated gradient. Does not zero gradients.
    void step(const std::vector<ad::NodePtr>& params);

    long long steps_taken() const { return t_; }
    const AdamConfig& config() const { return cfg_; }
    const std::vector<Tensor>& first_moments() const { return m_; }
    const std::vector<Tensor>& second_moments() const { return v_; }
    void restore(long long t, std::vector<Tensor> m, std::vector<Tensor> v);

private:
    AdamConfig cfg_;
    std::vector<Tensor> m_, v_;
    long long t_ = 0;
};

}  // namespace tskip
