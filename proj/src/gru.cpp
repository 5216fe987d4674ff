#include "tskip/gru.hpp"

#include <stdexcept>

namespace tskip {

using ad::NodePtr;

GruCell GruCell::create(int d, int e, Rng& rng, real init_range) {
    GruCell c;
    c.w_h = ad::parameter(Tensor::uniform(2 * d, d, -init_range, init_range, rng));
    c.w_x = ad::parameter(Tensor::uniform(2 * d, e, -init_range, init_range, rng));
    c.w = ad::parameter(Tensor::uniform(d, e, -init_range, init_range, rng));
    c.u = ad::parameter(Tensor::uniform(d, d, -init_range, init_range, rng));
    return c;
}

GruCell GruCell::from_tensors(Tensor w_h, Tensor w_x, Tensor w, Tensor u) {
    GruCell c;
    c.w_h = ad::parameter(std::move(w_h));
    c.w_x = ad::parameter(std::move(w_x));
    c.w = ad::parameter(std::move(w));
    c.u = ad::parameter(std::move(u));
    c.validate();
    return c;
}

void GruCell::validate() const {
    int d = u->value.rows;
    int e = w->value.cols;
    if (u->value.cols != d || w->value.rows != d || w_h->value.rows != 2 * d || w_h->value.cols != d ||
        w_x->value.rows != 2 * d || w_x->value.cols != e)
        throw std::invalid_argument("GruCell: inconsistent shapes w_h=" + shape_str(w_h->value) +
                                    " w_x=" + shape_str(w_x->value) + " w=" + shape_str(w->value) +
                                    " u=" + shape_str(u->value));
}

CondGruCell CondGruCell::create(int d, int e, int z, Rng& rng, real init_range) {
    CondGruCell c;
    static_cast<GruCell&>(c) = GruCell::create(d, e, rng, init_range);
    c.w_z = ad::parameter(Tensor::uniform(2 * d, z, -init_range, init_range, rng));
    c.u_z = ad::parameter(Tensor::uniform(d, z, -init_range, init_range, rng));
    return c;
}

CondGruCell CondGruCell::from_tensors(Tensor w_h, Tensor w_x, Tensor w, Tensor u, Tensor w_z, Tensor u_z) {
    CondGruCell c;
    static_cast<GruCell&>(c) = GruCell::from_tensors(std::move(w_h), std::move(w_x), std::move(w), std::move(u));
    c.w_z = ad::parameter(std::move(w_z));
    c.u_z = ad::parameter(std::move(u_z));
    c.validate();
    return c;
}

std::vector<NodePtr> CondGruCell::params() const {
    return {w_h, w_x, w, u, w_z, u_z};
}

void CondGruCell::validate() const {
    GruCell::validate();
    int d = hidden_dim();
    int z = w_z->value.cols;
    if (w_z->value.rows != 2 * d || u_z->value.rows != d || u_z->value.cols != z)
        throw std::invalid_argument("CondGruCell: inconsistent shapes w_z=" + shape_str(w_z->value) +
                                    " u_z=" + shape_str(u_z->value));
}

namespace {

// Shared tail of both cells: given the stacked gate pre-activation and the
// candidate pre-activation contributions, produce the next state.
NodePtr gru_combine(const GruCell& c, NodePtr h_prev, NodePtr x, NodePtr gate_pre, NodePtr cand_extra) {
    int d = c.hidden_dim();
    NodePtr gates = ad::sigmoid(gate_pre);
    NodePtr m = ad::slice_cols(gates, 0, d);
    NodePtr r = ad::slice_cols(gates, d, d);
    NodePtr cand_pre = ad::add(ad::matmul(x, ad::transpose(c.w)),
                               ad::matmul(ad::hadamard(r, h_prev), ad::transpose(c.u)));
    if (cand_extra) cand_pre = ad::add(cand_pre, cand_extra);
    NodePtr h_cand = ad::tanh(cand_pre);
    // h = (1-m) (.) h_prev + m (.) h_cand = h_prev + m (.) (h_cand - h_prev)
    return ad::add(h_prev, ad::hadamard(m, ad::sub(h_cand, h_prev)));
}

}  // namespace

NodePtr gru_step(const GruCell& c, NodePtr h_prev, NodePtr x) {
    NodePtr gate_pre = ad::add(ad::matmul(h_prev, ad::transpose(c.w_h)),
                               ad::matmul(x, ad::transpose(c.w_x)));
    return gru_combine(c, h_prev, x, gate_pre, nullptr);
}

NodePtr cond_gru_step(const CondGruCell& c, NodePtr h_prev, NodePtr x, NodePtr z) {
    NodePtr gate_pre = ad::add(ad::add(ad::matmul(h_prev, ad::transpose(c.w_h)),
                                       ad::matmul(x, ad::transpose(c.w_x))),
                               ad::matmul(z, ad::transpose(c.w_z)));
    NodePtr cand_extra = ad::matmul(z, ad::transpose(c.u_z));
    return gru_combine(c, h_prev, x, gate_pre, cand_extra);
}

HiddenSequence run_sequence(const GruCell& c, NodePtr xs, NodePtr h0) {
    int n = xs->value.rows;
    if (n < 1) throw std::invalid_argument("run_sequence: empty sequence");
    if (xs->value.cols != c.input_dim())
        throw std::invalid_argument("run_sequence: input dim " + shape_str(xs->value) + " does not match cell e=" +
                                    std::to_string(c.input_dim()));
    NodePtr h = h0 ? h0 : ad::constant(Tensor::zeros(1, c.hidden_dim()));
    HiddenSequence seq;
    seq.steps.reserve(n);
    for (int t = 0; t < n; ++t) {
        h = gru_step(c, h, ad::select_rows(xs, {t}));
        seq.steps.push_back(h);
    }
    seq.last = h;
    return seq;
}

HiddenSequence run_bidirectional(const GruCell& fwd, const GruCell& bwd, NodePtr xs) {
    if (fwd.input_dim() != bwd.input_dim())
        throw std::invalid_argument("run_bidirectional: input dims differ: " + std::to_string(fwd.input_dim()) +
                                    " vs " + std::to_string(bwd.input_dim()));
    int n = xs->value.rows;
    if (n < 1) throw std::invalid_argument("run_bidirectional: empty sequence");

    NodePtr hf = ad::constant(Tensor::zeros(1, fwd.hidden_dim()));
    NodePtr hb = ad::constant(Tensor::zeros(1, bwd.hidden_dim()));
    std::vector<NodePtr> f_states(n), b_states(n);  // b_states[k]: after consuming x^N..x^{N-k}
    for (int t = 0; t < n; ++t) {
        hf = gru_step(fwd, hf, ad::select_rows(xs, {t}));
        f_states[t] = hf;
        hb = gru_step(bwd, hb, ad::select_rows(xs, {n - 1 - t}));
        b_states[t] = hb;
    }

    HiddenSequence seq;
    seq.steps.reserve(n);
    for (int t = 0; t < n; ++t)
        seq.steps.push_back(ad::concat_cols(f_states[t], b_states[n - 1 - t]));
    seq.last = ad::concat_cols(f_states[n - 1], b_states[n - 1]);
    return seq;
}

}  // namespace tskip
