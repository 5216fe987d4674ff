#pragma once

#include <vector>

#include "tskip/autodiff.hpp"

namespace tskip {

// GRU cell parameters. States are 1 x d row vectors; the weights are stored
// in the [out x in] orientation, so each product W.v becomes v.W^T in row
// form. The gate pre-activation stacks update before reset: [m; r].
// There are no bias vectors.
struct GruCell {
    ad::NodePtr w_h;  // 2d x d, gates from previous hidden state
    ad::NodePtr w_x;  // 2d x e, gates from input
    ad::NodePtr w;    // d x e, candidate from input
    ad::NodePtr u;    // d x d, candidate from reset-gated hidden state

    int hidden_dim() const { return u->value.rows; }
    int input_dim() const { return w->value.cols; }

    static GruCell create(int d, int e, Rng& rng, real init_range);
    static GruCell from_tensors(Tensor w_h, Tensor w_x, Tensor w, Tensor u);

    std::vector<ad::NodePtr> params() const { return {w_h, w_x, w, u}; }
    void validate() const;
};

// Conditional GRU: a GRU whose gate pre-activation gains +W_z.z and whose
// candidate gains +U_z.z, for a fixed conditioning vector z fed at every
// step. With z = 0 it reduces exactly to the plain cell.
struct CondGruCell : GruCell {
    ad::NodePtr w_z;  // 2d x z
    ad::NodePtr u_z;  // d x z

    int cond_dim() const { return w_z->value.cols; }

    static CondGruCell create(int d, int e, int z, Rng& rng, real init_range);
    static CondGruCell from_tensors(Tensor w_h, Tensor w_x, Tensor w, Tensor u, Tensor w_z, Tensor u_z);

    std::vector<ad::NodePtr> params() const;
    void validate() const;
};

// One step: [m; r] = sigmoid(h_prev.Wh^T + x.Wx^T),
// hcand = tanh(x.W^T + (r (.) h_prev).U^T), h = (1-m) (.) h_prev + m (.) hcand.
ad::NodePtr gru_step(const GruCell& c, ad::NodePtr h_prev, ad::NodePtr x);
ad::NodePtr cond_gru_step(const CondGruCell& c, ad::NodePtr h_prev, ad::NodePtr x, ad::NodePtr z);

struct HiddenSequence {
    std::vector<ad::NodePtr> steps;  // one 1 x d state per time step
    ad::NodePtr last;                // uni: steps.back(); bi: concat of both directions' final states

    // N x d matrix of all states, one row per step.
    ad::NodePtr states() const { return ad::concat_rows(steps); }
};

// Folds gru_step over the rows of xs (N x e, N >= 1) starting from h0
// (zero when null).
HiddenSequence run_sequence(const GruCell& c, ad::NodePtr xs, ad::NodePtr h0 = nullptr);

// Runs fwd over x1..xN and bwd over xN..x1. State at step t is
// concat(h_fwd^t, h_bwd^{N+1-t}); last is the concatenation of the final
// states of the two directions.
HiddenSequence run_bidirectional(const GruCell& fwd, const GruCell& bwd, ad::NodePtr xs);

}  // namespace tskip
