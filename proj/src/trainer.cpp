#include "tskip/trainer.hpp"

#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace tskip {

namespace {

ModelParams clone_params(const ModelParams& p) {
    auto clone_gru = [](const GruCell& c) {
        return GruCell::from_tensors(c.w_h->value, c.w_x->value, c.w->value, c.u->value);
    };
    auto clone_cond = [](const CondGruCell& c) {
        return CondGruCell::from_tensors(c.w_h->value, c.w_x->value, c.w->value, c.u->value, c.w_z->value,
                                         c.u_z->value);
    };
    ModelParams out;
    out.embedding = ad::parameter(p.embedding->value);
    out.enc_fwd = clone_gru(p.enc_fwd);
    if (p.enc_bwd) out.enc_bwd = clone_gru(*p.enc_bwd);
    out.dec_next = clone_cond(p.dec_next);
    if (p.dec_prev) out.dec_prev = clone_cond(*p.dec_prev);
    out.prediction = ad::parameter(p.prediction->value);
    return out;
}

struct ShardResult {
    std::vector<Tensor> grads;  // aligned with ModelParams::all()
    double loss_sum = 0;
    long long tokens = 0;
};

ShardResult run_shard(const ModelParams& shared, const ModelConfig& cfg,
                      const std::vector<const SentencePair*>& work) {
    ModelParams local = clone_params(shared);
    std::vector<ad::NodePtr> leaves = local.all();
    ShardResult res;
    for (const SentencePair* pair : work) {
        SequenceLoss loss = next_sentence_loss_node(local, cfg, pair->source_ids, pair->target_ids);
        ad::backward(loss.sum);
        res.loss_sum += loss.sum->value.data[0];
        res.tokens += loss.tokens;
    }
    res.grads.reserve(leaves.size());
    for (const auto& l : leaves) res.grads.push_back(l->ensure_grad());
    return res;
}

}  // namespace

TrainResult train(ModelParams& params, const ModelConfig& cfg, const std::vector<SentencePair>& pairs,
                  const TrainOptions& opt, Adam* optimizer) {
    if (pairs.empty()) throw std::invalid_argument("train: empty corpus");
    if (opt.batch_size < 1 || opt.epochs < 0 || opt.max_len < 1 || opt.shards < 1)
        throw std::invalid_argument("train: bad hyperparameters");
    params.validate(cfg);

    // Fixed-length storage as trained; the loss masks padding back out.
    std::vector<SentencePair> padded(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        padded[i].source_ids = pad_clip(pairs[i].source_ids, opt.max_len).ids;
        padded[i].target_ids = pad_clip(pairs[i].target_ids, opt.max_len).ids;
    }

    std::vector<ad::NodePtr> leaves = params.all();
    Adam local_optimizer(leaves, opt.adam);
    Adam& adam = optimizer ? *optimizer : local_optimizer;

    Rng rng(opt.seed);
    std::vector<std::size_t> order(padded.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    result.epoch_nats.reserve(opt.epochs);
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0;
        long long epoch_tokens = 0;
        std::size_t n_batches = (order.size() + opt.batch_size - 1) / opt.batch_size;
        for (std::size_t b = 0; b < n_batches; ++b) {
            std::size_t begin = b * opt.batch_size;
            std::size_t end = std::min(order.size(), begin + opt.batch_size);
            std::size_t count = end - begin;

            ad::zero_grad(leaves);
            double batch_loss = 0;
            long long batch_tokens = 0;
            if (opt.shards == 1) {
                for (std::size_t i = begin; i < end; ++i) {
                    const SentencePair& pair = padded[order[i]];
                    SequenceLoss loss = next_sentence_loss_node(params, cfg, pair.source_ids, pair.target_ids);
                    ad::backward(loss.sum);
                    batch_loss += loss.sum->value.data[0];
                    batch_tokens += loss.tokens;
                }
            } else {
                std::size_t n_shards = std::min<std::size_t>(opt.shards, count);
                std::vector<std::future<ShardResult>> futures;
                for (std::size_t s = 0; s < n_shards; ++s) {
                    std::size_t lo = begin + s * count / n_shards;
                    std::size_t hi = begin + (s + 1) * count / n_shards;
                    std::vector<const SentencePair*> work;
                    for (std::size_t i = lo; i < hi; ++i) work.push_back(&padded[order[i]]);
                    futures.push_back(std::async(std::launch::async, run_shard, std::cref(params),
                                                 std::cref(cfg), std::move(work)));
                }
                // reduce in shard order
                for (auto& f : futures) {
                    ShardResult res = f.get();
                    for (std::size_t i = 0; i < leaves.size(); ++i)
                        leaves[i]->ensure_grad().add_inplace(res.grads[i]);
                    batch_loss += res.loss_sum;
                    batch_tokens += res.tokens;
                }
            }

            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                         ", batch " + std::to_string(b));

            real inv = real(1) / static_cast<real>(count);
            for (const auto& l : leaves) l->ensure_grad().scale_inplace(inv);
            clip_gradients(leaves, opt.clip);
            adam.step(leaves);
            epoch_loss += batch_loss;
            epoch_tokens += batch_tokens;
        }
        ad::zero_grad(leaves);
        double nats = epoch_tokens ? epoch_loss / epoch_tokens : 0.0;
        result.epoch_nats.push_back(nats);
        if (opt.on_epoch) opt.on_epoch(epoch, nats);
    }
    return result;
}

}  // namespace tskip
