#include "tskip/model.hpp"

#include <stdexcept>

namespace tskip {

using ad::NodePtr;

std::string to_string(EncoderKind k) { return k == EncoderKind::uni ? "uni" : "bi"; }
std::string to_string(Connection c) { return c == Connection::plain ? "plain" : "avg_max"; }
std::string to_string(Targets t) { return t == Targets::next ? "next" : "both"; }

EncoderKind encoder_kind_from(const std::string& s) {
    if (s == "uni") return EncoderKind::uni;
    if (s == "bi") return EncoderKind::bi;
    throw std::invalid_argument("unknown encoder_kind '" + s + "' (expected uni|bi)");
}

Connection connection_from(const std::string& s) {
    if (s == "plain") return Connection::plain;
    if (s == "avg_max") return Connection::avg_max;
    throw std::invalid_argument("unknown connection '" + s + "' (expected plain|avg_max)");
}

Targets targets_from(const std::string& s) {
    if (s == "next") return Targets::next;
    if (s == "both") return Targets::both;
    throw std::invalid_argument("unknown targets '" + s + "' (expected next|both)");
}

void ModelConfig::validate() const {
    if (vocab_size < kNumReserved)
        throw std::invalid_argument("vocab_size must cover the " + std::to_string(kNumReserved) +
                                    " reserved tokens");
    if (embed_dim <= 0 || encoder_dim <= 0 || decoder_dim <= 0)
        throw std::invalid_argument("model dimensions must be positive");
}

namespace {

long long gru_count(long long d, long long e) {
    return 2 * d * d + 2 * d * e + d * e + d * d;
}

long long cond_gru_count(long long d, long long e, long long z) {
    return gru_count(d, e) + 2 * d * z + d * z;
}

}  // namespace

ParamCounts count_params(const ModelConfig& cfg) {
    cfg.validate();
    ParamCounts c;
    if (cfg.encoder_kind == EncoderKind::uni)
        c.rnns += gru_count(cfg.encoder_dim, cfg.embed_dim);
    else
        c.rnns += 2 * gru_count(cfg.encoder_dim, cfg.embed_dim);
    long long decoders = cfg.targets == Targets::both ? 2 : 1;
    c.rnns += decoders * cond_gru_count(cfg.decoder_dim, cfg.embed_dim, cfg.z_dim());
    c.embedding = static_cast<long long>(cfg.vocab_size) * cfg.embed_dim;
    c.prediction = static_cast<long long>(cfg.decoder_dim) * cfg.vocab_size;
    return c;
}

std::vector<std::pair<std::string, NodePtr>> ModelParams::named() const {
    std::vector<std::pair<std::string, NodePtr>> out;
    out.emplace_back("embedding.E", embedding);
    auto add_gru = [&](const std::string& prefix, const GruCell& c) {
        out.emplace_back(prefix + ".w_h", c.w_h);
        out.emplace_back(prefix + ".w_x", c.w_x);
        out.emplace_back(prefix + ".w", c.w);
        out.emplace_back(prefix + ".u", c.u);
    };
    auto add_cond = [&](const std::string& prefix, const CondGruCell& c) {
        add_gru(prefix, c);
        out.emplace_back(prefix + ".w_z", c.w_z);
        out.emplace_back(prefix + ".u_z", c.u_z);
    };
    if (enc_bwd) {
        add_gru("encoder.fwd", enc_fwd);
        add_gru("encoder.bwd", *enc_bwd);
    } else {
        add_gru("encoder", enc_fwd);
    }
    add_cond("decoder_next", dec_next);
    if (dec_prev) add_cond("decoder_prev", *dec_prev);
    out.emplace_back("prediction.P", prediction);
    return out;
}

std::vector<NodePtr> ModelParams::all() const {
    std::vector<NodePtr> out;
    for (auto& [name, node] : named()) out.push_back(node);
    return out;
}

void ModelParams::validate(const ModelConfig& cfg) const {
    cfg.validate();
    if (embedding->value.rows != cfg.vocab_size || embedding->value.cols != cfg.embed_dim)
        throw std::invalid_argument("embedding shape " + shape_str(embedding->value) + " does not match config");
    enc_fwd.validate();
    if (enc_fwd.hidden_dim() != cfg.encoder_dim || enc_fwd.input_dim() != cfg.embed_dim)
        throw std::invalid_argument("encoder dims do not match config");
    if ((cfg.encoder_kind == EncoderKind::bi) != enc_bwd.has_value())
        throw std::invalid_argument("encoder direction count does not match config");
    if (enc_bwd) {
        enc_bwd->validate();
        if (enc_bwd->hidden_dim() != cfg.encoder_dim || enc_bwd->input_dim() != cfg.embed_dim)
            throw std::invalid_argument("backward encoder dims do not match config");
    }
    dec_next.validate();
    if (dec_next.hidden_dim() != cfg.decoder_dim || dec_next.input_dim() != cfg.embed_dim ||
        dec_next.cond_dim() != cfg.z_dim())
        throw std::invalid_argument("decoder dims do not match config");
    if ((cfg.targets == Targets::both) != dec_prev.has_value())
        throw std::invalid_argument("decoder count does not match targets mode");
    if (dec_prev) {
        dec_prev->validate();
        if (dec_prev->hidden_dim() != cfg.decoder_dim || dec_prev->input_dim() != cfg.embed_dim ||
            dec_prev->cond_dim() != cfg.z_dim())
            throw std::invalid_argument("previous-decoder dims do not match config");
    }
    if (prediction->value.rows != cfg.decoder_dim || prediction->value.cols != cfg.vocab_size)
        throw std::invalid_argument("prediction shape " + shape_str(prediction->value) + " does not match config");
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed, real init_range) {
    cfg.validate();
    Rng rng(seed);
    ModelParams p;
    p.embedding = ad::parameter(Tensor::uniform(cfg.vocab_size, cfg.embed_dim, -init_range, init_range, rng));
    p.enc_fwd = GruCell::create(cfg.encoder_dim, cfg.embed_dim, rng, init_range);
    if (cfg.encoder_kind == EncoderKind::bi)
        p.enc_bwd = GruCell::create(cfg.encoder_dim, cfg.embed_dim, rng, init_range);
    p.dec_next = CondGruCell::create(cfg.decoder_dim, cfg.embed_dim, cfg.z_dim(), rng, init_range);
    if (cfg.targets == Targets::both)
        p.dec_prev = CondGruCell::create(cfg.decoder_dim, cfg.embed_dim, cfg.z_dim(), rng, init_range);
    p.prediction = ad::parameter(Tensor::uniform(cfg.decoder_dim, cfg.vocab_size, -init_range, init_range, rng));
    return p;
}

namespace {

std::vector<int> drop_padding(const std::vector<int>& ids, int vocab_size) {
    std::vector<int> out;
    out.reserve(ids.size());
    for (int id : ids) {
        if (id == kPadId) continue;
        if (id < 0 || id >= vocab_size)
            throw std::out_of_range("token id " + std::to_string(id) + " out of vocabulary [0, " +
                                    std::to_string(vocab_size) + ")");
        out.push_back(id);
    }
    return out;
}

NodePtr connect(const ModelConfig& cfg, const HiddenSequence& seq) {
    if (cfg.connection == Connection::plain) return seq.last;
    NodePtr states = seq.states();
    return ad::concat_cols(ad::mean_rows(states), ad::max_rows(states));
}

NodePtr run_encoder(const ModelParams& p, const ModelConfig& cfg, NodePtr xs) {
    HiddenSequence seq = (cfg.encoder_kind == EncoderKind::bi)
                             ? run_bidirectional(p.enc_fwd, *p.enc_bwd, xs)
                             : run_sequence(p.enc_fwd, xs);
    return connect(cfg, seq);
}

}  // namespace

NodePtr encode_node(const ModelParams& p, const ModelConfig& cfg, const std::vector<int>& token_ids) {
    std::vector<int> ids = drop_padding(token_ids, cfg.vocab_size);
    if (ids.empty()) throw std::invalid_argument("encode: empty token sequence");
    return run_encoder(p, cfg, ad::select_rows(p.embedding, ids));
}

NodePtr encode_embedded_node(const ModelParams& p, const ModelConfig& cfg, const Tensor& embedded) {
    if (embedded.rows < 1) throw std::invalid_argument("encode: empty token sequence");
    if (embedded.cols != cfg.embed_dim)
        throw std::invalid_argument("encode: embedded width " + shape_str(embedded) + " does not match embed_dim");
    return run_encoder(p, cfg, ad::constant(embedded));
}

SentenceVector encode(const ModelParams& p, const ModelConfig& cfg, const std::vector<int>& token_ids) {
    return SentenceVector{encode_node(p, cfg, token_ids)->value};
}

namespace {

// Summed teacher-forced cross-entropy of one decoder reconstructing
// `target` (plus <eos>) from conditioning vector z.
SequenceLoss decoder_loss(const ModelParams& p, const CondGruCell& dec, NodePtr z,
                          const std::vector<int>& target) {
    std::vector<int> inputs{kBosId};
    inputs.insert(inputs.end(), target.begin(), target.end());
    std::vector<int> outputs = target;
    outputs.push_back(kEosId);

    NodePtr h = ad::constant(Tensor::zeros(1, dec.hidden_dim()));
    NodePtr sum;
    for (std::size_t t = 0; t < outputs.size(); ++t) {
        NodePtr x = ad::select_rows(p.embedding, {inputs[t]});
        h = cond_gru_step(dec, h, x, z);
        NodePtr step = ad::softmax_xent(ad::matmul(h, p.prediction), outputs[t]);
        sum = sum ? ad::add(sum, step) : step;
    }
    return SequenceLoss{sum, static_cast<int>(outputs.size())};
}

}  // namespace

SequenceLoss next_sentence_loss_node(const ModelParams& p, const ModelConfig& cfg,
                                     const std::vector<int>& source_ids, const std::vector<int>& target_ids) {
    std::vector<int> src = drop_padding(source_ids, cfg.vocab_size);
    std::vector<int> tgt = drop_padding(target_ids, cfg.vocab_size);
    if (src.empty()) throw std::invalid_argument("next_sentence_loss: empty source");
    if (tgt.empty()) throw std::invalid_argument("next_sentence_loss: empty target");

    NodePtr z_src = run_encoder(p, cfg, ad::select_rows(p.embedding, src));
    SequenceLoss total = decoder_loss(p, p.dec_next, z_src, tgt);
    if (cfg.targets == Targets::both) {
        NodePtr z_tgt = run_encoder(p, cfg, ad::select_rows(p.embedding, tgt));
        SequenceLoss prev = decoder_loss(p, *p.dec_prev, z_tgt, src);
        total.sum = ad::add(total.sum, prev.sum);
        total.tokens += prev.tokens;
    }
    return total;
}

real next_sentence_loss(const ModelParams& p, const ModelConfig& cfg, const std::vector<int>& source_ids,
                        const std::vector<int>& target_ids) {
    SequenceLoss l = next_sentence_loss_node(p, cfg, source_ids, target_ids);
    return l.sum->value.data[0] / l.tokens;
}

std::vector<int> greedy_decode(const ModelParams& p, const ModelConfig& cfg, const SentenceVector& z,
                               int max_len) {
    if (max_len < 1) throw std::invalid_argument("greedy_decode: max_len must be >= 1");
    NodePtr zn = ad::constant(z.values);
    NodePtr h = ad::constant(Tensor::zeros(1, cfg.decoder_dim));
    int current = kBosId;
    std::vector<int> out;
    while (static_cast<int>(out.size()) < max_len) {
        NodePtr x = ad::select_rows(p.embedding, {current});
        h = cond_gru_step(p.dec_next, h, x, zn);
        Tensor logits = matmul(h->value, p.prediction->value);
        int best = 0;
        for (int j = 1; j < logits.cols; ++j)
            if (logits.data[j] > logits.data[best]) best = j;
        if (best == kEosId) break;
        out.push_back(best);
        current = best;
    }
    return out;
}

}  // namespace tskip
