#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tskip/gru.hpp"
#include "tskip/tokens.hpp"

namespace tskip {

enum class EncoderKind { uni, bi };
enum class Connection { plain, avg_max };
enum class Targets { next, both };

std::string to_string(EncoderKind k);
std::string to_string(Connection c);
std::string to_string(Targets t);
EncoderKind encoder_kind_from(const std::string& s);
Connection connection_from(const std::string& s);
Targets targets_from(const std::string& s);

struct ModelConfig {
    int vocab_size = 20000;
    int embed_dim = 300;
    EncoderKind encoder_kind = EncoderKind::uni;
    int encoder_dim = 600;  // total width for uni, per-direction width for bi
    Connection connection = Connection::plain;
    int decoder_dim = 600;
    Targets targets = Targets::next;

    int encoder_output_dim() const {
        return encoder_kind == EncoderKind::bi ? 2 * encoder_dim : encoder_dim;
    }
    // Dimension of the sentence vector: the encoder output for the plain
    // connection, twice that for average+max.
    int z_dim() const {
        return connection == Connection::avg_max ? 2 * encoder_output_dim() : encoder_output_dim();
    }
    void validate() const;
};

struct ParamCounts {
    long long rnns = 0;
    long long embedding = 0;
    long long prediction = 0;
};

// Closed-form parameter accounting: GRU(d,e) = 2d*d + 2d*e + d*e + d*d, a
// conditional cell adds 2d*z + d*z, embedding = V*e, prediction = d_dec*V.
// No bias terms anywhere.
ParamCounts count_params(const ModelConfig& cfg);

struct ModelParams {
    ad::NodePtr embedding;  // V x e
    GruCell enc_fwd;        // the encoder (uni) or its forward direction (bi)
    std::optional<GruCell> enc_bwd;
    CondGruCell dec_next;
    std::optional<CondGruCell> dec_prev;  // present iff targets = both
    ad::NodePtr prediction;               // d_dec x V; both decoders share it

    std::vector<std::pair<std::string, ad::NodePtr>> named() const;
    std::vector<ad::NodePtr> all() const;
    void validate(const ModelConfig& cfg) const;
};

// Fresh parameters, every entry uniform in [-init_range, init_range].
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed, real init_range = real(0.1));

struct SentenceVector {
    Tensor values;  // 1 x z_dim
};

// Runs the configured encoder over the embedded tokens and applies the
// connection layer: plain takes the final hidden state, avg_max concatenates
// the columnwise mean and max over all states. PAD ids are dropped before
// encoding.
ad::NodePtr encode_node(const ModelParams& p, const ModelConfig& cfg, const std::vector<int>& token_ids);
// Same, over caller-supplied embedded rows (N x e). Used by vocabulary
// expansion, where some rows do not come from the trained embedding matrix.
ad::NodePtr encode_embedded_node(const ModelParams& p, const ModelConfig& cfg, const Tensor& embedded);
SentenceVector encode(const ModelParams& p, const ModelConfig& cfg, const std::vector<int>& token_ids);

struct SequenceLoss {
    ad::NodePtr sum;  // 1 x 1, summed cross-entropy over predicted tokens
    int tokens = 0;   // number of predicted tokens (target words + <eos>)
};

// Teacher-forced reconstruction loss. The decoder starts from <bos> and
// predicts target w1..wT followed by <eos>; the loss is the summed
// softmax cross-entropy over those T+1 predictions. With targets = both,
// the previous-sentence decoder reconstructs the source from the encoded
// target (each sentence of the adjacent pair decodes its neighbor, which is
// the two-decoder skip-thought construction on a pair stream).
SequenceLoss next_sentence_loss_node(const ModelParams& p, const ModelConfig& cfg,
                                     const std::vector<int>& source_ids,
                                     const std::vector<int>& target_ids);
// Mean nats per predicted token.
real next_sentence_loss(const ModelParams& p, const ModelConfig& cfg, const std::vector<int>& source_ids,
                        const std::vector<int>& target_ids);

// Greedy argmax decoding from a sentence vector, ties broken toward the
// lowest token id; stops at <eos> or after max_len tokens. The returned ids
// exclude <bos>/<eos>.
std::vector<int> greedy_decode(const ModelParams& p, const ModelConfig& cfg, const SentenceVector& z,
                               int max_len);

}  // namespace tskip
