#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tskip/adam.hpp"
#include "tskip/embeddings.hpp"
#include "tskip/model.hpp"
#include "tskip/vocab.hpp"

namespace tskip {

struct AdamStateBlob {
    long long t = 0;
    AdamConfig config;
    // Aligned with the model's named() parameter order.
    std::vector<Tensor> m, v;
};

// Everything needed to embed words outside the training vocabulary: the
// learned projection and the pretrained vectors it applies to.
struct ExpansionBlob {
    Tensor projection;                   // e' x e
    std::vector<std::string> tokens;     // pretrained tokens, row order of table
    Tensor table;                        // n x e'

    PretrainedEmbeddings pretrained() const { return make_pretrained(tokens, table); }
};

// On-disk container: magic "TSKP", u32 version, length-prefixed config and
// vocabulary blocks, then named tensor records, then optional optimizer and
// expansion sections. Little-endian throughout.
struct Checkpoint {
    std::uint32_t version = 1;
    ModelConfig config;
    Vocabulary vocab;
    std::vector<std::pair<std::string, Tensor>> tensors;
    std::optional<AdamStateBlob> adam;
    std::optional<ExpansionBlob> expansion;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
// Validates magic, version, and structural consistency; truncation and
// shape problems raise distinct errors.
Checkpoint load_checkpoint(const std::string& path);

Checkpoint make_checkpoint(const ModelConfig& cfg, const Vocabulary& vocab, const ModelParams& params);
// Rebuilds parameter nodes from the stored tensors, checking shapes against
// the stored config.
ModelParams params_from_checkpoint(const Checkpoint& ckpt);

std::string config_to_text(const ModelConfig& cfg);
ModelConfig config_from_text(const std::string& text);

}  // namespace tskip
