#pragma once

#include <functional>
#include <vector>

#include "tskip/adam.hpp"
#include "tskip/corpus.hpp"
#include "tskip/model.hpp"

namespace tskip {

struct TrainOptions {
    int batch_size = 64;
    int max_len = 30;
    int epochs = 10;
    std::uint64_t seed = 1;
    AdamConfig adam;
    real clip = real(1);
    // Batch shards evaluated concurrently; gradients are reduced in fixed
    // shard order, so a given shard count is deterministic. 1 is fully
    // single-threaded.
    int shards = 1;
    // Called after each epoch with (epoch index, mean nats/token).
    std::function<void(int, double)> on_epoch;
};

struct TrainResult {
    std::vector<double> epoch_nats;  // mean nats per predicted token, per epoch
};

// Shuffles pairs each epoch (seeded), pads/clips to max_len, accumulates the
// batch gradient (sum over pairs / batch size), clamps it to [-clip, clip],
// and applies one Adam step per batch. Throws with the epoch/batch position
// if the loss goes non-finite.
TrainResult train(ModelParams& params, const ModelConfig& cfg, const std::vector<SentencePair>& pairs,
                  const TrainOptions& opt, Adam* optimizer = nullptr);

}  // namespace tskip
