#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "tskip/tensor.hpp"
#include "tskip/vocab.hpp"

namespace tskip {

// Pretrained word vectors in a shared dimension e'.
struct PretrainedEmbeddings {
    std::vector<std::string> tokens;
    std::unordered_map<std::string, int> index;  // token -> row of vectors
    Tensor vectors;                              // n x e'

    int dim() const { return vectors.cols; }
    int count() const { return vectors.rows; }
    bool contains(const std::string& token) const { return index.count(token) != 0; }
    Tensor vector_of(const std::string& token) const;  // 1 x e'
};

PretrainedEmbeddings make_pretrained(std::vector<std::string> tokens, Tensor vectors);

// Text interchange format: one token per line followed by e' space-separated
// decimals; an optional "count dim" header line is auto-detected and skipped.
PretrainedEmbeddings load_pretrained(const std::string& path);

// V x e embedding matrix: rows copied from the pretrained map where the
// vocabulary token is found (requires e' = e), uniform(lo, hi) everywhere
// else, including the reserved tokens. Pass pretrained = nullptr for pure
// uniform initialization.
Tensor init_embeddings(const Vocabulary& vocab, const PretrainedEmbeddings* pretrained, int e, real lo,
                       real hi, std::uint64_t seed);

// Solves A X = B for symmetric positive definite A via Cholesky.
Tensor solve_spd(const Tensor& a, const Tensor& b);

// Least-squares map M (e' x e) from pretrained vectors to trained embedding
// rows over the shared vocabulary: min_M |X M - Y|_F^2 + ridge * |M|^2,
// solved by normal equations. ridge < 0 selects the default
// 1e-6 * trace(X^T X) / e'.
Tensor learn_expansion_projection(const PretrainedEmbeddings& pretrained, const Tensor& trained_embedding,
                                  const Vocabulary& vocab, real ridge = real(-1));

// pretrained(word) . M -- the model-space embedding for a word outside the
// training vocabulary.
Tensor expand_vocabulary(const Tensor& m, const PretrainedEmbeddings& pretrained, const std::string& word);

}  // namespace tskip
