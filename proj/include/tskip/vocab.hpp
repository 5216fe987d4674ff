#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tskip/tokens.hpp"

namespace tskip {

std::vector<std::string> tokenize(const std::string& line);

// Token <-> id bijection with the four reserved ids up front. Non-reserved
// tokens are ordered by descending corpus frequency, ties by first
// occurrence in the corpus.
struct Vocabulary {
    std::vector<std::string> id_to_token;      // size V, reserved tokens included
    std::vector<std::uint64_t> frequencies;    // aligned; 0 for reserved ids
    std::unordered_map<std::string, int> token_to_id;

    int size() const { return static_cast<int>(id_to_token.size()); }
    bool contains(const std::string& token) const { return token_to_id.count(token) != 0; }
    // <unk> for tokens outside the vocabulary.
    int id_of(const std::string& token) const;
    const std::string& token_of(int id) const;

    std::vector<int> encode_line(const std::string& line) const;
    std::string decode(const std::vector<int>& ids) const;
};

// Whitespace-tokenized frequency count over the lines; keeps the
// max_size - 4 most frequent tokens.
Vocabulary build_vocab(const std::vector<std::string>& lines, int max_size);

// Rebuilds the derived map from id_to_token/frequencies (checkpoint load).
Vocabulary vocab_from_tokens(std::vector<std::string> id_to_token, std::vector<std::uint64_t> frequencies);

}  // namespace tskip
