#pragma once

#include <string>
#include <vector>

#include "tskip/vocab.hpp"

namespace tskip {

// A source sentence and its successor within the same document.
struct SentencePair {
    std::vector<int> source_ids;
    std::vector<int> target_ids;
};

// Splits lines into documents at blank (or whitespace-only) lines.
std::vector<std::vector<std::string>> split_documents(const std::vector<std::string>& lines);

// One pair per adjacent sentence pair within a document; pairs never cross
// a document boundary.
std::vector<SentencePair> make_pairs(const std::vector<std::string>& lines, const Vocabulary& vocab);

struct PaddedSequence {
    std::vector<int> ids;  // length exactly max_len
    int valid = 0;         // tokens before padding
};

// Keeps the first max_len tokens of longer sequences, right-pads shorter
// ones with <pad>.
PaddedSequence pad_clip(const std::vector<int>& ids, int max_len);

std::vector<std::string> read_lines(const std::string& path);

}  // namespace tskip
