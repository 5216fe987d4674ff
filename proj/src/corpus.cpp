#include "tskip/corpus.hpp"

#include <fstream>
#include <stdexcept>

namespace tskip {

std::vector<std::vector<std::string>> split_documents(const std::vector<std::string>& lines) {
    std::vector<std::vector<std::string>> docs;
    std::vector<std::string> current;
    auto flush = [&] {
        if (!current.empty()) docs.push_back(std::move(current));
        current.clear();
    };
    for (const auto& line : lines) {
        if (tokenize(line).empty())
            flush();
        else
            current.push_back(line);
    }
    flush();
    return docs;
}

std::vector<SentencePair> make_pairs(const std::vector<std::string>& lines, const Vocabulary& vocab) {
    std::vector<SentencePair> pairs;
    for (const auto& doc : split_documents(lines)) {
        for (std::size_t i = 0; i + 1 < doc.size(); ++i) {
            SentencePair p{vocab.encode_line(doc[i]), vocab.encode_line(doc[i + 1])};
            if (p.source_ids.empty() || p.target_ids.empty()) continue;
            pairs.push_back(std::move(p));
        }
    }
    if (pairs.empty())
        throw std::runtime_error("make_pairs: corpus contains no adjacent sentence pairs");
    return pairs;
}

PaddedSequence pad_clip(const std::vector<int>& ids, int max_len) {
    if (max_len < 1) throw std::invalid_argument("pad_clip: max_len must be >= 1");
    PaddedSequence out;
    out.valid = static_cast<int>(std::min<std::size_t>(ids.size(), max_len));
    out.ids.assign(ids.begin(), ids.begin() + out.valid);
    out.ids.resize(max_len, kPadId);
    return out;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace tskip
