#include "tskip/vocab.hpp"

#include <algorithm>
#include <stdexcept>

namespace tskip {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

int Vocabulary::id_of(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
    if (id < 0 || id >= size())
        throw std::out_of_range("token id " + std::to_string(id) + " out of vocabulary of size " +
                                std::to_string(size()));
    return id_to_token[id];
}

std::vector<int> Vocabulary::encode_line(const std::string& line) const {
    std::vector<int> ids;
    for (const auto& tok : tokenize(line)) ids.push_back(id_of(tok));
    return ids;
}

std::string Vocabulary::decode(const std::vector<int>& ids) const {
    std::string out;
    for (int id : ids) {
        if (!out.empty()) out += ' ';
        out += token_of(id);
    }
    return out;
}

namespace {

std::vector<std::string> reserved_tokens() {
    return {kPadToken, kUnkToken, kBosToken, kEosToken};
}

}  // namespace

Vocabulary build_vocab(const std::vector<std::string>& lines, int max_size) {
    if (max_size <= kNumReserved)
        throw std::invalid_argument("build_vocab: max_size must exceed the " +
                                    std::to_string(kNumReserved) + " reserved tokens");

    struct Entry {
        std::uint64_t count = 0;
        std::size_t first_seen = 0;
    };
    std::unordered_map<std::string, Entry> counts;
    std::size_t position = 0;
    for (const auto& line : lines) {
        for (auto& tok : tokenize(line)) {
            auto [it, inserted] = counts.try_emplace(std::move(tok));
            if (inserted) it->second.first_seen = position;
            ++it->second.count;
            ++position;
        }
    }
    if (counts.empty()) throw std::runtime_error("build_vocab: empty corpus");

    std::vector<std::pair<std::string, Entry>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) return a.second.count > b.second.count;
        return a.second.first_seen < b.second.first_seen;
    });
    std::size_t keep = std::min(ranked.size(), static_cast<std::size_t>(max_size - kNumReserved));

    Vocabulary v;
    v.id_to_token = reserved_tokens();
    v.frequencies.assign(kNumReserved, 0);
    for (std::size_t i = 0; i < keep; ++i) {
        v.id_to_token.push_back(ranked[i].first);
        v.frequencies.push_back(ranked[i].second.count);
    }
    for (int id = 0; id < v.size(); ++id) v.token_to_id[v.id_to_token[id]] = id;
    return v;
}

Vocabulary vocab_from_tokens(std::vector<std::string> id_to_token, std::vector<std::uint64_t> frequencies) {
    if (id_to_token.size() < kNumReserved || id_to_token.size() != frequencies.size())
        throw std::invalid_argument("vocab_from_tokens: inconsistent token/frequency lists");
    Vocabulary v;
    v.id_to_token = std::move(id_to_token);
    v.frequencies = std::move(frequencies);
    for (int id = 0; id < v.size(); ++id) {
        auto [it, inserted] = v.token_to_id.emplace(v.id_to_token[id], id);
        if (!inserted) throw std::invalid_argument("vocab_from_tokens: duplicate token '" + v.id_to_token[id] + "'");
    }
    return v;
}

}  // namespace tskip
