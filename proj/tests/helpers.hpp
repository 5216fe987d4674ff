#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tskip/tensor.hpp"

namespace testutil {

inline tskip::Tensor random_tensor(int rows, int cols, tskip::Rng& rng, double lo = -1.0, double hi = 1.0) {
    return tskip::Tensor::uniform(rows, cols, static_cast<tskip::real>(lo), static_cast<tskip::real>(hi), rng);
}

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("tskip_test_" + tag + "_" + std::to_string(counter()++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

// Deterministic toy corpus: n two-sentence documents with distinct sources,
// so each document contributes exactly one (source -> next) pair.
inline std::vector<std::string> fixture_corpus_lines(int n_pairs) {
    static const std::vector<std::string> subjects = {"the cat", "a dog",   "my friend", "the bird",
                                                      "his boat", "her kite", "one fox",  "that man"};
    static const std::vector<std::string> verbs = {"sees", "likes", "finds", "takes"};
    static const std::vector<std::string> objects = {"the river", "a stone", "the hill", "some food"};
    static const std::vector<std::string> replies = {"then it sleeps",     "so we smile now",
                                                     "and night comes soon", "but rain falls here"};
    std::vector<std::string> lines;
    for (int i = 0; i < n_pairs; ++i) {
        const std::string& s = subjects[i % subjects.size()];
        const std::string& v = verbs[(i / subjects.size()) % verbs.size()];
        const std::string& o = objects[(i / (subjects.size() * verbs.size())) % objects.size()];
        lines.push_back(s + " " + v + " " + o);
        lines.push_back(replies[i % replies.size()] + " near " + o);
        lines.push_back("");
    }
    return lines;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

}  // namespace testutil
