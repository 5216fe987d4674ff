#pragma once

#include <string>
#include <vector>

#include "tskip/tensor.hpp"

namespace tskip {

// Cosine similarity between two row vectors; 0 when either norm is 0.
double cosine_similarity(const Tensor& a, const Tensor& b, int row_a = 0, int row_b = 0);

struct Neighbor {
    int index;     // row in the database
    double score;  // cosine similarity
};

// Brute-force top-k by cosine similarity, descending, ties by database
// order. top_k beyond the database size returns the full ranking.
std::vector<std::vector<Neighbor>> retrieve(const Tensor& queries, const Tensor& database, int top_k);

// One space-separated decimal vector per line.
Tensor read_vectors_file(const std::string& path);
void write_vectors_file(const std::string& path, const Tensor& vectors);

}  // namespace tskip
