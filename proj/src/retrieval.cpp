#include "tskip/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include "tskip/vocab.hpp"

namespace tskip {

double cosine_similarity(const Tensor& a, const Tensor& b, int row_a, int row_b) {
    if (a.cols != b.cols)
        throw std::invalid_argument("cosine_similarity: dims differ: " + shape_str(a) + " vs " + shape_str(b));
    double dot = 0, na = 0, nb = 0;
    for (int j = 0; j < a.cols; ++j) {
        double x = a.at(row_a, j), y = b.at(row_b, j);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0 || nb == 0) return 0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::vector<Neighbor>> retrieve(const Tensor& queries, const Tensor& database, int top_k) {
    if (database.rows < 1) throw std::invalid_argument("retrieve: empty database");
    if (queries.rows < 1) throw std::invalid_argument("retrieve: empty query set");
    if (queries.cols != database.cols)
        throw std::invalid_argument("retrieve: dims differ: " + shape_str(queries) + " vs " +
                                    shape_str(database));
    int k = std::min(top_k, database.rows);
    if (k < 1) throw std::invalid_argument("retrieve: top_k must be >= 1");

    std::vector<std::vector<Neighbor>> out(queries.rows);
    std::vector<Neighbor> all(database.rows);
    for (int q = 0; q < queries.rows; ++q) {
        for (int d = 0; d < database.rows; ++d)
            all[d] = Neighbor{d, cosine_similarity(queries, database, q, d)};
        std::stable_sort(all.begin(), all.end(),
                         [](const Neighbor& a, const Neighbor& b) { return a.score > b.score; });
        out[q].assign(all.begin(), all.begin() + k);
    }
    return out;
}

Tensor read_vectors_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::vector<std::vector<real>> rows;
    std::string line;
    std::size_t line_no = 0;
    int dim = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = tokenize(line);
        if (fields.empty()) continue;
        if (dim == -1)
            dim = static_cast<int>(fields.size());
        else if (static_cast<int>(fields.size()) != dim)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                                     " values, got " + std::to_string(fields.size()));
        std::vector<real> row(dim);
        for (int j = 0; j < dim; ++j) {
            try {
                row[j] = static_cast<real>(std::stod(fields[j]));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + fields[j] + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": no vectors");
    Tensor out(static_cast<int>(rows.size()), dim);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < dim; ++j) out.at(i, j) = rows[i][j];
    return out;
}

void write_vectors_file(const std::string& path, const Tensor& vectors) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << std::setprecision(std::numeric_limits<real>::max_digits10);
    for (int i = 0; i < vectors.rows; ++i) {
        for (int j = 0; j < vectors.cols; ++j) {
            if (j) out << ' ';
            out << vectors.at(i, j);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace tskip
