#include "tskip/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tskip {

Tensor PretrainedEmbeddings::vector_of(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end())
        throw std::out_of_range("word '" + token + "' absent from pretrained embeddings");
    Tensor out(1, dim());
    for (int j = 0; j < dim(); ++j) out.at(0, j) = vectors.at(it->second, j);
    return out;
}

PretrainedEmbeddings make_pretrained(std::vector<std::string> tokens, Tensor vectors) {
    if (static_cast<int>(tokens.size()) != vectors.rows)
        throw std::invalid_argument("make_pretrained: " + std::to_string(tokens.size()) + " tokens vs " +
                                    shape_str(vectors) + " vectors");
    PretrainedEmbeddings p;
    p.tokens = std::move(tokens);
    p.vectors = std::move(vectors);
    for (int i = 0; i < static_cast<int>(p.tokens.size()); ++i) {
        auto [it, inserted] = p.index.emplace(p.tokens[i], i);
        if (!inserted) throw std::invalid_argument("make_pretrained: duplicate token '" + p.tokens[i] + "'");
    }
    return p;
}

namespace {

bool is_count_dim_header(const std::vector<std::string>& fields) {
    if (fields.size() != 2) return false;
    for (const auto& f : fields) {
        if (f.empty()) return false;
        for (char c : f)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

PretrainedEmbeddings load_pretrained(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");

    std::vector<std::string> tokens;
    std::vector<std::vector<real>> rows;
    int dim = -1;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = tokenize(line);
        if (fields.empty()) continue;
        if (first) {
            first = false;
            if (is_count_dim_header(fields)) continue;
        }
        if (fields.size() < 2)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected token and vector");
        int d = static_cast<int>(fields.size()) - 1;
        if (dim == -1)
            dim = d;
        else if (d != dim)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": vector has " + std::to_string(d) +
                                     " entries, expected " + std::to_string(dim));
        std::vector<real> v(dim);
        for (int j = 0; j < dim; ++j) {
            try {
                v[j] = static_cast<real>(std::stod(fields[j + 1]));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + fields[j + 1] +
                                         "'");
            }
        }
        tokens.push_back(fields[0]);
        rows.push_back(std::move(v));
    }
    if (tokens.empty()) throw std::runtime_error(path + ": no embedding rows");

    Tensor vecs(static_cast<int>(rows.size()), dim);
    for (int i = 0; i < vecs.rows; ++i)
        for (int j = 0; j < dim; ++j) vecs.at(i, j) = rows[i][j];
    return make_pretrained(std::move(tokens), std::move(vecs));
}

Tensor init_embeddings(const Vocabulary& vocab, const PretrainedEmbeddings* pretrained, int e, real lo,
                       real hi, std::uint64_t seed) {
    if (pretrained && pretrained->dim() != e)
        throw std::invalid_argument("init_embeddings: pretrained dimension " +
                                    std::to_string(pretrained->dim()) + " does not match embed_dim " +
                                    std::to_string(e));
    Rng rng(seed);
    Tensor out = Tensor::uniform(vocab.size(), e, lo, hi, rng);
    if (pretrained) {
        for (int id = kNumReserved; id < vocab.size(); ++id) {
            auto it = pretrained->index.find(vocab.id_to_token[id]);
            if (it == pretrained->index.end()) continue;
            for (int j = 0; j < e; ++j) out.at(id, j) = pretrained->vectors.at(it->second, j);
        }
    }
    return out;
}

Tensor solve_spd(const Tensor& a, const Tensor& b) {
    if (a.rows != a.cols || a.rows != b.rows)
        throw std::invalid_argument("solve_spd: incompatible shapes " + shape_str(a) + ", " + shape_str(b));
    int n = a.rows;
    Tensor l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            real s = a.at(i, j);
            for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (s <= real(0)) throw std::runtime_error("solve_spd: matrix is singular or indefinite");
                l.at(i, i) = std::sqrt(s);
            } else {
                l.at(i, j) = s / l.at(j, j);
            }
        }
    }
    // forward then backward substitution, one right-hand-side column at a time
    Tensor x(n, b.cols);
    std::vector<real> y(n);
    for (int c = 0; c < b.cols; ++c) {
        for (int i = 0; i < n; ++i) {
            real s = b.at(i, c);
            for (int k = 0; k < i; ++k) s -= l.at(i, k) * y[k];
            y[i] = s / l.at(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            real s = y[i];
            for (int k = i + 1; k < n; ++k) s -= l.at(k, i) * x.at(k, c);
            x.at(i, c) = s / l.at(i, i);
        }
    }
    return x;
}

Tensor learn_expansion_projection(const PretrainedEmbeddings& pretrained, const Tensor& trained_embedding,
                                  const Vocabulary& vocab, real ridge) {
    if (vocab.size() != trained_embedding.rows)
        throw std::invalid_argument("learn_expansion_projection: vocabulary size " +
                                    std::to_string(vocab.size()) + " vs embedding " +
                                    shape_str(trained_embedding));
    std::vector<int> shared_pre, shared_emb;
    for (int id = kNumReserved; id < vocab.size(); ++id) {
        auto it = pretrained.index.find(vocab.id_to_token[id]);
        if (it == pretrained.index.end()) continue;
        shared_pre.push_back(it->second);
        shared_emb.push_back(id);
    }
    int n = static_cast<int>(shared_pre.size());
    int ep = pretrained.dim();
    if (n < ep)
        throw std::runtime_error("learn_expansion_projection: shared vocabulary has " + std::to_string(n) +
                                 " tokens, need at least e' = " + std::to_string(ep));

    Tensor x(n, ep), y(n, trained_embedding.cols);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < ep; ++j) x.at(i, j) = pretrained.vectors.at(shared_pre[i], j);
        for (int j = 0; j < y.cols; ++j) y.at(i, j) = trained_embedding.at(shared_emb[i], j);
    }

    Tensor xtx = matmul(transpose(x), x);
    if (ridge < real(0)) {
        real trace = 0;
        for (int i = 0; i < ep; ++i) trace += xtx.at(i, i);
        ridge = real(1e-6) * trace / ep;
    }
    for (int i = 0; i < ep; ++i) xtx.at(i, i) += ridge;
    return solve_spd(xtx, matmul(transpose(x), y));
}

Tensor expand_vocabulary(const Tensor& m, const PretrainedEmbeddings& pretrained, const std::string& word) {
    Tensor v = pretrained.vector_of(word);  // throws for absent words
    return matmul(v, m);
}

}  // namespace tskip
