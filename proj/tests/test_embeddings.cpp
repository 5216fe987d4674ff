#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tskip/embeddings.hpp"
#include "tskip/vocab.hpp"

using namespace tskip;
using testutil::random_tensor;

namespace {

Vocabulary vocab_of(const std::vector<std::string>& tokens) {
    std::string line;
    for (const auto& t : tokens) line += t + " ";
    return build_vocab({line}, 4 + static_cast<int>(tokens.size()));
}

double frobenius_residual(const Tensor& x, const Tensor& m, const Tensor& y) {
    Tensor diff = sub(matmul(x, m), y);
    double s = 0;
    for (real v : diff.data) s += static_cast<double>(v) * v;
    return s;
}

}  // namespace

TEST_CASE("load_pretrained reads the text format, with or without a header") {
    testutil::TempDir dir("pre");
    std::string plain = dir.file("plain.vec");
    testutil::write_file(plain, "cat 0.5 -1.25 3\ndog 1 2 -0.5\n");
    PretrainedEmbeddings p = load_pretrained(plain);
    CHECK(p.count() == 2);
    CHECK(p.dim() == 3);
    CHECK(p.vector_of("cat").at(0, 1) == doctest::Approx(-1.25));

    std::string headed = dir.file("headed.vec");
    testutil::write_file(headed, "2 3\ncat 0.5 -1.25 3\ndog 1 2 -0.5\n");
    PretrainedEmbeddings h = load_pretrained(headed);
    CHECK(h.count() == 2);
    CHECK(h.dim() == 3);
    CHECK(h.vector_of("dog").at(0, 2) == doctest::Approx(-0.5));

    std::string ragged = dir.file("ragged.vec");
    testutil::write_file(ragged, "cat 0.5 1\ndog 1\n");
    CHECK_THROWS_AS(load_pretrained(ragged), std::runtime_error);

    CHECK_THROWS_AS(p.vector_of("bird"), std::out_of_range);
}

TEST_CASE("init_embeddings copies pretrained rows and fills the rest uniformly") {
    Vocabulary vocab = vocab_of({"cat", "dog", "bird"});
    Tensor vecs = Tensor::from({{0.9, -0.7}, {0.3, 0.4}});
    PretrainedEmbeddings pre = make_pretrained({"cat", "bird"}, vecs);

    Tensor e = init_embeddings(vocab, &pre, 2, real(-0.1), real(0.1), 11);
    CHECK(e.rows == vocab.size());
    int cat = vocab.id_of("cat"), bird = vocab.id_of("bird"), dog = vocab.id_of("dog");
    CHECK(e.at(cat, 0) == real(0.9));
    CHECK(e.at(cat, 1) == real(-0.7));
    CHECK(e.at(bird, 0) == real(0.3));
    for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(e.at(dog, j)) <= 0.1);  // uniform fallback
        for (int id = 0; id < kNumReserved; ++id) CHECK(std::abs(e.at(id, j)) <= 0.1);
    }

    // zero-coverage map degrades to pure uniform with the same seed
    PretrainedEmbeddings none = make_pretrained({"zebra"}, Tensor::from({{1.0, 1.0}}));
    Tensor covered = init_embeddings(vocab, &none, 2, real(-0.1), real(0.1), 11);
    Tensor uniform = init_embeddings(vocab, nullptr, 2, real(-0.1), real(0.1), 11);
    CHECK(covered.data == uniform.data);

    CHECK_THROWS_AS(init_embeddings(vocab, &pre, 5, real(-0.1), real(0.1), 11), std::invalid_argument);
}

TEST_CASE("expansion projection recovers the identity when spaces coincide") {
    Rng rng(101);
    std::vector<std::string> tokens;
    for (int i = 0; i < 40; ++i) tokens.push_back("w" + std::to_string(i));
    Vocabulary vocab = vocab_of(tokens);
    Tensor trained = random_tensor(vocab.size(), 5, rng);

    Tensor shared(40, 5);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 5; ++j) shared.at(i, j) = trained.at(vocab.id_of(tokens[i]), j);
    PretrainedEmbeddings pre = make_pretrained(tokens, shared);

    Tensor m = learn_expansion_projection(pre, trained, vocab, real(0));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(std::abs(m.at(i, j) - (i == j ? 1.0 : 0.0)) < 1e-6);
}

TEST_CASE("expansion projection recovers a planted linear map") {
    Rng rng(103);
    std::vector<std::string> tokens;
    for (int i = 0; i < 60; ++i) tokens.push_back("w" + std::to_string(i));
    Vocabulary vocab = vocab_of(tokens);

    Tensor x(60, 6);
    for (int i = 0; i < 60; ++i) {
        Tensor row = random_tensor(1, 6, rng);
        for (int j = 0; j < 6; ++j) x.at(i, j) = row.at(0, j);
    }
    Tensor m0 = random_tensor(6, 4, rng);
    PretrainedEmbeddings pre = make_pretrained(tokens, x);

    Tensor trained(vocab.size(), 4);
    Tensor planted = matmul(x, m0);
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 4; ++j) trained.at(vocab.id_of(tokens[i]), j) = planted.at(i, j);

    Tensor m = learn_expansion_projection(pre, trained, vocab, real(0));
    double max_abs = 0;
    for (int i = 0; i < m.size(); ++i) max_abs = std::max(max_abs, std::abs(double(m.data[i] - m0.data[i])));
    CHECK(max_abs < 1e-6);

    // expanded embeddings agree with the planted trained rows
    for (const std::string& w : {tokens[0], tokens[17], tokens[59]}) {
        Tensor row = expand_vocabulary(m, pre, w);
        int id = vocab.id_of(w);
        for (int j = 0; j < 4; ++j) CHECK(std::abs(row.at(0, j) - trained.at(id, j)) < 1e-5);
    }
}

TEST_CASE("returned projection is a least-squares optimum") {
    Rng rng(107);
    std::vector<std::string> tokens;
    for (int i = 0; i < 50; ++i) tokens.push_back("w" + std::to_string(i));
    Vocabulary vocab = vocab_of(tokens);
    Tensor x = random_tensor(50, 5, rng);
    PretrainedEmbeddings pre = make_pretrained(tokens, x);
    Tensor trained = random_tensor(vocab.size(), 3, rng);  // generic targets, no planted map

    Tensor y(50, 3);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 3; ++j) y.at(i, j) = trained.at(vocab.id_of(tokens[i]), j);

    Tensor m = learn_expansion_projection(pre, trained, vocab);  // default ridge
    double residual = frobenius_residual(x, m, y);
    CHECK(residual <= frobenius_residual(x, Tensor(5, 3), y));  // beats the zero map

    for (int trial = 0; trial < 10; ++trial) {
        Tensor delta = random_tensor(5, 3, rng);
        double norm = 0;
        for (real v : delta.data) norm += static_cast<double>(v) * v;
        delta.scale_inplace(real(1e-3 / std::sqrt(norm)));
        CHECK(frobenius_residual(x, add(m, delta), y) >= residual);
    }
}

TEST_CASE("expansion requires enough shared vocabulary") {
    Rng rng(109);
    Vocabulary vocab = vocab_of({"one", "two", "three"});
    PretrainedEmbeddings pre = make_pretrained({"one", "two"}, random_tensor(2, 4, rng));
    Tensor trained = random_tensor(vocab.size(), 3, rng);
    CHECK_THROWS_AS(learn_expansion_projection(pre, trained, vocab), std::runtime_error);
}

TEST_CASE("expand_vocabulary is linear and zero for the zero map") {
    Rng rng(113);
    Tensor u = random_tensor(1, 4, rng), v = random_tensor(1, 4, rng);
    Tensor sum = add(u, v);
    Tensor table(3, 4);
    for (int j = 0; j < 4; ++j) {
        table.at(0, j) = u.at(0, j);
        table.at(1, j) = v.at(0, j);
        table.at(2, j) = sum.at(0, j);
    }
    PretrainedEmbeddings pre = make_pretrained({"u", "v", "uv"}, table);
    Tensor m = random_tensor(4, 3, rng);

    Tensor eu = expand_vocabulary(m, pre, "u");
    Tensor ev = expand_vocabulary(m, pre, "v");
    Tensor euv = expand_vocabulary(m, pre, "uv");
    for (int j = 0; j < 3; ++j) CHECK(euv.at(0, j) == doctest::Approx(eu.at(0, j) + ev.at(0, j)).epsilon(1e-12));

    Tensor zero = expand_vocabulary(Tensor(4, 3), pre, "u");
    for (real x : zero.data) CHECK(x == real(0));

    CHECK_THROWS_AS(expand_vocabulary(m, pre, "absent"), std::out_of_range);
}
