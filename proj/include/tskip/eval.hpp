#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tskip/tensor.hpp"

namespace tskip {

struct PairExample {
    std::string sentence_a;
    std::string sentence_b;
    double label = 0;  // real relatedness score or 0/1 paraphrase flag
};

struct ClassExample {
    std::string sentence;
    int label = 0;
};

// `sentence_a<TAB>sentence_b<TAB>label` per line.
std::vector<PairExample> load_pair_tsv(const std::string& path);
// `label<TAB>sentence` per line.
std::vector<ClassExample> load_class_tsv(const std::string& path);

// concat(u (.) v, |u - v|): the pair feature vector over two sentence
// representations.
Tensor pair_features(const Tensor& u, const Tensor& v);

enum class HeadKind {
    softmax_bins,  // real score in [1, K] against interpolated bin targets
    binary,
    multiclass,
};

struct HeadConfig {
    HeadKind kind = HeadKind::softmax_bins;
    int classes = 5;  // K for softmax_bins, C otherwise
    real l2 = real(1e-4);
    int steps = 1000;
    real lr = real(0.01);
};

// Softmax regression weights over bias-augmented features.
struct Head {
    HeadKind kind = HeadKind::softmax_bins;
    int classes = 0;
    Tensor w;  // (f+1) x C, last row is the bias
};

// Sparse interpolation targets for real scores in [1, K]: mass ceil(y)-y at
// bin floor(y) and y-floor(y) at bin ceil(y); integer scores are one-hot.
Tensor softmax_bin_targets(const std::vector<double>& scores, int bins);

// Full-batch optimization of cross-entropy + l2*|W|^2; softmax_bins scores
// go through softmax_bin_targets. Degenerate single-class targets produce a
// warning on stderr and a constant predictor.
Head fit_head(const Tensor& features, const std::vector<double>& targets, const HeadConfig& cfg);

Tensor head_probabilities(const Head& head, const Tensor& features);  // n x C
std::vector<int> head_predict_class(const Head& head, const Tensor& features);
// Expected bin value sum_k k * p_k, a real score in [1, K].
double predict_relatedness(const Head& head, const Tensor& feature_row);
std::vector<double> predict_relatedness_all(const Head& head, const Tensor& features);

enum class Task { relatedness, binary, multiclass };

struct MetricsReport {
    std::optional<double> pearson_r;
    std::optional<double> spearman_rho;
    std::optional<double> mse;
    std::optional<double> accuracy;
    std::optional<double> f1;
};

// relatedness -> r, rho, MSE; binary -> accuracy and positive-class F1;
// multiclass -> accuracy. Spearman uses average ranks for ties. Constant
// input to a correlation raises an error.
MetricsReport metrics(const std::vector<double>& pred, const std::vector<double>& gold, Task task);

double pearson(const std::vector<double>& a, const std::vector<double>& b);
double spearman(const std::vector<double>& a, const std::vector<double>& b);

using SentenceEncoder = std::function<Tensor(const std::string&)>;

// Seeded shuffle into k folds of near-equal size; fits a head on k-1 folds
// of frozen sentence vectors and scores the held-out fold. Returns mean
// held-out accuracy.
double kfold_cv(const std::vector<ClassExample>& examples, const SentenceEncoder& encoder, int k,
                std::uint64_t seed, const HeadConfig& head_cfg);

}  // namespace tskip
