#include "tskip/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "tskip/adam.hpp"
#include "tskip/autodiff.hpp"

namespace tskip {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

[[noreturn]] void tsv_error(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<PairExample> load_pair_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::vector<PairExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != 3)
            tsv_error(path, line_no, "expected sentence_a<TAB>sentence_b<TAB>label, got " +
                                         std::to_string(fields.size()) + " fields");
        PairExample ex;
        ex.sentence_a = fields[0];
        ex.sentence_b = fields[1];
        try {
            ex.label = std::stod(fields[2]);
        } catch (const std::exception&) {
            tsv_error(path, line_no, "bad label '" + fields[2] + "'");
        }
        if (ex.sentence_a.empty() || ex.sentence_b.empty()) tsv_error(path, line_no, "empty sentence");
        out.push_back(std::move(ex));
    }
    if (out.empty()) throw std::runtime_error(path + ": no examples");
    return out;
}

std::vector<ClassExample> load_class_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::vector<ClassExample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != 2)
            tsv_error(path, line_no, "expected label<TAB>sentence, got " + std::to_string(fields.size()) +
                                         " fields");
        ClassExample ex;
        try {
            ex.label = std::stoi(fields[0]);
        } catch (const std::exception&) {
            tsv_error(path, line_no, "bad label '" + fields[0] + "'");
        }
        if (ex.label < 0) tsv_error(path, line_no, "negative class label");
        ex.sentence = fields[1];
        if (ex.sentence.empty()) tsv_error(path, line_no, "empty sentence");
        out.push_back(std::move(ex));
    }
    if (out.empty()) throw std::runtime_error(path + ": no examples");
    return out;
}

Tensor pair_features(const Tensor& u, const Tensor& v) {
    if (!u.same_shape(v) || u.rows != 1)
        throw std::invalid_argument("pair_features: expected equal 1 x z rows, got " + shape_str(u) + " and " +
                                    shape_str(v));
    return concat_cols(hadamard(u, v), abs(sub(u, v)));
}

namespace {

Tensor augment_bias(const Tensor& features) {
    Tensor out(features.rows, features.cols + 1);
    for (int i = 0; i < features.rows; ++i) {
        for (int j = 0; j < features.cols; ++j) out.at(i, j) = features.at(i, j);
        out.at(i, features.cols) = real(1);
    }
    return out;
}

Tensor class_targets(const std::vector<double>& targets, int classes) {
    int n = static_cast<int>(targets.size());
    Tensor r(n, classes);
    for (int i = 0; i < n; ++i) {
        int label = static_cast<int>(std::lround(targets[i]));
        if (label < 0 || label >= classes)
            throw std::invalid_argument("fit_head: label " + std::to_string(label) + " outside [0, " +
                                        std::to_string(classes) + ")");
        r.at(i, label) = real(1);
    }
    return r;
}

}  // namespace

Tensor softmax_bin_targets(const std::vector<double>& scores, int bins) {
    int n = static_cast<int>(scores.size());
    Tensor r(n, bins);
    for (int i = 0; i < n; ++i) {
        double y = scores[i];
        if (y < 1.0 || y > bins)
            throw std::invalid_argument("softmax_bin_targets: score " + std::to_string(y) + " outside [1, " +
                                        std::to_string(bins) + "]");
        int lo = static_cast<int>(std::floor(y));
        int hi = static_cast<int>(std::ceil(y));
        if (lo == hi)
            r.at(i, lo - 1) = real(1);
        else {
            r.at(i, lo - 1) = static_cast<real>(hi - y);
            r.at(i, hi - 1) = static_cast<real>(y - lo);
        }
    }
    return r;
}

Head fit_head(const Tensor& features, const std::vector<double>& targets, const HeadConfig& cfg) {
    if (features.rows < 2) throw std::invalid_argument("fit_head: need at least 2 examples");
    if (static_cast<int>(targets.size()) != features.rows)
        throw std::invalid_argument("fit_head: " + std::to_string(targets.size()) + " targets for " +
                                    shape_str(features) + " features");
    int classes = cfg.kind == HeadKind::binary ? 2 : cfg.classes;
    if (std::set<double>(targets.begin(), targets.end()).size() == 1)
        std::cerr << "fit_head: warning: all targets identical, fitting a constant predictor\n";

    Tensor xa = augment_bias(features);
    Tensor r = cfg.kind == HeadKind::softmax_bins ? softmax_bin_targets(targets, classes)
                                                  : class_targets(targets, classes);

    ad::NodePtr w = ad::parameter(Tensor::zeros(xa.cols, classes));
    ad::NodePtr x = ad::constant(xa);
    Adam adam({w}, AdamConfig{cfg.lr, real(0.9), real(0.999), real(1e-8)});
    for (int step = 0; step < cfg.steps; ++step) {
        ad::zero_grad({w});
        ad::NodePtr loss = ad::softmax_xent_rows(ad::matmul(x, w), r);
        if (cfg.l2 > real(0))
            loss = ad::add(loss, ad::scale(ad::sum_all(ad::hadamard(w, w)), cfg.l2));
        ad::backward(loss);
        adam.step({w});
    }
    return Head{cfg.kind, classes, w->value};
}

Tensor head_probabilities(const Head& head, const Tensor& features) {
    if (features.cols + 1 != head.w.rows)
        throw std::invalid_argument("head_probabilities: features " + shape_str(features) +
                                    " do not match head " + shape_str(head.w));
    return softmax_rows(matmul(augment_bias(features), head.w));
}

std::vector<int> head_predict_class(const Head& head, const Tensor& features) {
    Tensor p = head_probabilities(head, features);
    std::vector<int> out(p.rows);
    for (int i = 0; i < p.rows; ++i) {
        int best = 0;
        for (int j = 1; j < p.cols; ++j)
            if (p.at(i, j) > p.at(i, best)) best = j;
        out[i] = best;
    }
    return out;
}

double predict_relatedness(const Head& head, const Tensor& feature_row) {
    if (head.kind != HeadKind::softmax_bins)
        throw std::invalid_argument("predict_relatedness: head was not trained with softmax bins");
    Tensor p = head_probabilities(head, feature_row);
    double score = 0;
    for (int k = 0; k < p.cols; ++k) score += (k + 1) * static_cast<double>(p.at(0, k));
    return score;
}

std::vector<double> predict_relatedness_all(const Head& head, const Tensor& features) {
    if (head.kind != HeadKind::softmax_bins)
        throw std::invalid_argument("predict_relatedness: head was not trained with softmax bins");
    Tensor p = head_probabilities(head, features);
    std::vector<double> out(p.rows, 0.0);
    for (int i = 0; i < p.rows; ++i)
        for (int k = 0; k < p.cols; ++k) out[i] += (k + 1) * static_cast<double>(p.at(i, k));
    return out;
}

namespace {

void require_correlatable(const std::vector<double>& v, const char* which) {
    if (v.size() < 2) throw std::invalid_argument("metrics: need at least 2 points");
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }))
        throw std::invalid_argument(std::string("metrics: ") + which +
                                    " input is constant, correlation undefined");
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
    require_correlatable(a, "first");
    require_correlatable(b, "second");
    double n = static_cast<double>(a.size());
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    return cov / std::sqrt(va * vb);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
    return pearson(average_ranks(a), average_ranks(b));
}

MetricsReport metrics(const std::vector<double>& pred, const std::vector<double>& gold, Task task) {
    if (pred.size() != gold.size() || pred.size() < 2)
        throw std::invalid_argument("metrics: need equal-length lists of at least 2 points");
    MetricsReport rep;
    switch (task) {
        case Task::relatedness: {
            rep.pearson_r = pearson(pred, gold);
            rep.spearman_rho = spearman(pred, gold);
            double mse = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) mse += (pred[i] - gold[i]) * (pred[i] - gold[i]);
            rep.mse = mse / static_cast<double>(pred.size());
            break;
        }
        case Task::binary: {
            double correct = 0;
            double tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                bool p = pred[i] >= 0.5, g = gold[i] >= 0.5;
                if (p == g) ++correct;
                if (p && g) ++tp;
                if (p && !g) ++fp;
                if (!p && g) ++fn;
            }
            rep.accuracy = correct / static_cast<double>(pred.size());
            double denom = 2 * tp + fp + fn;
            rep.f1 = denom > 0 ? 2 * tp / denom : 0.0;
            break;
        }
        case Task::multiclass: {
            double correct = 0;
            for (std::size_t i = 0; i < pred.size(); ++i)
                if (std::lround(pred[i]) == std::lround(gold[i])) ++correct;
            rep.accuracy = correct / static_cast<double>(pred.size());
            break;
        }
    }
    return rep;
}

double kfold_cv(const std::vector<ClassExample>& examples, const SentenceEncoder& encoder, int k,
                std::uint64_t seed, const HeadConfig& head_cfg) {
    int n = static_cast<int>(examples.size());
    if (k < 2) throw std::invalid_argument("kfold_cv: k must be >= 2");
    if (n < k)
        throw std::invalid_argument("kfold_cv: " + std::to_string(n) + " examples cannot fill " +
                                    std::to_string(k) + " folds");

    // frozen encoder: one vector per example, computed once
    std::vector<Tensor> vectors;
    vectors.reserve(examples.size());
    int dim = -1;
    for (const auto& ex : examples) {
        vectors.push_back(encoder(ex.sentence));
        if (dim == -1) dim = vectors.back().cols;
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    double accuracy_sum = 0;
    int base = n / k, extra = n % k;
    int cursor = 0;
    for (int fold = 0; fold < k; ++fold) {
        int fold_size = base + (fold < extra ? 1 : 0);
        int fold_begin = cursor, fold_end = cursor + fold_size;
        cursor = fold_end;

        Tensor train_x(n - fold_size, dim), test_x(fold_size, dim);
        std::vector<double> train_y, test_y;
        int ti = 0, si = 0;
        for (int i = 0; i < n; ++i) {
            const Tensor& v = vectors[order[i]];
            double y = examples[order[i]].label;
            if (i >= fold_begin && i < fold_end) {
                for (int j = 0; j < dim; ++j) test_x.at(si, j) = v.at(0, j);
                test_y.push_back(y);
                ++si;
            } else {
                for (int j = 0; j < dim; ++j) train_x.at(ti, j) = v.at(0, j);
                train_y.push_back(y);
                ++ti;
            }
        }

        Head head = fit_head(train_x, train_y, head_cfg);
        std::vector<int> predicted = head_predict_class(head, test_x);
        double correct = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i)
            if (predicted[i] == static_cast<int>(std::lround(test_y[i]))) ++correct;
        accuracy_sum += correct / static_cast<double>(fold_size);
    }
    return accuracy_sum / k;
}

}  // namespace tskip
