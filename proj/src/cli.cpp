#include "tskip/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "tskip/checkpoint.hpp"
#include "tskip/corpus.hpp"
#include "tskip/embeddings.hpp"
#include "tskip/eval.hpp"
#include "tskip/model.hpp"
#include "tskip/retrieval.hpp"
#include "tskip/trainer.hpp"

namespace tskip {
namespace cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rethrows input-loading failures (missing files, malformed content) as
// usage errors so they exit with code 2 instead of 1.
template <typename F>
auto load_input(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

struct KeySpec {
    std::string name;
    std::string fallback;  // default value; empty + required=false means optional
    bool required = false;
    std::string help;
};

class RunConfig {
public:
    RunConfig(std::string command, std::vector<KeySpec> keys) : command_(std::move(command)), keys_(std::move(keys)) {}

    void parse(const std::vector<std::string>& args) {
        // first pass: pull out --config and read the file, flags then override
        std::map<std::string, std::string> file_values, flag_values;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a.rfind("--", 0) != 0) throw UsageError(command_ + ": expected --key value, got '" + a + "'");
            std::string key = a.substr(2);
            if (i + 1 >= args.size()) throw UsageError(command_ + ": flag --" + key + " is missing a value");
            const std::string& value = args[++i];
            if (key == "config") {
                for (auto& [k, v] : parse_config_file(value)) {
                    require_known(k, "config file");
                    file_values[k] = v;
                }
            } else {
                require_known(key, "flag");
                flag_values[key] = value;
            }
        }
        for (const auto& spec : keys_) {
            auto fl = flag_values.find(spec.name);
            auto fi = file_values.find(spec.name);
            if (fl != flag_values.end())
                values_[spec.name] = fl->second;
            else if (fi != file_values.end())
                values_[spec.name] = fi->second;
            else if (!spec.fallback.empty() || !spec.required)
                values_[spec.name] = spec.fallback;
            if (spec.required && values_[spec.name].empty())
                throw UsageError(command_ + ": missing required --" + spec.name);
        }
    }

    void echo() const {
        for (const auto& [k, v] : values_)
            if (!v.empty()) std::cerr << "config: " << k << "=" << v << "\n";
    }

    bool has(const std::string& key) const {
        auto it = values_.find(key);
        return it != values_.end() && !it->second.empty();
    }

    std::string str(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::logic_error("unregistered key '" + key + "'");
        return it->second;
    }

    long long integer(const std::string& key) const {
        try {
            std::size_t pos = 0;
            long long v = std::stoll(str(key), &pos);
            if (pos != str(key).size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw UsageError(command_ + ": --" + key + " expects an integer, got '" + str(key) + "'");
        }
    }

    double number(const std::string& key) const {
        try {
            std::size_t pos = 0;
            double v = std::stod(str(key), &pos);
            if (pos != str(key).size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            throw UsageError(command_ + ": --" + key + " expects a number, got '" + str(key) + "'");
        }
    }

    bool flag(const std::string& key) const {
        std::string v = str(key);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw UsageError(command_ + ": --" + key + " expects true|false, got '" + v + "'");
    }

private:
    void require_known(const std::string& key, const char* where) const {
        for (const auto& spec : keys_)
            if (spec.name == key) return;
        throw UsageError(command_ + ": unknown key '" + key + "' in " + where);
    }

    std::map<std::string, std::string> parse_config_file(const std::string& path) const {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file '" + path + "'");
        std::map<std::string, std::string> out;
        std::string line;
        std::size_t line_no = 0;
        auto trim = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t");
            std::size_t e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos || eq == 0)
                throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
            out[key] = value;
        }
        return out;
    }

    std::string command_;
    std::vector<KeySpec> keys_;
    std::map<std::string, std::string> values_;
};

const std::vector<KeySpec> kModelKeys = {
    {"vocab_size", "20000", false, "vocabulary cap including reserved tokens"},
    {"embed_dim", "300", false, "word embedding width"},
    {"encoder_kind", "uni", false, "uni|bi"},
    {"encoder_dim", "600", false, "encoder width (per direction for bi)"},
    {"connection", "plain", false, "plain|avg_max"},
    {"decoder_dim", "600", false, "decoder width"},
    {"targets", "next", false, "next|both"},
};

std::vector<KeySpec> with_model_keys(std::vector<KeySpec> extra) {
    std::vector<KeySpec> keys = kModelKeys;
    keys.insert(keys.end(), extra.begin(), extra.end());
    return keys;
}

ModelConfig model_config_from(const RunConfig& rc) {
    ModelConfig cfg;
    cfg.vocab_size = static_cast<int>(rc.integer("vocab_size"));
    cfg.embed_dim = static_cast<int>(rc.integer("embed_dim"));
    cfg.encoder_kind = encoder_kind_from(rc.str("encoder_kind"));
    cfg.encoder_dim = static_cast<int>(rc.integer("encoder_dim"));
    cfg.connection = connection_from(rc.str("connection"));
    cfg.decoder_dim = static_cast<int>(rc.integer("decoder_dim"));
    cfg.targets = targets_from(rc.str("targets"));
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::trunc);
    if (!file) throw UsageError("cannot open '" + path + "' for writing");
    return file;
}

// ----------------------------------------------------------------------
// sentence -> embedded rows, consulting the expansion table for words
// outside the training vocabulary
// ----------------------------------------------------------------------

struct EncodeContext {
    ModelConfig cfg;
    Vocabulary vocab;
    ModelParams params;
    std::optional<PretrainedEmbeddings> expansion_pretrained;
    Tensor expansion_projection;

    static EncodeContext from(const Checkpoint& ckpt) {
        EncodeContext ctx{ckpt.config, ckpt.vocab, params_from_checkpoint(ckpt), {}, {}};
        if (ckpt.expansion) {
            ctx.expansion_pretrained = ckpt.expansion->pretrained();
            ctx.expansion_projection = ckpt.expansion->projection;
        }
        return ctx;
    }

    Tensor embed_tokens(const std::vector<std::string>& tokens) const {
        Tensor rows(static_cast<int>(tokens.size()), cfg.embed_dim);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            Tensor row;
            if (vocab.contains(tokens[i])) {
                int id = vocab.id_of(tokens[i]);
                row = Tensor(1, cfg.embed_dim);
                for (int j = 0; j < cfg.embed_dim; ++j) row.at(0, j) = params.embedding->value.at(id, j);
            } else if (expansion_pretrained && expansion_pretrained->contains(tokens[i])) {
                row = expand_vocabulary(expansion_projection, *expansion_pretrained, tokens[i]);
            } else {
                row = Tensor(1, cfg.embed_dim);
                for (int j = 0; j < cfg.embed_dim; ++j) row.at(0, j) = params.embedding->value.at(kUnkId, j);
            }
            for (int j = 0; j < cfg.embed_dim; ++j) rows.at(static_cast<int>(i), j) = row.at(0, j);
        }
        return rows;
    }

    Tensor encode_sentence(const std::string& sentence) const {
        auto tokens = tokenize(sentence);
        if (tokens.empty()) throw std::invalid_argument("cannot encode an empty sentence");
        return encode_embedded_node(params, cfg, embed_tokens(tokens))->value;
    }

    Tensor encode_lines(const std::vector<std::string>& lines) const {
        if (lines.empty()) throw UsageError("no input sentences");
        Tensor out(static_cast<int>(lines.size()), cfg.z_dim());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            Tensor z = encode_sentence(lines[i]);
            for (int j = 0; j < z.cols; ++j) out.at(static_cast<int>(i), j) = z.at(0, j);
        }
        return out;
    }
};

EncodeContext load_context(const std::string& checkpoint_path) {
    return load_input([&] { return EncodeContext::from(load_checkpoint(checkpoint_path)); });
}

// ----------------------------------------------------------------------
// commands
// ----------------------------------------------------------------------

int cmd_train(const std::vector<std::string>& args) {
    RunConfig rc("train", with_model_keys({
        {"corpus", "", true, "training corpus, one sentence per line, blank line between documents"},
        {"out", "", true, "checkpoint to write"},
        {"batch_size", "64", false, ""},
        {"max_len", "30", false, "pad/clip length"},
        {"epochs", "10", false, ""},
        {"seed", "1", false, ""},
        {"lr", "0.001", false, "Adam step size"},
        {"beta1", "0.9", false, ""},
        {"beta2", "0.999", false, ""},
        {"adam_eps", "1e-8", false, ""},
        {"clip", "1", false, "gradient value clip bound"},
        {"shards", "1", false, "concurrent batch shards"},
        {"init_range", "0.1", false, "uniform init half-width"},
        {"embed_init", "uniform", false, "uniform|pretrained"},
        {"pretrained", "", false, "pretrained vectors (embed_init=pretrained)"},
        {"loss_csv", "", false, "per-epoch loss CSV to write"},
        {"save_optimizer", "false", false, "persist Adam state in the checkpoint"},
    }));
    rc.parse(args);
    rc.echo();

    auto lines = load_input([&] { return read_lines(rc.str("corpus")); });
    Vocabulary vocab = load_input([&] { return build_vocab(lines, static_cast<int>(rc.integer("vocab_size"))); });
    auto pairs = load_input([&] { return make_pairs(lines, vocab); });
    std::cerr << "corpus: " << pairs.size() << " pairs, vocabulary " << vocab.size() << "\n";

    ModelConfig cfg = model_config_from(rc);
    cfg.vocab_size = vocab.size();
    real init_range = static_cast<real>(rc.number("init_range"));
    ModelParams params = init_params(cfg, rc.integer("seed"), init_range);

    std::string embed_init = rc.str("embed_init");
    if (embed_init == "pretrained") {
        if (!rc.has("pretrained")) throw UsageError("train: embed_init=pretrained needs --pretrained");
        auto pre = load_input([&] { return load_pretrained(rc.str("pretrained")); });
        params.embedding->value =
            init_embeddings(vocab, &pre, cfg.embed_dim, -init_range, init_range, rc.integer("seed"));
    } else if (embed_init != "uniform") {
        throw UsageError("train: --embed_init expects uniform|pretrained");
    }

    TrainOptions opts;
    opts.batch_size = static_cast<int>(rc.integer("batch_size"));
    opts.max_len = static_cast<int>(rc.integer("max_len"));
    opts.epochs = static_cast<int>(rc.integer("epochs"));
    opts.seed = static_cast<std::uint64_t>(rc.integer("seed"));
    opts.adam = AdamConfig{static_cast<real>(rc.number("lr")), static_cast<real>(rc.number("beta1")),
                           static_cast<real>(rc.number("beta2")), static_cast<real>(rc.number("adam_eps"))};
    opts.clip = static_cast<real>(rc.number("clip"));
    opts.shards = static_cast<int>(rc.integer("shards"));
    opts.on_epoch = [&](int epoch, double nats) {
        std::cerr << "epoch " << epoch << ": " << nats << " nats/token\n";
    };

    std::vector<ad::NodePtr> leaves = params.all();
    Adam adam(leaves, opts.adam);
    TrainResult result = train(params, cfg, pairs, opts, &adam);

    if (rc.has("loss_csv")) {
        std::ofstream csv(rc.str("loss_csv"), std::ios::trunc);
        if (!csv) throw UsageError("cannot open '" + rc.str("loss_csv") + "' for writing");
        csv << std::setprecision(std::numeric_limits<double>::max_digits10);
        csv << "epoch,nats_per_token\n";
        for (std::size_t i = 0; i < result.epoch_nats.size(); ++i) csv << i << "," << result.epoch_nats[i] << "\n";
    }

    Checkpoint ckpt = make_checkpoint(cfg, vocab, params);
    if (rc.flag("save_optimizer")) {
        AdamStateBlob blob;
        blob.t = adam.steps_taken();
        blob.config = adam.config();
        blob.m = adam.first_moments();
        blob.v = adam.second_moments();
        ckpt.adam = std::move(blob);
    }
    save_checkpoint(rc.str("out"), ckpt);
    std::cerr << "wrote checkpoint '" << rc.str("out") << "'\n";
    return 0;
}

int cmd_encode(const std::vector<std::string>& args) {
    RunConfig rc("encode", {
        {"checkpoint", "", true, "trained model"},
        {"input", "", true, "sentences, one per line"},
        {"out", "", true, "vectors file to write"},
    });
    rc.parse(args);
    rc.echo();

    EncodeContext ctx = load_context(rc.str("checkpoint"));
    auto lines = load_input([&] { return read_lines(rc.str("input")); });
    lines.erase(std::remove_if(lines.begin(), lines.end(),
                               [](const std::string& l) { return tokenize(l).empty(); }),
                lines.end());
    if (lines.empty()) throw UsageError("encode: input has no sentences");
    write_vectors_file(rc.str("out"), ctx.encode_lines(lines));
    std::cerr << "encoded " << lines.size() << " sentences\n";
    return 0;
}

int cmd_retrieve(const std::vector<std::string>& args) {
    RunConfig rc("retrieve", {
        {"checkpoint", "", false, "trained model (not needed with --vectors true)"},
        {"query", "", true, "query sentences, or vectors with --vectors true"},
        {"database", "", true, "database sentences, or vectors with --vectors true"},
        {"top_k", "5", false, ""},
        {"vectors", "false", false, "inputs are precomputed vector files"},
        {"out", "", false, "report path (default stdout)"},
    });
    rc.parse(args);
    rc.echo();

    Tensor queries, database;
    std::vector<std::string> query_lines, database_lines;
    if (rc.flag("vectors")) {
        queries = load_input([&] { return read_vectors_file(rc.str("query")); });
        database = load_input([&] { return read_vectors_file(rc.str("database")); });
    } else {
        if (!rc.has("checkpoint")) throw UsageError("retrieve: --checkpoint is required unless --vectors true");
        EncodeContext ctx = load_context(rc.str("checkpoint"));
        query_lines = load_input([&] { return read_lines(rc.str("query")); });
        database_lines = load_input([&] { return read_lines(rc.str("database")); });
        queries = ctx.encode_lines(query_lines);
        database = ctx.encode_lines(database_lines);
    }

    auto ranking = retrieve(queries, database, static_cast<int>(rc.integer("top_k")));

    std::ofstream file;
    std::ostream& out = open_output(file, rc.str("out"));
    out << std::setprecision(9);
    for (std::size_t q = 0; q < ranking.size(); ++q) {
        for (std::size_t r = 0; r < ranking[q].size(); ++r) {
            const Neighbor& n = ranking[q][r];
            out << q << '\t' << (r + 1) << '\t' << n.index << '\t' << n.score;
            if (!database_lines.empty()) out << '\t' << database_lines[n.index];
            out << '\n';
        }
    }
    return 0;
}

int cmd_generate(const std::vector<std::string>& args) {
    RunConfig rc("generate", {
        {"checkpoint", "", true, "trained model"},
        {"input", "", true, "sentences to condition on"},
        {"max_len", "30", false, "generation cap in tokens"},
        {"out", "", false, "output path (default stdout)"},
    });
    rc.parse(args);
    rc.echo();

    EncodeContext ctx = load_context(rc.str("checkpoint"));
    auto lines = load_input([&] { return read_lines(rc.str("input")); });
    lines.erase(std::remove_if(lines.begin(), lines.end(),
                               [](const std::string& l) { return tokenize(l).empty(); }),
                lines.end());
    if (lines.empty()) throw UsageError("generate: input has no sentences");

    std::ofstream file;
    std::ostream& out = open_output(file, rc.str("out"));
    int max_len = static_cast<int>(rc.integer("max_len"));
    for (const auto& line : lines) {
        SentenceVector z{ctx.encode_sentence(line)};
        std::vector<int> ids = greedy_decode(ctx.params, ctx.cfg, z, max_len);
        out << ctx.vocab.decode(ids) << '\n';
    }
    return 0;
}

void print_metrics(std::ostream& out, const MetricsReport& rep) {
    out << std::setprecision(6);
    if (rep.pearson_r) out << "pearson_r=" << *rep.pearson_r << "\n";
    if (rep.spearman_rho) out << "spearman_rho=" << *rep.spearman_rho << "\n";
    if (rep.mse) out << "mse=" << *rep.mse << "\n";
    if (rep.accuracy) out << "accuracy=" << *rep.accuracy << "\n";
    if (rep.f1) out << "f1=" << *rep.f1 << "\n";
}

int cmd_eval(const std::vector<std::string>& args) {
    RunConfig rc("eval", {
        {"checkpoint", "", true, "trained model (encoder stays frozen)"},
        {"task", "", true, "pair|class"},
        {"data", "", true, "task TSV"},
        {"test_data", "", false, "optional held-out TSV (pair task: fit on --data, report here)"},
        {"pair_task", "relatedness", false, "relatedness|paraphrase"},
        {"bins", "5", false, "score bins K for relatedness"},
        {"folds", "10", false, "cross-validation folds for class task"},
        {"head_steps", "1000", false, ""},
        {"head_lr", "0.01", false, ""},
        {"head_l2", "1e-4", false, ""},
        {"threshold", "0.5", false, "positive-probability cutoff for paraphrase"},
        {"seed", "1", false, ""},
    });
    rc.parse(args);
    rc.echo();

    EncodeContext ctx = load_context(rc.str("checkpoint"));
    std::string task = rc.str("task");

    HeadConfig head_cfg;
    head_cfg.steps = static_cast<int>(rc.integer("head_steps"));
    head_cfg.lr = static_cast<real>(rc.number("head_lr"));
    head_cfg.l2 = static_cast<real>(rc.number("head_l2"));

    if (task == "pair") {
        auto fit_examples = load_input([&] { return load_pair_tsv(rc.str("data")); });
        auto eval_examples = rc.has("test_data")
                                 ? load_input([&] { return load_pair_tsv(rc.str("test_data")); })
                                 : fit_examples;

        auto featurize = [&](const std::vector<PairExample>& examples, std::vector<double>& labels) {
            Tensor features(static_cast<int>(examples.size()), 2 * ctx.cfg.z_dim());
            labels.clear();
            for (std::size_t i = 0; i < examples.size(); ++i) {
                Tensor f = pair_features(ctx.encode_sentence(examples[i].sentence_a),
                                         ctx.encode_sentence(examples[i].sentence_b));
                for (int j = 0; j < f.cols; ++j) features.at(static_cast<int>(i), j) = f.at(0, j);
                labels.push_back(examples[i].label);
            }
            return features;
        };

        std::vector<double> fit_labels, eval_labels;
        Tensor fit_features = featurize(fit_examples, fit_labels);
        Tensor eval_features;
        if (rc.has("test_data")) {
            eval_features = featurize(eval_examples, eval_labels);
        } else {
            eval_features = fit_features;
            eval_labels = fit_labels;
        }

        std::string pair_task = rc.str("pair_task");
        if (pair_task == "relatedness") {
            head_cfg.kind = HeadKind::softmax_bins;
            head_cfg.classes = static_cast<int>(rc.integer("bins"));
            Head head = fit_head(fit_features, fit_labels, head_cfg);
            std::vector<double> predicted = predict_relatedness_all(head, eval_features);
            print_metrics(std::cout, metrics(predicted, eval_labels, Task::relatedness));
        } else if (pair_task == "paraphrase") {
            head_cfg.kind = HeadKind::binary;
            Head head = fit_head(fit_features, fit_labels, head_cfg);
            Tensor probs = head_probabilities(head, eval_features);
            double threshold = rc.number("threshold");
            std::vector<double> predicted(probs.rows);
            for (int i = 0; i < probs.rows; ++i)
                predicted[i] = probs.at(i, 1) >= threshold ? 1.0 : 0.0;
            print_metrics(std::cout, metrics(predicted, eval_labels, Task::binary));
        } else {
            throw UsageError("eval: --pair_task expects relatedness|paraphrase");
        }
        return 0;
    }

    if (task == "class") {
        auto examples = load_input([&] { return load_class_tsv(rc.str("data")); });
        int classes = 0;
        for (const auto& ex : examples) classes = std::max(classes, ex.label + 1);
        head_cfg.kind = HeadKind::multiclass;
        head_cfg.classes = std::max(classes, 2);
        double accuracy = kfold_cv(
            examples, [&](const std::string& s) { return ctx.encode_sentence(s); },
            static_cast<int>(rc.integer("folds")), static_cast<std::uint64_t>(rc.integer("seed")), head_cfg);
        std::cout << std::setprecision(6) << "accuracy=" << accuracy << "\n";
        return 0;
    }

    throw UsageError("eval: --task expects pair|class");
}

int cmd_param_count(const std::vector<std::string>& args) {
    RunConfig rc("param-count", with_model_keys({}));
    rc.parse(args);
    rc.echo();
    ParamCounts counts = count_params(model_config_from(rc));
    std::cout << "rnns=" << counts.rnns << " embedding=" << counts.embedding
              << " prediction=" << counts.prediction << "\n";
    return 0;
}

int cmd_expand_vocab(const std::vector<std::string>& args) {
    RunConfig rc("expand-vocab", {
        {"checkpoint", "", true, "trained model"},
        {"pretrained", "", true, "pretrained vectors file"},
        {"out", "", true, "checkpoint to write with the expansion attached"},
        {"ridge", "-1", false, "ridge damping (negative = trace-scaled default)"},
    });
    rc.parse(args);
    rc.echo();

    Checkpoint ckpt = load_input([&] { return load_checkpoint(rc.str("checkpoint")); });
    PretrainedEmbeddings pre = load_input([&] { return load_pretrained(rc.str("pretrained")); });

    const Tensor* trained = nullptr;
    for (const auto& [name, t] : ckpt.tensors)
        if (name == "embedding.E") trained = &t;
    if (!trained) throw UsageError("checkpoint is missing tensor 'embedding.E'");

    Tensor projection =
        learn_expansion_projection(pre, *trained, ckpt.vocab, static_cast<real>(rc.number("ridge")));

    ExpansionBlob blob;
    blob.projection = std::move(projection);
    blob.tokens = pre.tokens;
    blob.table = pre.vectors;
    ckpt.expansion = std::move(blob);
    save_checkpoint(rc.str("out"), ckpt);
    std::cerr << "wrote checkpoint '" << rc.str("out") << "' with vocabulary expansion\n";
    return 0;
}

void print_usage(std::ostream& out) {
    out << "usage: tskip <command> [--config file] [--key value ...]\n"
           "\n"
           "commands:\n"
           "  train         train a model on a corpus and write a checkpoint\n"
           "  encode        write one sentence vector per input line\n"
           "  retrieve      rank database sentences by cosine similarity to queries\n"
           "  generate      greedy-decode a continuation for each input sentence\n"
           "  eval          pair (relatedness/paraphrase) or class (k-fold CV) harness\n"
           "  param-count   closed-form parameter accounting for a configuration\n"
           "  expand-vocab  attach a pretrained-to-model embedding projection\n"
           "\n"
           "Config files hold key=value lines ('#' comments); flags override them.\n";
}

}  // namespace

int run(const std::vector<std::string>& args) {
    if (args.empty()) {
        print_usage(std::cerr);
        return 2;
    }
    const std::string& command = args[0];
    std::vector<std::string> rest(args.begin() + 1, args.end());
    if (command == "help" || command == "--help" || command == "-h") {
        print_usage(std::cout);
        return 0;
    }
    try {
        if (command == "train") return cmd_train(rest);
        if (command == "encode") return cmd_encode(rest);
        if (command == "retrieve") return cmd_retrieve(rest);
        if (command == "generate") return cmd_generate(rest);
        if (command == "eval") return cmd_eval(rest);
        if (command == "param-count") return cmd_param_count(rest);
        if (command == "expand-vocab") return cmd_expand_vocab(rest);
        std::cerr << "error: unknown command '" << command << "'\n";
        print_usage(std::cerr);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace cli
}  // namespace tskip
