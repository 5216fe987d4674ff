#include "tskip/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tskip {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kDtypeF32 = 0;
constexpr std::uint8_t kDtypeF64 = 1;

struct CorruptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_bytes(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::istream& in, void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw CorruptError("truncated checkpoint: unexpected end of file");
}

// Upper bound on how many bytes are still available, so corrupt length
// prefixes fail cleanly instead of attempting huge allocations.
std::size_t stream_remaining(std::istream& in) {
    auto cur = in.tellg();
    if (cur < 0) return static_cast<std::size_t>(-1);
    in.seekg(0, std::ios::end);
    auto end = in.tellg();
    in.seekg(cur);
    return static_cast<std::size_t>(end - cur);
}

void write_u8(std::ostream& out, std::uint8_t v) { write_bytes(out, &v, 1); }

std::uint8_t read_u8(std::istream& in) {
    std::uint8_t v;
    read_bytes(in, &v, 1);
    return v;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    write_bytes(out, b, 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    read_bytes(in, b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    write_bytes(out, b, 8);
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    read_bytes(in, b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(out, bits);
}

double read_f64(std::istream& in) {
    std::uint64_t bits = read_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    write_u32(out, bits);
}

float read_f32(std::istream& in) {
    std::uint32_t bits = read_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    write_bytes(out, s.data(), s.size());
}

std::string read_string(std::istream& in) {
    std::uint32_t n = read_u32(in);
    if (n > stream_remaining(in)) throw CorruptError("truncated checkpoint: unexpected end of file");
    std::string s(n, '\0');
    if (n) read_bytes(in, s.data(), n);
    return s;
}

void write_tensor(std::ostream& out, const std::string& name, const Tensor& t) {
    write_string(out, name);
    write_u32(out, static_cast<std::uint32_t>(t.rows));
    write_u32(out, static_cast<std::uint32_t>(t.cols));
#ifdef TSKIP_SINGLE_PRECISION
    write_u8(out, kDtypeF32);
    for (real x : t.data) write_f32(out, x);
#else
    write_u8(out, kDtypeF64);
    for (real x : t.data) write_f64(out, x);
#endif
}

std::pair<std::string, Tensor> read_tensor(std::istream& in) {
    std::string name = read_string(in);
    int rows = static_cast<int>(read_u32(in));
    int cols = static_cast<int>(read_u32(in));
    std::uint8_t dtype = read_u8(in);
    if (dtype != kDtypeF32 && dtype != kDtypeF64)
        throw CorruptError("checkpoint tensor '" + name + "' has unknown dtype tag " + std::to_string(dtype));
    if (rows < 0 || cols < 0)
        throw CorruptError("checkpoint tensor '" + name + "' has negative shape");
    std::size_t payload = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) *
                          (dtype == kDtypeF64 ? 8 : 4);
    if (payload > stream_remaining(in)) throw CorruptError("truncated checkpoint: unexpected end of file");
    Tensor t(rows, cols);
    for (int i = 0; i < t.size(); ++i)
        t.data[i] = dtype == kDtypeF64 ? static_cast<real>(read_f64(in)) : static_cast<real>(read_f32(in));
    return {std::move(name), std::move(t)};
}

}  // namespace

std::string config_to_text(const ModelConfig& cfg) {
    std::ostringstream out;
    out << "vocab_size=" << cfg.vocab_size << "\n"
        << "embed_dim=" << cfg.embed_dim << "\n"
        << "encoder_kind=" << to_string(cfg.encoder_kind) << "\n"
        << "encoder_dim=" << cfg.encoder_dim << "\n"
        << "connection=" << to_string(cfg.connection) << "\n"
        << "decoder_dim=" << cfg.decoder_dim << "\n"
        << "targets=" << to_string(cfg.targets) << "\n";
    return out.str();
}

ModelConfig config_from_text(const std::string& text) {
    ModelConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad config line '" + line + "'");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        if (key == "vocab_size") cfg.vocab_size = std::stoi(value);
        else if (key == "embed_dim") cfg.embed_dim = std::stoi(value);
        else if (key == "encoder_kind") cfg.encoder_kind = encoder_kind_from(value);
        else if (key == "encoder_dim") cfg.encoder_dim = std::stoi(value);
        else if (key == "connection") cfg.connection = connection_from(value);
        else if (key == "decoder_dim") cfg.decoder_dim = std::stoi(value);
        else if (key == "targets") cfg.targets = targets_from(value);
        else throw std::runtime_error("unknown config key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");

    write_bytes(out, kMagic, 4);
    write_u32(out, ckpt.version);
    write_string(out, config_to_text(ckpt.config));

    // vocabulary block: total size, then non-reserved (token, frequency)
    std::ostringstream vb(std::ios::binary);
    write_u32(vb, static_cast<std::uint32_t>(ckpt.vocab.size()));
    for (int id = kNumReserved; id < ckpt.vocab.size(); ++id) {
        write_string(vb, ckpt.vocab.id_to_token[id]);
        write_u64(vb, ckpt.vocab.frequencies[id]);
    }
    write_string(out, vb.str());

    write_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, t] : ckpt.tensors) write_tensor(out, name, t);

    write_u8(out, ckpt.adam ? 1 : 0);
    if (ckpt.adam) {
        write_u64(out, static_cast<std::uint64_t>(ckpt.adam->t));
        write_f64(out, ckpt.adam->config.alpha);
        write_f64(out, ckpt.adam->config.beta1);
        write_f64(out, ckpt.adam->config.beta2);
        write_f64(out, ckpt.adam->config.eps);
        write_u32(out, static_cast<std::uint32_t>(ckpt.adam->m.size()));
        for (std::size_t i = 0; i < ckpt.adam->m.size(); ++i) {
            write_tensor(out, "m", ckpt.adam->m[i]);
            write_tensor(out, "v", ckpt.adam->v[i]);
        }
    }

    write_u8(out, ckpt.expansion ? 1 : 0);
    if (ckpt.expansion) {
        write_tensor(out, "expansion.M", ckpt.expansion->projection);
        write_u32(out, static_cast<std::uint32_t>(ckpt.expansion->tokens.size()));
        for (const auto& tok : ckpt.expansion->tokens) write_string(out, tok);
        write_tensor(out, "expansion.table", ckpt.expansion->table);
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");

    char magic[4];
    read_bytes(in, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("'" + path + "' is not a checkpoint (bad magic)");

    Checkpoint ckpt;
    ckpt.version = read_u32(in);
    if (ckpt.version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(ckpt.version) +
                                 " (expected " + std::to_string(kVersion) + ")");

    ckpt.config = config_from_text(read_string(in));

    std::istringstream vb(read_string(in), std::ios::binary);
    std::uint32_t vocab_size = read_u32(vb);
    if (vocab_size < static_cast<std::uint32_t>(kNumReserved))
        throw CorruptError("checkpoint vocabulary smaller than the reserved set");
    std::vector<std::string> toks{kPadToken, kUnkToken, kBosToken, kEosToken};
    std::vector<std::uint64_t> freqs(kNumReserved, 0);
    for (std::uint32_t i = kNumReserved; i < vocab_size; ++i) {
        toks.push_back(read_string(vb));
        freqs.push_back(read_u64(vb));
    }
    ckpt.vocab = vocab_from_tokens(std::move(toks), std::move(freqs));

    std::uint32_t n_tensors = read_u32(in);
    ckpt.tensors.reserve(n_tensors);
    for (std::uint32_t i = 0; i < n_tensors; ++i) ckpt.tensors.push_back(read_tensor(in));

    if (read_u8(in)) {
        AdamStateBlob blob;
        blob.t = static_cast<long long>(read_u64(in));
        blob.config.alpha = static_cast<real>(read_f64(in));
        blob.config.beta1 = static_cast<real>(read_f64(in));
        blob.config.beta2 = static_cast<real>(read_f64(in));
        blob.config.eps = static_cast<real>(read_f64(in));
        std::uint32_t n = read_u32(in);
        for (std::uint32_t i = 0; i < n; ++i) {
            blob.m.push_back(read_tensor(in).second);
            blob.v.push_back(read_tensor(in).second);
        }
        ckpt.adam = std::move(blob);
    }

    if (read_u8(in)) {
        ExpansionBlob blob;
        blob.projection = read_tensor(in).second;
        std::uint32_t n = read_u32(in);
        blob.tokens.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) blob.tokens.push_back(read_string(in));
        blob.table = read_tensor(in).second;
        if (blob.table.rows != static_cast<int>(n) || blob.table.cols != blob.projection.rows)
            throw CorruptError("checkpoint expansion table shape does not match its token list");
        ckpt.expansion = std::move(blob);
    }
    return ckpt;
}

Checkpoint make_checkpoint(const ModelConfig& cfg, const Vocabulary& vocab, const ModelParams& params) {
    params.validate(cfg);
    if (vocab.size() != cfg.vocab_size)
        throw std::invalid_argument("make_checkpoint: vocabulary size " + std::to_string(vocab.size()) +
                                    " does not match config vocab_size " + std::to_string(cfg.vocab_size));
    Checkpoint ckpt;
    ckpt.config = cfg;
    ckpt.vocab = vocab;
    for (const auto& [name, node] : params.named()) ckpt.tensors.emplace_back(name, node->value);
    return ckpt;
}

ModelParams params_from_checkpoint(const Checkpoint& ckpt) {
    std::map<std::string, Tensor> by_name(ckpt.tensors.begin(), ckpt.tensors.end());
    auto take = [&](const std::string& name) {
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw std::runtime_error("checkpoint is missing tensor '" + name + "'");
        Tensor t = std::move(it->second);
        by_name.erase(it);
        return t;
    };
    auto take_gru = [&](const std::string& prefix) {
        return GruCell::from_tensors(take(prefix + ".w_h"), take(prefix + ".w_x"), take(prefix + ".w"),
                                     take(prefix + ".u"));
    };
    auto take_cond = [&](const std::string& prefix) {
        return CondGruCell::from_tensors(take(prefix + ".w_h"), take(prefix + ".w_x"), take(prefix + ".w"),
                                         take(prefix + ".u"), take(prefix + ".w_z"), take(prefix + ".u_z"));
    };

    const ModelConfig& cfg = ckpt.config;
    ModelParams p;
    p.embedding = ad::parameter(take("embedding.E"));
    if (cfg.encoder_kind == EncoderKind::bi) {
        p.enc_fwd = take_gru("encoder.fwd");
        p.enc_bwd = take_gru("encoder.bwd");
    } else {
        p.enc_fwd = take_gru("encoder");
    }
    p.dec_next = take_cond("decoder_next");
    if (cfg.targets == Targets::both) p.dec_prev = take_cond("decoder_prev");
    p.prediction = ad::parameter(take("prediction.P"));
    if (!by_name.empty())
        throw std::runtime_error("checkpoint holds unexpected tensor '" + by_name.begin()->first + "'");

    try {
        p.validate(cfg);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("checkpoint shape mismatch: ") + e.what());
    }
    return p;
}

}  // namespace tskip
