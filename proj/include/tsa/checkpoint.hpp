#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "tsa/model.hpp"

// Checkpoint file layout, all integers and floats little-endian:
//   bytes 0-7   magic "TSACHKPT"
//   u32         format version (currently 1)
//   u8          variant index
//   u64 x 6     vocab_size, hidden_size, num_layers, num_heads, ffn_size, max_len
//   f64         dropout_rate
//   u64         seed
//   u64         vocab token count, then per token: u32 byte length + bytes
//   f64 ...     parameter payload, tensors in model_parameters() order
// The payload length is fully determined by the header; trailing or missing
// bytes make the file corrupt.

namespace tsa {

inline constexpr char kCheckpointMagic[8] = {'T', 'S', 'A', 'C', 'H', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

class ByteReader {
public:
    ByteReader(const std::string& bytes, std::size_t offset) : bytes_(bytes), pos_(offset) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) throw CorruptCheckpoint("truncated file");
    }
    const std::string& bytes_;
    std::size_t pos_;
};

}  // namespace detail

inline void save_checkpoint(const Model& model, const std::string& path) {
    std::string out;
    out.append(kCheckpointMagic, sizeof(kCheckpointMagic));
    detail::put_u32(out, kCheckpointVersion);
    out.push_back(static_cast<char>(model.variant));
    const EncoderConfig& c = model.encoder.config;
    detail::put_u64(out, c.vocab_size);
    detail::put_u64(out, c.hidden_size);
    detail::put_u64(out, c.num_layers);
    detail::put_u64(out, c.num_heads);
    detail::put_u64(out, c.ffn_size);
    detail::put_u64(out, c.max_len);
    detail::put_f64(out, c.dropout_rate);
    detail::put_u64(out, c.seed);
    detail::put_u64(out, model.vocab.size());
    for (std::size_t i = 0; i < model.vocab.size(); ++i) {
        const std::string& tok = model.vocab.token(static_cast<TokenId>(i));
        detail::put_u32(out, static_cast<std::uint32_t>(tok.size()));
        out.append(tok);
    }
    for (const ParamRef& p : model_parameters(model))
        for (double v : p.tensor.data()) detail::put_f64(out, v);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed for " + path);
}

inline Model load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (bytes.size() < sizeof(kCheckpointMagic) ||
        std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0)
        throw CorruptCheckpoint(path + ": bad magic");
    detail::ByteReader r(bytes, sizeof(kCheckpointMagic));
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion)
        throw VersionMismatch(path + ": format version " + std::to_string(version));

    const std::uint64_t variant_idx =
        static_cast<unsigned char>(r.str(1)[0]);
    if (variant_idx >= all_variants().size())
        throw CorruptCheckpoint(path + ": bad variant index");

    EncoderConfig cfg;
    cfg.vocab_size = r.u64();
    cfg.hidden_size = r.u64();
    cfg.num_layers = r.u64();
    cfg.num_heads = r.u64();
    cfg.ffn_size = r.u64();
    cfg.max_len = r.u64();
    cfg.dropout_rate = r.f64();
    cfg.seed = r.u64();
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        throw CorruptCheckpoint(path + ": " + e.what());
    }

    const std::uint64_t vocab_count = r.u64();
    if (vocab_count != cfg.vocab_size) throw CorruptCheckpoint(path + ": vocab size mismatch");
    Vocabulary vocab;
    for (std::uint64_t i = 0; i < vocab_count; ++i) {
        const std::uint32_t len = r.u32();
        const std::string tok = r.str(len);
        if (i < reserved_tokens().size()) {
            if (tok != reserved_tokens()[i])
                throw CorruptCheckpoint(path + ": reserved token mismatch at id " +
                                        std::to_string(i));
        } else if (tok.empty() || vocab.add(tok) != i) {
            throw CorruptCheckpoint(path + ": duplicate or empty token at id " +
                                    std::to_string(i));
        }
    }
    if (vocab.size() != cfg.vocab_size) throw CorruptCheckpoint(path + ": vocab size mismatch");

    Model model = build_model(all_variants()[variant_idx], vocab, cfg);
    for (ParamRef& p : model_parameters(model)) {
        for (double& v : p.tensor.mutable_data()) {
            v = r.f64();
            if (!std::isfinite(v)) throw CorruptCheckpoint(path + ": non-finite parameter");
        }
    }
    if (r.remaining() != 0) throw CorruptCheckpoint(path + ": trailing bytes");
    return model;
}

}  // namespace tsa
