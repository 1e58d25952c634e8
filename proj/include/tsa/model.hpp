#pragma once

#include <array>
#include <string>
#include <vector>

#include "tsa/encoder.hpp"
#include "tsa/heads.hpp"
#include "tsa/preprocess.hpp"

// The five model variants: a shared encoder plus one of three heads, with
// the input representation (marked or not) and the supervising label fixed
// per variant.

namespace tsa {

enum class ModelVariant {
    baseline_sentence,
    t_bert,
    t_bert_marked,
    t_bert_marked_ts,
    t_bert_marked_mp,
};

enum class HeadKind { cls, marker, maxpool };

struct VariantWiring {
    bool marked;
    HeadKind head;
    LabelKind label;
};

inline VariantWiring wiring(ModelVariant v) {
    switch (v) {
        case ModelVariant::baseline_sentence:
            return {false, HeadKind::cls, LabelKind::sentence};
        case ModelVariant::t_bert:
            return {false, HeadKind::cls, LabelKind::targeted};
        case ModelVariant::t_bert_marked:
            return {true, HeadKind::cls, LabelKind::targeted};
        case ModelVariant::t_bert_marked_ts:
            return {true, HeadKind::marker, LabelKind::targeted};
        case ModelVariant::t_bert_marked_mp:
            return {true, HeadKind::maxpool, LabelKind::targeted};
    }
    throw ConfigError("unknown variant");
}

inline std::array<ModelVariant, 5> all_variants() {
    return {ModelVariant::baseline_sentence, ModelVariant::t_bert, ModelVariant::t_bert_marked,
            ModelVariant::t_bert_marked_ts, ModelVariant::t_bert_marked_mp};
}

inline const char* variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::baseline_sentence: return "baseline";
        case ModelVariant::t_bert: return "t-bert";
        case ModelVariant::t_bert_marked: return "t-bert-marked";
        case ModelVariant::t_bert_marked_ts: return "t-bert-marked-ts";
        case ModelVariant::t_bert_marked_mp: return "t-bert-marked-mp";
    }
    throw ConfigError("unknown variant");
}

inline ModelVariant parse_variant(const std::string& name) {
    for (ModelVariant v : all_variants())
        if (name == variant_name(v)) return v;
    throw ConfigError("unknown variant '" + name + "'");
}

struct Model {
    ModelVariant variant = ModelVariant::baseline_sentence;
    Vocabulary vocab;
    EncoderParameters encoder;
    ClassifierHead head;
};

// Fresh model with randomly initialized encoder and head; config.seed
// determines both.
inline Model build_model(ModelVariant variant, const Vocabulary& vocab, EncoderConfig config) {
    config.vocab_size = vocab.size();
    config.validate();
    Rng rng(config.seed);
    Model m;
    m.variant = variant;
    m.vocab = vocab;
    m.encoder = init_encoder(config, rng);
    m.head = init_head(config.hidden_size, rng);
    return m;
}

// One entry per trainable tensor, in the canonical order used by the
// optimizer and the checkpoint payload. `decay` marks tensors subject to
// weight decay (weight matrices and embeddings; not biases or layer-norms).
struct ParamRef {
    Tensor tensor;
    bool decay;
    std::string name;
};

inline std::vector<ParamRef> model_parameters(const Model& m) {
    std::vector<ParamRef> out;
    out.push_back({m.encoder.token_embeddings, true, "token_embeddings"});
    out.push_back({m.encoder.position_embeddings, true, "position_embeddings"});
    for (std::size_t i = 0; i < m.encoder.layers.size(); ++i) {
        const auto& l = m.encoder.layers[i];
        const std::string p = "layer" + std::to_string(i) + ".";
        out.push_back({l.wq, true, p + "wq"});
        out.push_back({l.bq, false, p + "bq"});
        out.push_back({l.wk, true, p + "wk"});
        out.push_back({l.bk, false, p + "bk"});
        out.push_back({l.wv, true, p + "wv"});
        out.push_back({l.bv, false, p + "bv"});
        out.push_back({l.wo, true, p + "wo"});
        out.push_back({l.bo, false, p + "bo"});
        out.push_back({l.ln1_gamma, false, p + "ln1_gamma"});
        out.push_back({l.ln1_beta, false, p + "ln1_beta"});
        out.push_back({l.w1, true, p + "w1"});
        out.push_back({l.b1, false, p + "b1"});
        out.push_back({l.w2, true, p + "w2"});
        out.push_back({l.b2, false, p + "b2"});
        out.push_back({l.ln2_gamma, false, p + "ln2_gamma"});
        out.push_back({l.ln2_beta, false, p + "ln2_beta"});
    }
    out.push_back({m.head.weight, true, "head.weight"});
    out.push_back({m.head.bias, false, "head.bias"});
    return out;
}

// Preprocesses raw text, remaps the target span, and encodes for the
// given input representation. Works equally on already-clean text because
// preprocessing is idempotent.
inline EncodedExample encode_record(const LabeledRecord& record, const Vocabulary& vocab,
                                    std::size_t max_len, bool marked, LabelKind label_kind) {
    const Preprocessed pp = preprocess(record.text);
    const auto span = remap_span(record, pp.clean, pp.map);
    LabeledRecord clean = record;
    clean.text = pp.clean;
    return encode(clean, span, vocab, max_len, marked, label_kind);
}

inline EncodedExample encode_for_model(const Model& m, const LabeledRecord& record) {
    const VariantWiring w = wiring(m.variant);
    return encode_record(record, m.vocab, m.encoder.config.max_len, w.marked, w.label);
}

inline Tensor model_logits(const Model& m, const EncodedExample& ex, bool train_mode = false,
                           Rng* rng = nullptr, ForwardTrace* trace = nullptr) {
    const Tensor h = encoder_forward(ex, m.encoder, train_mode, rng, trace);
    switch (wiring(m.variant).head) {
        case HeadKind::cls: return cls_head(h, m.head);
        case HeadKind::marker: return marker_head(h, ex, m.head);
        case HeadKind::maxpool: return maxpool_head(h, ex, m.head);
    }
    throw ConfigError("unknown head kind");
}

struct Prediction {
    SentimentLabel label = SentimentLabel::neutral;
    std::array<double, 3> probs{};
};

inline Prediction from_logits(const Tensor& logits) {
    const Tensor p = softmax(logits, 0);
    Prediction out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < kNumClasses; ++i) {
        out.probs[i] = p.data()[i];
        if (p.data()[i] > p.data()[best]) best = i;  // ties keep the lowest index
    }
    out.label = label_from_index(best);
    return out;
}

// Full pipeline on one record: preprocess, encode, forward, head, softmax,
// argmax (ties to the lowest class index).
inline Prediction predict(const Model& m, const LabeledRecord& record) {
    return from_logits(model_logits(m, encode_for_model(m, record)));
}

}  // namespace tsa
