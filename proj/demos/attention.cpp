// Prints the attention pattern of a freshly initialized encoder over one
// marked sentence, one text heat map per layer/head. Pad columns stay
// blank because the key mask removes them before the softmax.

#include <cstdio>
#include <string>
#include <vector>

#include "tsa/tsa.hpp"

int main() {
    using namespace tsa;

    SyntheticConfig sc;
    sc.n_examples = 8;
    sc.seed = 4;
    const auto records = generate_synthetic(sc);
    const LabeledRecord& rec = records.front();
    std::printf("text:   %s\ntarget: %s\n\n", rec.text.c_str(), rec.target.c_str());

    std::vector<std::string> texts;
    for (const auto& r : records) texts.push_back(r.text);
    const Vocabulary vocab = build_vocab(texts, 120);

    EncoderConfig ec;
    ec.vocab_size = vocab.size();
    ec.hidden_size = 16;
    ec.num_layers = 2;
    ec.num_heads = 2;
    ec.ffn_size = 32;
    ec.max_len = 24;
    ec.seed = 4;
    const EncoderParameters params = init_encoder(ec);

    const EncodedExample ex = encode_record(rec, vocab, ec.max_len, true, LabelKind::targeted);
    ForwardTrace trace;
    encoder_forward(ex, params, false, nullptr, &trace);

    const std::size_t len = real_length(ex);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < len; ++i) names.push_back(vocab.token(ex.ids[i]));

    const char shades[] = " .:-=+*#%@";
    for (std::size_t layer = 0; layer < trace.attention.size(); ++layer) {
        for (std::size_t head = 0; head < trace.attention[layer].size(); ++head) {
            std::printf("layer %zu head %zu\n", layer, head);
            const auto& w = trace.attention[layer][head];
            for (std::size_t q = 0; q < len; ++q) {
                std::printf("%10.10s |", names[q].c_str());
                for (std::size_t k = 0; k < len; ++k) {
                    const double v = w[q * ec.max_len + k];
                    const int bucket = v >= 1.0 ? 9 : static_cast<int>(v * 10.0);
                    std::printf("%c", shades[bucket]);
                }
                std::printf("|\n");
            }
            std::printf("\n");
        }
    }
    return 0;
}
