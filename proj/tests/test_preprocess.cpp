#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "tsa/tsa.hpp"

using namespace tsa;
using support::make_record;

namespace {

std::u32string clean_cps(const std::string& raw) { return decode_utf8(preprocess(raw).clean); }

}  // namespace

TEST_CASE("tweet cleanup drops mentions, urls and hashtag signs") {
    const Preprocessed pp = preprocess("@ali whatsapp çöktü #whatsapp http://t.co/x");
    REQUIRE(pp.clean == "whatsapp çöktü whatsapp");
}

TEST_CASE("cleanup edge inputs") {
    REQUIRE(preprocess("").clean.empty());
    REQUIRE(preprocess("  \t\n ").clean.empty());
    REQUIRE(preprocess("####").clean.empty());
    REQUIRE(preprocess("@only @mentions").clean.empty());
    REQUIRE(preprocess("#tag").clean == "tag");
    REQUIRE(preprocess("#a#b").clean == "ab");
    REQUIRE(preprocess("www.foo.com y").clean == "y");
    REQUIRE(preprocess("x https://a.b").clean == "x");
    REQUIRE(preprocess("a   b").clean == "a b");
    REQUIRE(preprocess("  padded  ").clean == "padded");
    // '#' stripping happens before URL detection
    REQUIRE(preprocess("#www.foo.com y").clean == "y");
}

TEST_CASE("plain text passes through with an identity map") {
    const std::string text = "coca cola daha iyi lezzet olarak";
    const Preprocessed pp = preprocess(text);
    REQUIRE(pp.clean == text);
    const std::size_t n = decode_utf8(text).size();
    REQUIRE(pp.map.size() == n);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(pp.map(i) == i);
}

TEST_CASE("offset map points every clean character at its raw origin") {
    const std::vector<std::string> samples = {
        "@ali whatsapp çöktü #whatsapp http://t.co/x",
        "turkcell\tinternet  çok\nyavaş",
        "#kahve güzeldi ama servis #rezalet",
        "a ## b",
        "şikayet var: @destek yanıt vermiyor www.site.com",
    };
    for (const auto& raw : samples) {
        const std::u32string raw_cps = decode_utf8(raw);
        const Preprocessed pp = preprocess(raw);
        const std::u32string cl = decode_utf8(pp.clean);
        REQUIRE(pp.map.size() == cl.size());
        for (std::size_t i = 0; i < cl.size(); ++i) {
            const std::size_t j = pp.map(i);
            REQUIRE(j < raw_cps.size());
            if (cl[i] == U' ') {
                const char32_t c = raw_cps[j];
                REQUIRE((c == U' ' || c == U'\t' || c == U'\n' || c == U'\r'));
            } else {
                REQUIRE(raw_cps[j] == cl[i]);
            }
        }
    }
}

TEST_CASE("preprocess is idempotent") {
    const std::vector<std::string> samples = {
        "@ali whatsapp çöktü #whatsapp http://t.co/x",
        "coca cola daha iyi lezzet olarak",
        "#a#b  c   @d www.e.f",
        "",
        "çay #çay ##çay",
    };
    for (const auto& raw : samples) {
        const std::string once = preprocess(raw).clean;
        REQUIRE(preprocess(once).clean == once);
    }
}

TEST_CASE("offset map rejects bad construction and lookups") {
    REQUIRE_THROWS_AS(OffsetMap({3, 1, 2}), Error);
    const OffsetMap map({0, 1, 5});
    REQUIRE(map.size() == 3);
    REQUIRE(map(2) == 5);
    REQUIRE_THROWS_AS(map(3), RangeOutOfBounds);
}

TEST_CASE("target span remaps through hashtag stripping") {
    // "whatsapp" inside "#whatsapp çöktü" sits at raw [1, 9)
    const auto rec = make_record("r1", "#whatsapp çöktü", 1, 9, SentimentLabel::negative,
                                 SentimentLabel::negative);
    REQUIRE(rec.target == "whatsapp");
    const Preprocessed pp = preprocess(rec.text);
    REQUIRE(pp.clean == "whatsapp çöktü");
    const auto span = remap_span(rec, pp.clean, pp.map);
    REQUIRE(span.first == 0);
    REQUIRE(span.second == 8);
}

TEST_CASE("identity preprocessing leaves the span unchanged") {
    const auto rec = make_record("r2", "coca cola daha iyi", 5, 9, SentimentLabel::positive,
                                 SentimentLabel::positive);
    REQUIRE(rec.target == "cola");
    const Preprocessed pp = preprocess(rec.text);
    const auto span = remap_span(rec, pp.clean, pp.map);
    REQUIRE(span.first == 5);
    REQUIRE(span.second == 9);
}

TEST_CASE("span covering the hashtag sign shrinks to the kept characters") {
    const auto rec = make_record("r3", "#whatsapp çöktü", 0, 9, SentimentLabel::neutral,
                                 SentimentLabel::neutral);
    REQUIRE(rec.target == "#whatsapp");
    const Preprocessed pp = preprocess(rec.text);
    const auto span = remap_span(rec, pp.clean, pp.map);
    REQUIRE(span.first == 0);
    REQUIRE(span.second == 8);
    REQUIRE(encode_utf8(clean_cps(rec.text).substr(span.first, span.second - span.first)) ==
            "whatsapp");
}

TEST_CASE("a target wiped out by cleanup is reported lost") {
    // the target is a URL, which preprocessing removes entirely
    const auto rec = make_record("r4", "check http://t.co/x now", 6, 19,
                                 SentimentLabel::neutral, SentimentLabel::neutral);
    const Preprocessed pp = preprocess(rec.text);
    REQUIRE_THROWS_AS(remap_span(rec, pp.clean, pp.map), SpanLost);

    // all '#' characters: stripped, nothing survives
    const auto rec2 =
        make_record("r5", "a ## b", 2, 4, SentimentLabel::neutral, SentimentLabel::neutral);
    const Preprocessed pp2 = preprocess(rec2.text);
    REQUIRE_THROWS_AS(remap_span(rec2, pp2.clean, pp2.map), SpanLost);
}

TEST_CASE("unicode spans remap by scalar-value offsets") {
    const auto rec = make_record("r6", "çöktü mü evet", 6, 8, SentimentLabel::negative,
                                 SentimentLabel::positive);
    REQUIRE(rec.target == "mü");
    const Preprocessed pp = preprocess(rec.text);
    REQUIRE(pp.clean == rec.text);
    const auto span = remap_span(rec, pp.clean, pp.map);
    REQUIRE(span.first == 6);
    REQUIRE(span.second == 8);
}
