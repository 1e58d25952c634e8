#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"
#include "tsa/tsa.hpp"

using namespace tsa;
using support::make_record;

namespace {

const char* kValidLine =
    R"({"id":"t1","text":"whatsapp çöktü","target":"whatsapp","target_start":0,"target_end":8,)"
    R"("sentence_sentiment":"negative","targeted_sentiment":"negative"})";

std::vector<LabeledRecord> parse_lines(const std::string& text) {
    std::istringstream in(text);
    return parse_dataset(in);
}

}  // namespace

TEST_CASE("jsonl parses into records") {
    const std::string three = std::string(kValidLine) + "\n" +
        R"({"id":"t2","text":"çay güzel","target":"çay","target_start":0,"target_end":3,)"
        R"("sentence_sentiment":"positive","targeted_sentiment":"positive"})" "\n" +
        R"({"id":"t3","text":"servis kötü ama yemek iyi","target":"yemek","target_start":16,)"
        R"("target_end":21,"sentence_sentiment":"neutral","targeted_sentiment":"positive"})" "\n";
    const auto records = parse_lines(three);
    REQUIRE(records.size() == 3);
    REQUIRE(records[0].id == "t1");
    REQUIRE(records[0].text == "whatsapp çöktü");
    REQUIRE(records[0].target == "whatsapp");
    REQUIRE(records[0].target_start == 0);
    REQUIRE(records[0].target_end == 8);
    REQUIRE(records[0].sentence_sentiment == SentimentLabel::negative);
    REQUIRE(records[1].id == "t2");
    REQUIRE(records[1].targeted_sentiment == SentimentLabel::positive);
    REQUIRE(records[2].target == "yemek");
    REQUIRE(records[2].sentence_sentiment == SentimentLabel::neutral);
    REQUIRE(records[2].targeted_sentiment == SentimentLabel::positive);
}

TEST_CASE("offsets count unicode scalar values") {
    // "çay güzel" has 9 scalar values but more bytes; target_end 3 is only
    // valid under scalar-value counting
    const auto records = parse_lines(
        R"({"id":"u1","text":"çay güzel","target":"çay","target_start":0,"target_end":3,)"
        R"("sentence_sentiment":"positive","targeted_sentiment":"positive"})" "\n");
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].label(LabelKind::targeted) == SentimentLabel::positive);
}

TEST_CASE("blank lines are skipped but still counted for diagnostics") {
    const std::string text = std::string("\n\n") +
        R"({"id":"x","text":"ab","target":"a","target_start":0,"target_end":9,)"
        R"("sentence_sentiment":"neutral","targeted_sentiment":"neutral"})" "\n";
    try {
        parse_lines(text);
        FAIL("expected InvariantViolation");
    } catch (const InvariantViolation& e) {
        REQUIRE(e.line == 3);
        REQUIRE(e.field == "target_end");
    }
}

TEST_CASE("malformed json is a parse error with a line number") {
    try {
        parse_lines(std::string(kValidLine) + "\n{oops\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 2);
    }
}

TEST_CASE("missing or mistyped keys are parse errors") {
    REQUIRE_THROWS_AS(
        parse_lines(R"({"id":"x","text":"ab","target":"a","target_start":0,"target_end":1,)"
                    R"("sentence_sentiment":"neutral"})" "\n"),
        ParseError);
    REQUIRE_THROWS_AS(
        parse_lines(R"({"id":7,"text":"ab","target":"a","target_start":0,"target_end":1,)"
                    R"("sentence_sentiment":"neutral","targeted_sentiment":"neutral"})" "\n"),
        ParseError);
}

TEST_CASE("bad offsets and labels are invariant violations") {
    // negative offset
    REQUIRE_THROWS_AS(
        parse_lines(R"({"id":"x","text":"ab","target":"a","target_start":-1,"target_end":1,)"
                    R"("sentence_sentiment":"neutral","targeted_sentiment":"neutral"})" "\n"),
        InvariantViolation);
    // non-integer offset
    REQUIRE_THROWS_AS(
        parse_lines(R"({"id":"x","text":"ab","target":"a","target_start":0.5,"target_end":1,)"
                    R"("sentence_sentiment":"neutral","targeted_sentiment":"neutral"})" "\n"),
        InvariantViolation);
    // unknown label word
    REQUIRE_THROWS_AS(
        parse_lines(R"({"id":"x","text":"ab","target":"a","target_start":0,"target_end":1,)"
                    R"("sentence_sentiment":"meh","targeted_sentiment":"neutral"})" "\n"),
        InvariantViolation);
}

TEST_CASE("record invariants: empty span, overrun, slice mismatch") {
    try {
        parse_lines(R"({"id":"x","text":"ab","target":"a","target_start":1,"target_end":1,)"
                    R"("sentence_sentiment":"neutral","targeted_sentiment":"neutral"})" "\n");
        FAIL("expected InvariantViolation");
    } catch (const InvariantViolation& e) {
        REQUIRE(e.field == "target_start");
    }
    try {
        parse_lines(R"({"id":"x","text":"ab","target":"b","target_start":0,"target_end":1,)"
                    R"("sentence_sentiment":"neutral","targeted_sentiment":"neutral"})" "\n");
        FAIL("expected InvariantViolation");
    } catch (const InvariantViolation& e) {
        REQUIRE(e.field == "target");
    }
}

TEST_CASE("check_record mirrors the parser's field blame") {
    auto rec = make_record("ok", "servis iyi", 0, 6, SentimentLabel::positive,
                           SentimentLabel::positive);
    REQUIRE(check_record(rec).empty());
    rec.target_end = 99;
    REQUIRE(check_record(rec) == "target_end");
    rec.target_end = 6;
    rec.target = "xxx";
    REQUIRE(check_record(rec) == "target");
    rec.target_start = 6;
    REQUIRE(check_record(rec) == "target_start");
}

TEST_CASE("save then load is the identity") {
    support::TempDir dir;
    std::vector<LabeledRecord> records;
    records.push_back(make_record("a", "çay güzel", 0, 3, SentimentLabel::positive,
                                  SentimentLabel::negative));
    records.push_back(make_record("b", "kargo geç geldi", 0, 5, SentimentLabel::negative,
                                  SentimentLabel::negative));
    const std::string path = dir.file("data.jsonl");
    save_dataset(path, records);
    const auto loaded = load_dataset(path);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        REQUIRE(loaded[i].id == records[i].id);
        REQUIRE(loaded[i].text == records[i].text);
        REQUIRE(loaded[i].target == records[i].target);
        REQUIRE(loaded[i].target_start == records[i].target_start);
        REQUIRE(loaded[i].target_end == records[i].target_end);
        REQUIRE(loaded[i].sentence_sentiment == records[i].sentence_sentiment);
        REQUIRE(loaded[i].targeted_sentiment == records[i].targeted_sentiment);
    }
}

TEST_CASE("stream round trip without files") {
    const auto records = parse_lines(std::string(kValidLine) + "\n");
    std::ostringstream out;
    write_dataset(out, records);
    const auto again = parse_lines(out.str());
    REQUIRE(again.size() == 1);
    REQUIRE(again[0].id == records[0].id);
    REQUIRE(again[0].text == records[0].text);
}

TEST_CASE("missing file is an io error") {
    REQUIRE_THROWS_AS(load_dataset("/nonexistent/nope.jsonl"), IoError);
}
