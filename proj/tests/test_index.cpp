#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <kwrank/errors.hpp>
#include <kwrank/index.hpp>
#include <kwrank/ingest.hpp>
#include <kwrank/text.hpp>

#include "helpers.hpp"

using kwrank::AnnotatedImage;
using kwrank::Annotation;
using kwrank::CandidateSet;
using kwrank::Document;
using kwrank::ImageRef;
using kwrank::ImportanceReport;
using kwrank::InvertedIndex;
using kwrank::Rational;

namespace {

Document one_image_doc(const std::string& alt) {
    Document doc;
    doc.doc_id = "doc.html";
    doc.images.push_back(ImageRef{"img/pic.png", alt, "doc.html"});
    return doc;
}

CandidateSet make_candidates(std::vector<std::pair<std::string, long long>> entries) {
    CandidateSet set;
    for (auto& [keyword, count] : entries) set.members.push_back({keyword, count});
    return set;
}

ImportanceReport make_report(std::vector<std::pair<std::string, Rational>> scores) {
    ImportanceReport report;
    for (auto& [keyword, score] : scores) report.scores.emplace(keyword, kwrank::RankScore{keyword, score, 0});
    return report;
}

}  // namespace

TEST_CASE("annotation picks top keywords by frequency then rank", "[index]") {
    Document doc = one_image_doc("");
    CandidateSet candidates = make_candidates({{"bravo", 6}, {"delta", 6}, {"echo", 5}, {"alpha", 4}});
    ImportanceReport report = make_report({{"bravo", Rational(7, 10)}, {"delta", Rational(2, 5)},
                                           {"echo", Rational(1, 5)}});
    auto annotated = kwrank::annotate_images(doc, candidates, report, 2);
    REQUIRE(annotated.size() == 1);
    CHECK(annotated[0].image_id == "img/pic.png");
    CHECK(annotated[0].owner_doc == "doc.html");
    REQUIRE(annotated[0].annotations.size() == 2);
    CHECK(annotated[0].annotations[0] == Annotation{"bravo", 6, Rational(7, 10)});
    CHECK(annotated[0].annotations[1] == Annotation{"delta", 6, Rational(2, 5)});
}

TEST_CASE("alt keywords win frequency ties at the cap", "[index]") {
    // pp outranks qq, but qq came from the image's own alt text; at equal
    // frequency the alt keyword survives the cap
    Document doc = one_image_doc("qq");
    CandidateSet candidates = make_candidates({{"pp", 2}, {"qq", 2}});
    ImportanceReport report = make_report({{"pp", Rational(1, 2)}, {"qq", Rational(1, 10)}});
    auto annotated = kwrank::annotate_images(doc, candidates, report, 1);
    REQUIRE(annotated.size() == 1);
    REQUIRE(annotated[0].annotations.size() == 1);
    CHECK(annotated[0].annotations[0].keyword == "qq");
}

TEST_CASE("stored annotation order is frequency then rank, alt bias forgotten", "[index]") {
    Document doc = one_image_doc("xx");
    CandidateSet candidates = make_candidates({{"xx", 2}, {"yy", 2}});
    ImportanceReport report = make_report({{"xx", Rational(1, 10)}, {"yy", Rational(1, 2)}});
    auto annotated = kwrank::annotate_images(doc, candidates, report, 10);
    REQUIRE(annotated.size() == 1);
    REQUIRE(annotated[0].annotations.size() == 2);
    // both survive, and yy leads on rank despite xx being the alt keyword
    CHECK(annotated[0].annotations[0].keyword == "yy");
    CHECK(annotated[0].annotations[1].keyword == "xx");
}

TEST_CASE("alt tokens outside the candidate set get frequency zero", "[index]") {
    Document doc = one_image_doc("himalaya");
    CandidateSet candidates = make_candidates({{"mountain", 2}});
    ImportanceReport report = make_report({{"mountain", Rational(7, 11)}});
    auto annotated = kwrank::annotate_images(doc, candidates, report, 10);
    REQUIRE(annotated.size() == 1);
    REQUIRE(annotated[0].annotations.size() == 2);
    CHECK(annotated[0].annotations[0] == Annotation{"mountain", 2, Rational(7, 11)});
    CHECK(annotated[0].annotations[1] == Annotation{"himalaya", 0, Rational()});
}

TEST_CASE("images with nothing to say are omitted", "[index]") {
    Document doc = one_image_doc("");
    auto annotated = kwrank::annotate_images(doc, CandidateSet{}, ImportanceReport{}, 5);
    CHECK(annotated.empty());
    // alt text made of stopwords only collapses to nothing as well
    Document stoppy = one_image_doc("the of and");
    auto annotated2 = kwrank::annotate_images(stoppy, CandidateSet{}, ImportanceReport{},
                                              5, kwrank::default_stopwords());
    CHECK(annotated2.empty());
}

TEST_CASE("alt tokenization respects the stopword set", "[index]") {
    Document doc = one_image_doc("the water");
    auto annotated = kwrank::annotate_images(doc, CandidateSet{}, ImportanceReport{},
                                             5, kwrank::default_stopwords());
    REQUIRE(annotated.size() == 1);
    REQUIRE(annotated[0].annotations.size() == 1);
    CHECK(annotated[0].annotations[0].keyword == "water");
}

TEST_CASE("annotation cap must be positive", "[index]") {
    Document doc = one_image_doc("water");
    CHECK_THROWS_AS(kwrank::annotate_images(doc, CandidateSet{}, ImportanceReport{}, 0),
                    std::invalid_argument);
}

TEST_CASE("index rejects malformed images at add time", "[index]") {
    InvertedIndex index;
    auto image = [](std::string id, std::vector<Annotation> annotations) {
        return AnnotatedImage{std::move(id), "doc", std::move(annotations)};
    };
    CHECK_THROWS_AS(index.add(image("", {{"w", 1, Rational()}})), std::invalid_argument);
    CHECK_THROWS_AS(index.add(image("img", {})), std::invalid_argument);
    CHECK_THROWS_AS(index.add(image("img", {{"", 1, Rational()}})), std::invalid_argument);
    CHECK_THROWS_AS(index.add(image("img", {{"a:b", 1, Rational()}})), std::invalid_argument);
    CHECK_THROWS_AS(index.add(image("img", {{"a\tb", 1, Rational()}})), std::invalid_argument);
    CHECK_THROWS_AS(index.add(image("img", {{"w", -1, Rational()}})), std::invalid_argument);
    CHECK_THROWS_AS(index.add(image("img", {{"w", 1, Rational()}, {"w", 2, Rational()}})),
                    std::invalid_argument);
    CHECK(index.empty());  // nothing slipped in
}

TEST_CASE("re-adding an image replaces it and retires stale postings", "[index]") {
    InvertedIndex index;
    index.add(AnnotatedImage{"img1", "doc", {{"old", 3, Rational()}, {"both", 2, Rational()}}});
    index.add(AnnotatedImage{"img2", "doc", {{"old", 1, Rational()}}});
    index.add(AnnotatedImage{"img1", "doc", {{"both", 5, Rational()}, {"fresh", 1, Rational()}}});

    CHECK(index.image_count() == 2);
    CHECK(index.postings().count("old") == 1);          // img2 still holds it
    CHECK(index.postings().at("old").count("img1") == 0);
    CHECK(index.postings().at("fresh").count("img1") == 1);
    CHECK(index.images().at("img1").find("both")->frequency == 5);
    index.audit_consistency();

    // dropping the last holder erases the posting key entirely
    index.add(AnnotatedImage{"img2", "doc", {{"fresh", 9, Rational()}}});
    CHECK(index.postings().count("old") == 0);
    index.audit_consistency();
}

TEST_CASE("query normalizes its keyword and sorts matches", "[index]") {
    InvertedIndex index;
    index.add(AnnotatedImage{"low", "doc", {{"b", 1, Rational(1, 10)}}});
    index.add(AnnotatedImage{"high", "doc", {{"b", 4, Rational(1, 10)}}});
    index.add(AnnotatedImage{"ranked", "doc", {{"b", 1, Rational(7, 10)}}});

    auto hits = index.query("B");  // uppercase query still matches
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].image_id == "high");    // frequency 4 first
    CHECK(hits[1].image_id == "ranked");  // then rank 7/10
    CHECK(hits[2].image_id == "low");

    CHECK(index.query("absent").empty());
    CHECK(index.query("").empty());
    CHECK(index.query("not a keyword").empty());
}

TEST_CASE("same annotation everywhere falls back to image id order", "[index]") {
    InvertedIndex index;
    for (const char* id : {"c.png", "a.png", "b.png"})
        index.add(AnnotatedImage{id, "doc", {{"w", 2, Rational(1, 2)}}});
    auto hits = index.query("w");
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].image_id == "a.png");
    CHECK(hits[1].image_id == "b.png");
    CHECK(hits[2].image_id == "c.png");
}

TEST_CASE("index persistence round trips exactly", "[index]") {
    InvertedIndex index;
    index.add(AnnotatedImage{"b.png", "docB", {{"water", 3, Rational(7, 11)}, {"sky", 1, Rational()}}});
    index.add(AnnotatedImage{"a.png", "docA", {{"water", 2, Rational(1, 2)}}});
    std::string saved = index.save();
    // records appear sorted by image id, annotations in stored order
    CHECK(saved ==
          "kwrankidx 1\n"
          "a.png\tdocA\twater:2:1/2\n"
          "b.png\tdocB\twater:3:7/11\tsky:1:0/1\n");
    InvertedIndex reloaded = InvertedIndex::load(saved);
    CHECK(reloaded == index);
    CHECK(reloaded.save() == saved);
    reloaded.audit_consistency();
}

TEST_CASE("index load tolerates crlf and a trailing blank line", "[index]") {
    InvertedIndex loaded = InvertedIndex::load("kwrankidx 1\r\nimg\tdoc\tw:1:1/2\r\n");
    CHECK(loaded.image_count() == 1);
    CHECK(loaded.images().at("img").find("w")->rank == Rational(1, 2));
}

TEST_CASE("index load rejects structural damage", "[index]") {
    using kwrank::FormatError;
    CHECK_THROWS_AS(InvertedIndex::load(""), FormatError);
    CHECK_THROWS_AS(InvertedIndex::load("kwrankidx 2\n"), FormatError);
    CHECK_THROWS_AS(InvertedIndex::load("bogus\nimg\tdoc\tw:1:1/2\n"), FormatError);
    CHECK_THROWS_AS(InvertedIndex::load("kwrankidx 1\nimg\tdoc\n"), FormatError);             // truncated
    CHECK_THROWS_AS(InvertedIndex::load("kwrankidx 1\n\nimg\tdoc\tw:1:1/2\n"), FormatError);  // blank record
    CHECK_THROWS_AS(InvertedIndex::load("kwrankidx 1\nimg\tdoc\tw:1\n"), FormatError);        // one colon
    CHECK_THROWS_AS(InvertedIndex::load("kwrankidx 1\nimg\tdoc\tw:1:1/2:x\n"), FormatError);  // three colons
    CHECK_THROWS_AS(InvertedIndex::load("kwrankidx 1\nimg\tdoc\tw:x:1/2\n"), FormatError);    // bad count
    CHECK_THROWS_AS(InvertedIndex::load("kwrankidx 1\nimg\tdoc\tw:1:soup\n"), FormatError);   // bad rank
}

TEST_CASE("save refuses unstorable identifiers", "[index]") {
    InvertedIndex index;
    index.add(AnnotatedImage{"img", "doc\twith\ttabs", {{"w", 1, Rational()}}});
    CHECK_THROWS_AS(index.save(), kwrank::FormatError);
}

TEST_CASE("query agrees with a linear scan on random indexes", "[index]") {
    std::mt19937_64 rng(31337);
    const std::vector<std::string> pool = {"ant", "bee", "cat", "dog", "elk"};
    for (int round = 0; round < 100; ++round) {
        InvertedIndex index;
        std::uniform_int_distribution<int> n_images(1, 10);
        std::uniform_int_distribution<int> n_annotations(1, (int)pool.size());
        std::uniform_int_distribution<long long> freq(0, 5);
        std::uniform_int_distribution<long long> rank_num(0, 7);
        for (int i = 0, n = n_images(rng); i < n; ++i) {
            AnnotatedImage image;
            image.image_id = "img" + std::to_string(i);
            image.owner_doc = "doc" + std::to_string(i % 3);
            std::vector<std::string> keywords = pool;
            std::shuffle(keywords.begin(), keywords.end(), rng);
            keywords.resize(n_annotations(rng));
            for (const auto& keyword : keywords)
                image.annotations.push_back({keyword, freq(rng), Rational(rank_num(rng), 8)});
            index.add(image);
        }
        index.audit_consistency();
        for (const auto& keyword : pool) {
            // reference result: scan every image, keep matches, sort the same way
            std::vector<AnnotatedImage> expected;
            for (const auto& [_, image] : index.images()) {
                if (image.find(keyword)) expected.push_back(image);
            }
            std::sort(expected.begin(), expected.end(),
                      [&](const AnnotatedImage& a, const AnnotatedImage& b) {
                          const Annotation* ka = a.find(keyword);
                          const Annotation* kb = b.find(keyword);
                          if (ka->frequency != kb->frequency) return ka->frequency > kb->frequency;
                          if (ka->rank != kb->rank) return ka->rank > kb->rank;
                          return a.image_id < b.image_id;
                      });
            CHECK(index.query(keyword) == expected);
        }
    }
}
