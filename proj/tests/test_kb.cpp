#include <catch2/catch_amalgamated.hpp>

#include "smartws/smartws.hpp"
#include "testutil.hpp"

using namespace smartws;
using testutil::Rng;

namespace {

const PrefixMap kRdfOnly{{"rdf", vocab::kRdf}};

GraphPattern fixture_parse(const std::string& text) {
    return parse_pattern(text, vocab::prefixes());
}

GraphPattern figure_precondition() {
    return fixture_parse(
        "?inputImage rdf:type sp:Category-3AHeadscan.\n"
        "?inputImage dc:format \"image/nrrd\".\n"
        "?brainAtlasImage rdf:type sp:Category-3ABrainAtlasImage.\n"
        "?brainAtlasImage dc:format \"image/mha\".\n"
        "?brainAtlasMask rdf:type sp:Category-3ABrainAtlasMask.\n"
        "?brainAtlasMask dc:format \"image/mha\".");
}

}  // namespace

TEST_CASE("document parsing: single statement with typed literal") {
    auto triples = parse_document("<http://x/a> <http://x/p> \"5\"^^integer .");
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].subject.value == "http://x/a");
    CHECK(triples[0].predicate.value == "http://x/p");
    REQUIRE(is_literal(triples[0].object));
    CHECK(as_literal(triples[0].object).lexical == "5");
    CHECK(as_literal(triples[0].object).datatype == Datatype::integer);
}

TEST_CASE("document parsing: @prefix declaration expands prefixed names") {
    auto triples = parse_document(
        "@prefix sp: <http://surgipedia.sfb25.de/wiki/Special:URIResolver/> .\n"
        "<http://x/scan1> rdf:type sp:Category-3AHeadscan .\n",
        kRdfOnly);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].predicate.value == "http://www.w3.org/1999/02/22-rdf-syntax-ns#type");
    REQUIRE(is_iri(triples[0].object));
    CHECK(as_iri(triples[0].object).value ==
          "http://surgipedia.sfb25.de/wiki/Special:URIResolver/Category-3AHeadscan");
}

TEST_CASE("document parsing: SPARQL-style PREFIX and attached statement dots") {
    auto triples = parse_document(
        "PREFIX sp: <http://surgipedia.sfb25.de/wiki/Special:URIResolver/>\n"
        "<http://x/scan1> rdf:type sp:Category-3AHeadscan.\n",
        kRdfOnly);
    REQUIRE(triples.size() == 1);
    CHECK(as_iri(triples[0].object).value ==
          "http://surgipedia.sfb25.de/wiki/Special:URIResolver/Category-3AHeadscan");
}

TEST_CASE("document parsing: empty and comment-only input") {
    CHECK(parse_document("").empty());
    CHECK(parse_document("  \n\t ").empty());
    CHECK(parse_document("# nothing here\n# at all\n").empty());
}

TEST_CASE("document parsing: duplicates are preserved in the list") {
    auto triples = parse_document(
        "<http://x/a> <http://x/p> <http://x/b> .\n"
        "<http://x/a> <http://x/p> <http://x/b> .\n");
    CHECK(triples.size() == 2);
}

TEST_CASE("document parsing: errors carry line and column") {
    SECTION("missing dot") {
        try {
            parse_document("<http://x/a> <http://x/p> <http://x/b>\n<http://x/c>");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
        }
    }
    SECTION("unknown prefix") {
        CHECK_THROWS_WITH(parse_document("nope:a <http://x/p> <http://x/b> ."),
                          Catch::Matchers::ContainsSubstring("unknown prefix"));
    }
    SECTION("malformed IRI: embedded space") {
        CHECK_THROWS_WITH(parse_document("<http://x/a b> <http://x/p> <http://x/b> ."),
                          Catch::Matchers::ContainsSubstring("malformed IRI"));
    }
    SECTION("malformed IRI: no scheme") {
        CHECK_THROWS_WITH(parse_document("<noschemehere> <http://x/p> <http://x/b> ."),
                          Catch::Matchers::ContainsSubstring("malformed IRI"));
    }
    SECTION("malformed literal") {
        CHECK_THROWS_WITH(parse_document("<http://x/a> <http://x/p> \"x1\"^^integer ."),
                          Catch::Matchers::ContainsSubstring("malformed integer literal"));
    }
    SECTION("unknown datatype") {
        CHECK_THROWS_WITH(parse_document("<http://x/a> <http://x/p> \"1\"^^float ."),
                          Catch::Matchers::ContainsSubstring("unknown datatype"));
    }
    SECTION("variables rejected in data documents") {
        CHECK_THROWS_WITH(parse_document("?s <http://x/p> <http://x/b> ."),
                          Catch::Matchers::ContainsSubstring("not allowed"));
    }
    SECTION("literal rejected in subject position") {
        CHECK_THROWS_WITH(parse_document("\"s\" <http://x/p> <http://x/b> ."),
                          Catch::Matchers::ContainsSubstring("subject position"));
    }
}

TEST_CASE("pattern parsing: variables in all positions, literals in object position") {
    auto p = parse_pattern("?s ?p ?o .\n?s <http://x/q> \"5\"^^integer .");
    REQUIRE(p.patterns.size() == 2);
    CHECK(p.vars() == std::set<std::string>{"s", "p", "o"});
    CHECK(std::holds_alternative<Literal>(p.patterns[1].object));
}

TEST_CASE("serialization: empty kb gives empty string") {
    KnowledgeBase kb;
    CHECK(serialize(kb).empty());
}

TEST_CASE("serialization: output is sorted regardless of insertion order") {
    KnowledgeBase kb;
    kb.insert(Triple{Iri{"http://x/b"}, Iri{"http://x/p"}, Iri{"http://x/o"}});
    kb.insert(Triple{Iri{"http://x/a"}, Iri{"http://x/p"}, Iri{"http://x/o"}});
    CHECK(serialize(kb) ==
          "<http://x/a> <http://x/p> <http://x/o> .\n"
          "<http://x/b> <http://x/p> <http://x/o> .\n");
}

TEST_CASE("serialization: escapes survive a round trip") {
    Triple t{Iri{"http://x/a"}, Iri{"http://x/p"},
             Literal{"line1\nline2\t\"quoted\" \\slash"}};
    KnowledgeBase kb;
    kb.insert(t);
    auto reparsed = parse_document(serialize(kb));
    REQUIRE(reparsed.size() == 1);
    CHECK(reparsed[0] == t);
}

TEST_CASE("round trip: parse(serialize(kb)) reproduces kb for random contents") {
    Rng rng(20260810);
    for (int iter = 0; iter < 150; ++iter) {
        auto pools = testutil::make_pools(rng, 6, 4, 8);
        KnowledgeBase kb;
        kb.insert(testutil::random_kb(rng, pools, 30));
        KnowledgeBase back;
        back.insert(parse_document(serialize(kb)));
        CHECK(serialize(back) == serialize(kb));
        CHECK(back.size() == kb.size());
    }
}

TEST_CASE("insert: set semantics") {
    KnowledgeBase kb;
    Triple t{Iri{"http://x/a"}, Iri{"http://x/p"}, Literal{"v"}};
    CHECK(kb.insert(t) == 1);
    CHECK(kb.insert(t) == 0);
    CHECK(kb.size() == 1);

    KnowledgeBase three;
    std::vector<Triple> batch{
        Triple{Iri{"http://x/a"}, Iri{"http://x/p"}, Literal{"1", Datatype::integer}},
        Triple{Iri{"http://x/b"}, Iri{"http://x/p"}, Literal{"2", Datatype::integer}},
        Triple{Iri{"http://x/c"}, Iri{"http://x/p"}, Literal{"3", Datatype::integer}},
    };
    CHECK(three.insert(batch) == 3);
    CHECK(three.size() == 3);
}

TEST_CASE("insert: random multiset ends up as the distinct set (naive dedup oracle)") {
    Rng rng(42);
    for (int iter = 0; iter < 100; ++iter) {
        auto pools = testutil::make_pools(rng);
        auto triples = testutil::random_kb(rng, pools, 40);
        // duplicate a few entries
        for (int i = 0; i < 5 && !triples.empty(); ++i)
            triples.push_back(triples[rng.below(static_cast<int>(triples.size()))]);

        KnowledgeBase kb;
        std::size_t added = kb.insert(triples);

        std::set<std::string> oracle;
        for (const auto& t : triples) oracle.insert(triple_line(t));
        CHECK(kb.size() == oracle.size());
        CHECK(added == oracle.size());
        std::set<std::string> got;
        for (const auto& t : kb.triples()) got.insert(triple_line(t));
        CHECK(got == oracle);
    }
}

TEST_CASE("matching: reference precondition finds the one conforming resource trio") {
    KnowledgeBase kb;
    kb.insert(testutil::seed_triples());
    auto bindings = kb.match(figure_precondition());
    REQUIRE(bindings.size() == 1);
    const auto& b = bindings[0];
    CHECK(as_iri(b.at("inputImage")).value == "http://smartws.example/data/headscan-001");
    CHECK(as_iri(b.at("brainAtlasImage")).value == "http://smartws.example/data/atlas-image-01");
    CHECK(as_iri(b.at("brainAtlasMask")).value == "http://smartws.example/data/atlas-mask-01");
}

TEST_CASE("matching: empty pattern matches once with the empty binding") {
    KnowledgeBase kb;
    kb.insert(testutil::seed_triples());
    auto bindings = kb.match(GraphPattern{});
    REQUIRE(bindings.size() == 1);
    CHECK(bindings[0].empty());

    KnowledgeBase empty;
    CHECK(empty.match(GraphPattern{}).size() == 1);
}

TEST_CASE("matching: unsatisfiable pattern yields nothing") {
    KnowledgeBase kb;
    kb.insert(parse_document("<http://x/a> <http://x/p> <http://x/b> .\n"));
    auto p = fixture_parse("?x rdf:type sp:Category-3AHeadscan.");
    CHECK(kb.match(p).empty());
}

TEST_CASE("matching: binding domain equals the pattern's variable set") {
    KnowledgeBase kb;
    kb.insert(parse_document(
        "<http://x/a> <http://x/p> <http://x/b> .\n"
        "<http://x/b> <http://x/p> <http://x/c> .\n"));
    auto p = parse_pattern("?s <http://x/p> ?o .");
    for (const auto& b : kb.match(p)) {
        REQUIRE(b.size() == 2);
        CHECK(b.count("s"));
        CHECK(b.count("o"));
        // every pattern triple instantiates to a kb member
        Triple t{as_iri(b.at("s")), Iri{"http://x/p"}, b.at("o")};
        CHECK(kb.contains(t));
    }
}

TEST_CASE("matching: repeated variable within one pattern forces equality") {
    KnowledgeBase kb;
    kb.insert(parse_document(
        "<http://x/a> <http://x/p> <http://x/a> .\n"
        "<http://x/a> <http://x/p> <http://x/b> .\n"));
    auto bindings = kb.match(parse_pattern("?x <http://x/p> ?x ."));
    REQUIRE(bindings.size() == 1);
    CHECK(as_iri(bindings[0].at("x")).value == "http://x/a");
}

TEST_CASE("matching: seed restricts solutions and ignores foreign variables") {
    KnowledgeBase kb;
    kb.insert(parse_document(
        "<http://x/a> <http://x/p> <http://x/1> .\n"
        "<http://x/b> <http://x/p> <http://x/2> .\n"));
    auto p = parse_pattern("?s <http://x/p> ?o .");
    Binding seed{{"s", Term{Iri{"http://x/a"}}}, {"unrelated", Term{Iri{"http://x/zz"}}}};
    auto bindings = kb.match(p, seed);
    REQUIRE(bindings.size() == 1);
    CHECK(as_iri(bindings[0].at("o")).value == "http://x/1");
    CHECK(bindings[0].count("unrelated") == 0);
}

TEST_CASE("matching: agreement with the exhaustive-assignment oracle") {
    Rng rng(7);
    for (int iter = 0; iter < 250; ++iter) {
        auto pools = testutil::make_pools(rng);
        auto triples = testutil::random_kb(rng, pools, 30);
        auto pattern = testutil::random_pattern(rng, pools);
        KnowledgeBase kb;
        kb.insert(triples);
        auto expected = testutil::oracle_match(pattern, kb.triples());
        auto got = kb.match(pattern);
        REQUIRE(got == expected);
    }
}

TEST_CASE("matching: monotone in the knowledge base") {
    Rng rng(99);
    for (int iter = 0; iter < 60; ++iter) {
        auto pools = testutil::make_pools(rng);
        auto triples = testutil::random_kb(rng, pools, 20);
        auto extra = testutil::random_kb(rng, pools, 10);
        auto pattern = testutil::random_pattern(rng, pools);

        KnowledgeBase small;
        small.insert(triples);
        KnowledgeBase larger;
        larger.insert(triples);
        larger.insert(extra);

        auto before = small.match(pattern);
        auto after = larger.match(pattern);
        std::set<std::string> after_keys;
        for (const auto& b : after) after_keys.insert(binding_text(b));
        for (const auto& b : before) CHECK(after_keys.count(binding_text(b)) == 1);
    }
}

TEST_CASE("matching: result order is canonical and repeatable") {
    Rng rng(5);
    auto pools = testutil::make_pools(rng, 6, 3, 6);
    auto triples = testutil::random_kb(rng, pools, 25);
    auto pattern = testutil::random_pattern(rng, pools, 3, 3);
    KnowledgeBase kb;
    kb.insert(triples);
    auto first = kb.match(pattern);
    for (int i = 0; i < 5; ++i) CHECK(kb.match(pattern) == first);
    for (std::size_t i = 1; i < first.size(); ++i)
        CHECK(binding_text(first[i - 1]) < binding_text(first[i]));
}

TEST_CASE("term validity rules") {
    CHECK(valid_iri("http://example.org/x"));
    CHECK(valid_iri("urn:smartws:var:x"));
    CHECK_FALSE(valid_iri(""));
    CHECK_FALSE(valid_iri("noscheme"));
    CHECK_FALSE(valid_iri(":leading"));
    CHECK_FALSE(valid_iri("1http://x"));
    CHECK_FALSE(valid_iri("http://x y"));
    CHECK_FALSE(valid_iri("http://x<y>"));

    CHECK(valid_variable_name("inputImage"));
    CHECK(valid_variable_name("_x9"));
    CHECK_FALSE(valid_variable_name(""));
    CHECK_FALSE(valid_variable_name("9lives"));
    CHECK_FALSE(valid_variable_name("a-b"));

    CHECK(lexical_valid("-42", Datatype::integer));
    CHECK_FALSE(lexical_valid("4.2", Datatype::integer));
    CHECK(lexical_valid("4.2", Datatype::decimal));
    CHECK(lexical_valid("-0.5", Datatype::decimal));
    CHECK_FALSE(lexical_valid("4", Datatype::decimal));
    CHECK_FALSE(lexical_valid("4.2.1", Datatype::decimal));
    CHECK(lexical_valid("true", Datatype::boolean));
    CHECK_FALSE(lexical_valid("True", Datatype::boolean));
}

TEST_CASE("sha256 reference vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}
