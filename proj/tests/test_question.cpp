#include <doctest.h>

#include <random>
#include <stdexcept>

#include "errors.hpp"
#include "oracles.hpp"
#include "question.hpp"

using namespace syntagraph;

namespace {

const char* kMinimalDoc =
    "1\tshow\tshow\tVERB\tVB\t_\t0\troot\t_\t_\n"
    "2\tdate\tdate\tNOUN\tNN\t_\t1\tobj\t_\t_\n";

}  // namespace

TEST_CASE("minimal two-token document yields a single obj edge") {
  const ParsedQuestion q = load_conllu(kMinimalDoc);
  REQUIRE(q.tokens.size() == 2);
  CHECK(q.tokens[0].surface == "show");
  CHECK(q.tokens[1].lemma == "date");
  CHECK(q.parse.root == 0);
  REQUIRE(q.parse.edges.size() == 1);
  CHECK(q.parse.edges[0] == DependencyEdge{0, 1, "obj"});
}

TEST_CASE("head beyond the sentence is a tree violation") {
  std::string doc;
  for (int i = 1; i <= 5; ++i) {
    const int head = (i == 1) ? 0 : (i == 4 ? 9 : 1);
    doc += std::to_string(i) + "\tw\tw\tX\tX\t_\t" + std::to_string(head) + "\tdep\t_\t_\n";
  }
  CHECK_THROWS_WITH_AS(load_conllu(doc), doctest::Contains("tree violation"), ValidationError);
}

TEST_CASE("cycles are tree violations") {
  const char* doc =
      "1\ta\ta\tX\tX\t_\t0\troot\t_\t_\n"
      "2\tb\tb\tX\tX\t_\t3\tdep\t_\t_\n"
      "3\tc\tc\tX\tX\t_\t2\tdep\t_\t_\n";
  CHECK_THROWS_WITH_AS(load_conllu(doc), doctest::Contains("tree violation"), ValidationError);
}

TEST_CASE("multiple roots and missing roots are tree violations") {
  const char* two_roots =
      "1\ta\ta\tX\tX\t_\t0\troot\t_\t_\n"
      "2\tb\tb\tX\tX\t_\t0\troot\t_\t_\n";
  CHECK_THROWS_WITH_AS(load_conllu(two_roots), doctest::Contains("multiple roots"),
                       ValidationError);
  const char* no_root =
      "1\ta\ta\tX\tX\t_\t2\tdep\t_\t_\n"
      "2\tb\tb\tX\tX\t_\t1\tdep\t_\t_\n";
  CHECK_THROWS_WITH_AS(load_conllu(no_root), doctest::Contains("no root"), ValidationError);
}

TEST_CASE("self-headed tokens are tree violations") {
  const char* doc =
      "1\ta\ta\tX\tX\t_\t0\troot\t_\t_\n"
      "2\tb\tb\tX\tX\t_\t2\tdep\t_\t_\n";
  CHECK_THROWS_WITH_AS(load_conllu(doc), doctest::Contains("heads itself"), ValidationError);
}

TEST_CASE("malformed lines are parse errors") {
  CHECK_THROWS_AS(load_conllu("1\tonly three\tcols\n"), ParseError);
  CHECK_THROWS_AS(load_conllu("1\ta\ta\tX\tX\t_\tNaN\tdep\t_\t_\n"), ParseError);
  CHECK_THROWS_AS(load_conllu("1-2\tab\tab\tX\tX\t_\t0\troot\t_\t_\n"), ParseError);
  CHECK_THROWS_AS(load_conllu("2\ta\ta\tX\tX\t_\t0\troot\t_\t_\n"), ParseError);
  CHECK_THROWS_AS(load_conllu("1\ta\ta\tX\tX\t_\t0\t_\t_\t_\n"), ParseError);
  CHECK_THROWS_AS(load_conllu(""), ParseError);
  CHECK_THROWS_AS(load_conllu("# comment only\n\n"), ParseError);
}

TEST_CASE("a second sentence is rejected") {
  std::string doc(kMinimalDoc);
  doc += "\n1\tmore\tmore\tX\tX\t_\t0\troot\t_\t_\n";
  CHECK_THROWS_WITH_AS(load_conllu(doc), doctest::Contains("second sentence"), ParseError);
}

TEST_CASE("lemma defaults to the lowercased form and is always lowercased") {
  const char* doc =
      "1\tShow\t_\tVERB\tVB\t_\t0\troot\t_\t_\n"
      "2\tDates\tDate\tNOUN\tNN\t_\t1\tobj\t_\t_\n";
  const ParsedQuestion q = load_conllu(doc);
  CHECK(q.tokens[0].lemma == "show");
  CHECK(q.tokens[1].lemma == "date");
  CHECK(q.tokens[1].surface == "Dates");
}

TEST_CASE("the case-study parse carries the show/list/date/id edges") {
  const ParsedQuestion q = load_conllu(oracle::read_fixture("transcripts.conllu"));
  REQUIRE(q.tokens.size() == 19);
  const int show = 0, date = 2, list = 15, id = 17;
  CHECK(q.tokens[show].lemma == "show");
  CHECK(q.tokens[date].lemma == "date");
  CHECK(q.tokens[list].lemma == "list");
  CHECK(q.tokens[id].lemma == "id");
  CHECK(first_order_distance(q.parse, show, list) == 1);
  CHECK(first_order_distance(q.parse, show, date) == 1);
  CHECK(first_order_distance(q.parse, list, id) == 1);
}

TEST_CASE("first_order_distance is directed and first-order only") {
  // chain 0 -> 1 -> 2
  const char* doc =
      "1\ta\ta\tX\tX\t_\t0\troot\t_\t_\n"
      "2\tb\tb\tX\tX\t_\t1\tdep\t_\t_\n"
      "3\tc\tc\tX\tX\t_\t2\tdep\t_\t_\n";
  const ParsedQuestion q = load_conllu(doc);
  CHECK(first_order_distance(q.parse, 0, 1) == 1);
  CHECK(first_order_distance(q.parse, 1, 0) == 0);
  CHECK(first_order_distance(q.parse, 0, 2) == 0);  // grandparent is not first-order
  CHECK(first_order_distance(q.parse, 1, 1) == 0);
  CHECK_THROWS_AS(first_order_distance(q.parse, 0, 3), std::out_of_range);
  CHECK_THROWS_AS(first_order_distance(q.parse, -1, 0), std::out_of_range);
}

TEST_CASE("syntax_relation covers all three cases and rejects the diagonal") {
  const char* doc =
      "1\tshow\tshow\tX\tX\t_\t0\troot\t_\t_\n"
      "2\tdate\tdate\tX\tX\t_\t1\tobj\t_\t_\n"
      "3\tnow\tnow\tX\tX\t_\t1\tadvmod\t_\t_\n";
  const ParsedQuestion q = load_conllu(doc);
  CHECK(syntax_relation(q.parse, 0, 1) == SyntaxRelation::Forward);
  CHECK(syntax_relation(q.parse, 1, 0) == SyntaxRelation::Backward);
  CHECK(syntax_relation(q.parse, 1, 2) == SyntaxRelation::NoneSyntax);
  CHECK_THROWS_AS(syntax_relation(q.parse, 1, 1), std::invalid_argument);
}

TEST_CASE("question relation matrix on singleton and chain") {
  DependencyParse singleton;
  singleton.token_count = 1;
  singleton.root = 0;
  const auto m1 = question_relation_matrix(singleton);
  CHECK(m1.rows() == 1);
  CHECK(m1.at(0, 0) == SyntaxRelation::SelfSyntax);

  const ParsedQuestion q = load_conllu(kMinimalDoc);
  const auto m2 = question_relation_matrix(q.parse);
  CHECK(m2.at(0, 1) == SyntaxRelation::Forward);
  CHECK(m2.at(1, 0) == SyntaxRelation::Backward);
  CHECK(m2.at(0, 0) == SyntaxRelation::SelfSyntax);
  CHECK(m2.at(1, 1) == SyntaxRelation::SelfSyntax);
}

TEST_CASE("random trees: counts, duality and trichotomy") {
  DetRng rng(7);
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 2 + rng.uniform_int(14);
    const DependencyParse parse = oracle::random_tree(rng, n);
    const auto matrix = question_relation_matrix(parse);

    // Independent oracle: enumerate the edge list directly.
    const int expected_edges = static_cast<int>(parse.edges.size());
    REQUIRE(expected_edges == n - 1);

    int forward = 0, backward = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) {
          CHECK(matrix.at(i, j) == SyntaxRelation::SelfSyntax);
          continue;
        }
        const SyntaxRelation rel = matrix.at(i, j);
        CHECK((rel == SyntaxRelation::Forward || rel == SyntaxRelation::Backward ||
               rel == SyntaxRelation::NoneSyntax));
        if (rel == SyntaxRelation::Forward) ++forward;
        if (rel == SyntaxRelation::Backward) ++backward;
        // Duality.
        if (rel == SyntaxRelation::Forward) CHECK(matrix.at(j, i) == SyntaxRelation::Backward);
        if (rel == SyntaxRelation::NoneSyntax) CHECK(matrix.at(j, i) == SyntaxRelation::NoneSyntax);
      }
    }
    CHECK(forward == expected_edges);
    CHECK(backward == expected_edges);
  }
}

TEST_CASE("permuting raw dependency labels never changes the matrix") {
  DetRng rng(13);
  for (int iter = 0; iter < 25; ++iter) {
    const int n = 2 + rng.uniform_int(10);
    DependencyParse parse = oracle::random_tree(rng, n);
    const auto before = question_relation_matrix(parse);
    // Relabel every edge with an arbitrary other string.
    for (auto& edge : parse.edges) edge.label = "relabel-" + std::to_string(rng.uniform_int(55));
    const auto after = question_relation_matrix(parse);
    CHECK(before == after);
  }
}
