#include <doctest.h>

#include <json.hpp>

#include "errors.hpp"
#include "graph.hpp"
#include "oracles.hpp"

using namespace syntagraph;

namespace {

std::vector<QuestionToken> tokens_of(const std::vector<std::string>& words) {
  std::vector<QuestionToken> tokens;
  for (size_t i = 0; i < words.size(); ++i)
    tokens.push_back({static_cast<int>(i), words[i], ascii_lower(words[i])});
  return tokens;
}

DependencyParse chain_parse(int n) {
  DependencyParse parse;
  parse.token_count = n;
  parse.root = 0;
  for (int i = 1; i < n; ++i) parse.edges.push_back({i - 1, i, "dep"});
  return parse;
}

Schema tiny_schema() {
  return load_schema(R"({
    "db_id": "tiny",
    "table_names": ["t1"],
    "column_names": [[0, "c1"]],
    "column_types": ["text"]
  })");
}

}  // namespace

TEST_CASE("flattening follows the [CLS] q [SEP] marker/table marker/column [SEP] order") {
  const auto flattened = flatten_input(tokens_of({"q1", "q2"}), tiny_schema());
  std::vector<std::pair<ItemKind, std::string>> expected = {
      {ItemKind::Cls, "[CLS]"},           {ItemKind::QuestionToken, "q1"},
      {ItemKind::QuestionToken, "q2"},    {ItemKind::Sep, "[SEP]"},
      {ItemKind::TableMarker, "[table]"}, {ItemKind::TableToken, "t1"},
      {ItemKind::ColumnMarker, "[text]"}, {ItemKind::ColumnToken, "c1"},
      {ItemKind::Sep, "[SEP]"}};
  REQUIRE(flattened.items.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(flattened.items[i].kind == expected[i].first);
    CHECK(flattened.items[i].text == expected[i].second);
  }
  REQUIRE(flattened.node_spans.size() == 4);  // q1 q2 t1 c1
  CHECK(flattened.node_spans[0] == ItemSpan{1, 1});
  CHECK(flattened.node_spans[1] == ItemSpan{2, 1});
  CHECK(flattened.node_spans[2] == ItemSpan{5, 1});
  CHECK(flattened.node_spans[3] == ItemSpan{7, 1});
}

TEST_CASE("empty questions cannot be flattened") {
  CHECK_THROWS_AS(flatten_input({}, tiny_schema()), ValidationError);
}

TEST_CASE("spans are disjoint, in bounds and kind-consistent on random inputs") {
  DetRng rng(101);
  for (int iter = 0; iter < 40; ++iter) {
    const auto instance = oracle::random_instance(rng);
    const auto flattened = flatten_input(instance.tokens, instance.schema);
    const auto& spans = flattened.node_spans;
    // Brute-force pairwise overlap oracle.
    for (size_t a = 0; a < spans.size(); ++a) {
      CHECK(spans[a].count >= 1);
      CHECK(spans[a].begin + spans[a].count <= static_cast<int>(flattened.items.size()));
      for (size_t b = a + 1; b < spans.size(); ++b) {
        const bool overlap = spans[a].begin < spans[b].begin + spans[b].count &&
                             spans[b].begin < spans[a].begin + spans[a].count;
        CHECK_FALSE(overlap);
      }
    }
    // Spans cover content tokens only, never markers or separators.
    for (const ItemSpan& span : spans) {
      for (int k = 0; k < span.count; ++k) {
        const ItemKind kind = flattened.items[span.begin + k].kind;
        CHECK((kind == ItemKind::QuestionToken || kind == ItemKind::TableToken ||
               kind == ItemKind::ColumnToken));
      }
    }
  }
}

TEST_CASE("exact linking marks tokens inside a full-name occurrence") {
  const Schema schema = load_schema(R"({
    "db_id": "x",
    "table_names": ["north america region"],
    "column_names": [[0, "name"]],
    "column_types": ["text"]
  })");

  SUBCASE("single-lemma column name") {
    const auto links = link_relations(tokens_of({"list", "the", "name"}), schema);
    CHECK(links.to_columns.at(2, 0) == LinkLabel::Exact);
    CHECK(links.to_columns.at(0, 0) == LinkLabel::None);
  }
  SUBCASE("partial when the full span is absent") {
    const auto links = link_relations(tokens_of({"north", "of", "here"}), schema);
    CHECK(links.to_tables.at(0, 0) == LinkLabel::Partial);
    CHECK(links.to_tables.at(1, 0) == LinkLabel::None);
  }
  SUBCASE("full three-token span goes exact for every covered token") {
    const auto links =
        link_relations(tokens_of({"in", "north", "america", "region", "now"}), schema);
    CHECK(links.to_tables.at(1, 0) == LinkLabel::Exact);
    CHECK(links.to_tables.at(2, 0) == LinkLabel::Exact);
    CHECK(links.to_tables.at(3, 0) == LinkLabel::Exact);
    CHECK(links.to_tables.at(0, 0) == LinkLabel::None);
    CHECK(links.to_tables.at(4, 0) == LinkLabel::None);
  }
}

TEST_CASE("value linking matches whole cells case-insensitively") {
  const Schema schema = load_schema(R"({
    "db_id": "world",
    "table_names": ["country"],
    "column_names": [[0, "continent"], [0, "surface area"]],
    "column_types": ["text", "number"],
    "cell_values": [["North America", "USA"], ["3000"]]
  })");

  const auto links =
      link_relations(tokens_of({"America", "3000", "usa", "continent", "whatever"}), schema);
  // Single token never matches the two-word cell "North America".
  CHECK(links.to_columns.at(0, 0) == LinkLabel::None);
  // Numeric token matches the single-token cell exactly.
  CHECK(links.to_columns.at(1, 1) == LinkLabel::Value);
  // Case-insensitive whole-cell match.
  CHECK(links.to_columns.at(2, 0) == LinkLabel::Value);
  // Name match outranks any cell match; a single-lemma name matches in full.
  CHECK(links.to_columns.at(3, 0) == LinkLabel::Exact);
  CHECK(links.to_columns.at(4, 0) == LinkLabel::None);
  CHECK(links.to_tables.at(1, 0) == LinkLabel::None);
}

TEST_CASE("exact beats partial beats value") {
  const Schema schema = load_schema(R"({
    "db_id": "x",
    "table_names": ["t"],
    "column_names": [[0, "name"]],
    "column_types": ["text"],
    "cell_values": [["name"]]
  })");
  // The token matches the column name exactly (full single-lemma sequence),
  // even though it would also match as a cell value.
  const auto links = link_relations(tokens_of({"name"}), schema);
  CHECK(links.to_columns.at(0, 0) == LinkLabel::Exact);
}

TEST_CASE("smallest graph: one token, one table, no columns") {
  // Loaders reject column-less tables, but the assembler handles the value
  // when constructed directly.
  Schema schema;
  schema.db_id = "degenerate";
  Table table;
  table.id = 0;
  table.name_tokens = {"ship"};
  table.lemmas = {"ship"};
  schema.tables.push_back(table);

  const auto graph = build_graph(tokens_of({"hello"}), chain_parse(1), schema);
  REQUIRE(graph.node_count() == 2);
  CHECK(graph.relations.at(0, 0) == RelationLabel::Self);
  CHECK(graph.relations.at(1, 1) == RelationLabel::Self);
  CHECK(graph.relations.at(0, 1) == RelationLabel::QTNoneLinking);
  CHECK(graph.relations.at(1, 0) == RelationLabel::QTNoneLinkingInv);
}

TEST_CASE("case-study graph carries syntax, linking and schema structure") {
  const ParsedQuestion q = load_conllu(oracle::read_fixture("transcripts.conllu"));
  const Schema schema = load_schema(oracle::read_fixture("transcripts.tables.json"));
  const auto graph = build_graph(q.tokens, q.parse, schema);

  // 19 question tokens, 2 tables, 5 columns.
  REQUIRE(graph.node_count() == 26);
  const int show = 0, date = 2, transcript = 5, list = 15, id = 17;
  const int table0 = 19, table1 = 20;
  const int col_id0 = 21, col_date = 22, col_id1 = 23, col_tid = 24;

  CHECK(graph.relations.at(show, list) == RelationLabel::ForwardSyntax);
  CHECK(graph.relations.at(show, date) == RelationLabel::ForwardSyntax);
  CHECK(graph.relations.at(list, id) == RelationLabel::ForwardSyntax);
  CHECK(graph.relations.at(list, show) == RelationLabel::BackwardSyntax);
  CHECK(graph.relations.at(date, id) == RelationLabel::NoneSyntax);

  CHECK(graph.relations.at(date, col_date) == RelationLabel::QCExactLinking);
  CHECK(graph.relations.at(id, col_id0) == RelationLabel::QCExactLinking);
  CHECK(graph.relations.at(id, col_id1) == RelationLabel::QCExactLinking);
  CHECK(graph.relations.at(col_date, date) == RelationLabel::QCExactLinkingInv);
  CHECK(graph.relations.at(transcript, table0) == RelationLabel::QTExactLinking);
  CHECK(graph.relations.at(id, col_tid) == RelationLabel::QCPartialLinking);

  CHECK(graph.relations.at(table0, col_id0) == RelationLabel::PrimaryKey);
  CHECK(graph.relations.at(table0, col_date) == RelationLabel::Has);
  CHECK(graph.relations.at(col_date, table0) == RelationLabel::HasInv);
  CHECK(graph.relations.at(col_tid, col_id0) == RelationLabel::ForeignKey);
  CHECK(graph.relations.at(col_id0, col_tid) == RelationLabel::ForeignKeyInv);
  CHECK(graph.relations.at(table0, table1) == RelationLabel::DefaultTableTable);
  CHECK(graph.relations.at(table1, col_id0) == RelationLabel::DefaultTableColumn);
  CHECK(graph.relations.at(col_id0, col_date) == RelationLabel::DefaultColumnColumn);
}

TEST_CASE("ship ordering question: conj and nmod edges plus name/tonnage links") {
  const char* conllu =
      "1\tList\tlist\tVERB\tVB\t_\t0\troot\t_\t_\n"
      "2\tthe\tthe\tDET\tDT\t_\t3\tdet\t_\t_\n"
      "3\tname\tname\tNOUN\tNN\t_\t1\tobj\t_\t_\n"
      "4\tand\tand\tCCONJ\tCC\t_\t5\tcc\t_\t_\n"
      "5\ttonnage\ttonnage\tNOUN\tNN\t_\t3\tconj\t_\t_\n"
      "6\tin\tin\tADP\tIN\t_\t9\tcase\t_\t_\n"
      "7\talphabetical\talphabetical\tADJ\tJJ\t_\t9\tamod\t_\t_\n"
      "8\tdescending\tdescending\tADJ\tJJ\t_\t9\tamod\t_\t_\n"
      "9\torder\torder\tNOUN\tNN\t_\t1\tobl\t_\t_\n"
      "10\tfor\tfor\tADP\tIN\t_\t12\tcase\t_\t_\n"
      "11\tthe\tthe\tDET\tDT\t_\t12\tdet\t_\t_\n"
      "12\tnames\tname\tNOUN\tNNS\t_\t9\tnmod\t_\t_\n"
      "13\t.\t.\tPUNCT\t.\t_\t1\tpunct\t_\t_\n";
  const ParsedQuestion q = load_conllu(conllu);
  const Schema schema = load_schema(oracle::read_fixture("ship.tables.json"));
  const auto graph = build_graph(q.tokens, q.parse, schema);

  REQUIRE(graph.node_count() == 16);  // 13 tokens, 1 table, 2 columns
  const int name = 2, tonnage = 4, order = 8, names = 11;
  const int table_ship = 13, col_name = 14, col_tonnage = 15;
  CHECK(graph.relations.at(name, tonnage) == RelationLabel::ForwardSyntax);
  CHECK(graph.relations.at(order, names) == RelationLabel::ForwardSyntax);
  CHECK(graph.relations.at(name, col_name) == RelationLabel::QCExactLinking);
  CHECK(graph.relations.at(names, col_name) == RelationLabel::QCExactLinking);
  CHECK(graph.relations.at(tonnage, col_tonnage) == RelationLabel::QCExactLinking);
  CHECK(graph.relations.at(name, table_ship) == RelationLabel::QTNoneLinking);
}

TEST_CASE("token/parse disagreement is a validation error") {
  CHECK_THROWS_AS(build_graph(tokens_of({"a", "b"}), chain_parse(3), tiny_schema()),
                  ValidationError);
}

TEST_CASE("random graphs: totality, block purity, inverse closure, syntax counts") {
  DetRng rng(202);
  for (int iter = 0; iter < 40; ++iter) {
    const auto instance = oracle::random_instance(rng);
    const auto graph = build_graph(instance.tokens, instance.parse, instance.schema);
    const int n = graph.node_count();
    int forward = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const RelationLabel label = graph.relations.at(i, j);
        CHECK(label_allowed_in_block(label, graph.nodes[i].kind, graph.nodes[j].kind, i == j));
        CHECK(graph.relations.at(j, i) == inverse_label(label));
        if (label == RelationLabel::ForwardSyntax) ++forward;
      }
    }
    CHECK(forward == static_cast<int>(instance.tokens.size()) - 1);
  }
}

TEST_CASE("columns interleaved across tables keep grouped node order") {
  // Column ids 0 and 2 belong to table 0, id 1 to table 1; flattening groups
  // them by owner, so node order differs from global id order.
  const Schema schema = load_schema(R"({
    "db_id": "x",
    "table_names": ["alpha", "beta"],
    "column_names": [[0, "a"], [1, "b"], [0, "c"]],
    "column_types": ["text", "text", "text"],
    "primary_keys": [1],
    "foreign_keys": [[2, 1]]
  })");
  CHECK(schema.tables[0].column_ids == std::vector<int>{0, 2});
  CHECK(schema.tables[1].column_ids == std::vector<int>{1});

  const auto graph = build_graph(tokens_of({"hi"}), chain_parse(1), schema);
  REQUIRE(graph.node_count() == 6);
  CHECK(graph.nodes[3] == NodeRef{NodeKind::Column, 0});
  CHECK(graph.nodes[4] == NodeRef{NodeKind::Column, 2});
  CHECK(graph.nodes[5] == NodeRef{NodeKind::Column, 1});

  const int t0 = 1, t1 = 2, c0 = 3, c2 = 4, c1 = 5;
  CHECK(graph.relations.at(t0, c0) == RelationLabel::Has);
  CHECK(graph.relations.at(t0, c2) == RelationLabel::Has);
  CHECK(graph.relations.at(t1, c1) == RelationLabel::PrimaryKey);
  CHECK(graph.relations.at(t1, c0) == RelationLabel::DefaultTableColumn);
  CHECK(graph.relations.at(c2, c1) == RelationLabel::ForeignKey);
  CHECK(graph.relations.at(c1, c2) == RelationLabel::ForeignKeyInv);

  // Round-trip preserves the interleaved ordering.
  CHECK(import_graph(export_graph(graph)) == graph);
}

TEST_CASE("export/import round-trips and is byte-deterministic") {
  const ParsedQuestion q = load_conllu(oracle::read_fixture("transcripts.conllu"));
  const Schema schema = load_schema(oracle::read_fixture("transcripts.tables.json"));
  const auto graph = build_graph(q.tokens, q.parse, schema);

  const std::string once = export_graph(graph);
  const std::string twice = export_graph(graph);
  CHECK(once == twice);

  const InteractionGraph back = import_graph(once);
  CHECK(back == graph);
  CHECK(export_graph(back) == once);
}

TEST_CASE("exported matrix has exactly n^2 label cells (document walker)") {
  const ParsedQuestion q = load_conllu(oracle::read_fixture("transcripts.conllu"));
  const Schema schema = load_schema(oracle::read_fixture("transcripts.tables.json"));
  const auto graph = build_graph(q.tokens, q.parse, schema);
  const std::string doc = export_graph(graph);

  // Independent walker over the serialized document.
  const auto parsed = nlohmann::json::parse(doc);
  const size_t n = parsed.at("nodes").size();
  size_t cells = 0;
  for (const auto& row : parsed.at("relations"))
    for (const auto& cell : row) {
      CHECK(cell.is_string());
      ++cells;
    }
  CHECK(cells == n * n);
  CHECK(parsed.at("format_version").get<int>() == 1);
}

TEST_CASE("manifests are embedded verbatim and ignored by import") {
  const auto graph = build_graph(tokens_of({"name"}), chain_parse(1), tiny_schema());
  const nlohmann::json manifest = {{"command", "build-graph"}, {"seed", 7}};
  const std::string doc = export_graph(graph, &manifest);
  const auto parsed = nlohmann::json::parse(doc);
  CHECK(parsed.at("manifest").at("command") == "build-graph");
  CHECK(import_graph(doc) == graph);
}

TEST_CASE("tampered documents fail loud") {
  const auto graph = build_graph(tokens_of({"name"}), chain_parse(1), tiny_schema());
  const std::string doc = export_graph(graph);

  SUBCASE("unknown label") {
    auto j = nlohmann::json::parse(doc);
    j["relations"][0][1] = "Sideways-Linking";
    CHECK_THROWS_AS(import_graph(j.dump()), ParseError);
  }
  SUBCASE("label outside its block") {
    auto j = nlohmann::json::parse(doc);
    j["relations"][0][1] = "Foreign-Key";  // question x table cell
    CHECK_THROWS_AS(import_graph(j.dump()), ValidationError);
  }
  SUBCASE("non-Self diagonal") {
    auto j = nlohmann::json::parse(doc);
    j["relations"][0][0] = "None-Syntax";
    CHECK_THROWS_AS(import_graph(j.dump()), ValidationError);
  }
  SUBCASE("ragged matrix") {
    auto j = nlohmann::json::parse(doc);
    j["relations"][0].erase(0);
    CHECK_THROWS_AS(import_graph(j.dump()), ValidationError);
  }
  SUBCASE("span out of bounds") {
    auto j = nlohmann::json::parse(doc);
    j["spans"][0][0] = 99;
    CHECK_THROWS_AS(import_graph(j.dump()), ValidationError);
  }
  SUBCASE("nodes out of order") {
    auto j = nlohmann::json::parse(doc);
    std::swap(j["nodes"][0], j["nodes"][1]);  // table before question
    CHECK_THROWS_AS(import_graph(j.dump()), ValidationError);
  }
  SUBCASE("duplicate column index") {
    const Schema two_columns = load_schema(R"({
      "db_id": "x",
      "table_names": ["t"],
      "column_names": [[0, "a"], [0, "b"]],
      "column_types": ["text", "text"]
    })");
    const auto wide = build_graph(tokens_of({"name"}), chain_parse(1), two_columns);
    auto j = nlohmann::json::parse(export_graph(wide));
    j["nodes"][3]["index"] = 0;  // clashes with the first column node
    CHECK_THROWS_AS(import_graph(j.dump()), ValidationError);
  }
  SUBCASE("not JSON at all") { CHECK_THROWS_AS(import_graph("馬鹿げた入力"), ParseError); }
}

TEST_CASE("relation label vocabulary is closed and involutive") {
  CHECK(kRelationLabelCount == 28);
  for (int i = 0; i < kRelationLabelCount; ++i) {
    const auto label = static_cast<RelationLabel>(i);
    CHECK(relation_from_name(relation_name(label)) == label);
    CHECK(inverse_label(inverse_label(label)) == label);
  }
  CHECK_THROWS_AS(relation_from_name("No-Such-Label"), ParseError);
}
