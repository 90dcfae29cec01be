#include "graph.hpp"

#include <algorithm>
#include <string>

#include "errors.hpp"

namespace syntagraph {

using nlohmann::json;

std::string_view item_kind_name(ItemKind kind) {
  switch (kind) {
    case ItemKind::Cls: return "cls";
    case ItemKind::Sep: return "sep";
    case ItemKind::TableMarker: return "table-marker";
    case ItemKind::ColumnMarker: return "column-marker";
    case ItemKind::QuestionToken: return "question";
    case ItemKind::TableToken: return "table";
    case ItemKind::ColumnToken: return "column";
  }
  return "";
}

ItemKind item_kind_from_name(std::string_view name) {
  if (name == "cls") return ItemKind::Cls;
  if (name == "sep") return ItemKind::Sep;
  if (name == "table-marker") return ItemKind::TableMarker;
  if (name == "column-marker") return ItemKind::ColumnMarker;
  if (name == "question") return ItemKind::QuestionToken;
  if (name == "table") return ItemKind::TableToken;
  if (name == "column") return ItemKind::ColumnToken;
  throw ParseError("unknown sequence item kind '" + std::string(name) + "'");
}

namespace {

// Node order shared by flattening and assembly: question tokens, then tables
// by id, then columns grouped by owning table.
std::vector<NodeRef> node_order(int question_count, const Schema& schema) {
  std::vector<NodeRef> nodes;
  for (int i = 0; i < question_count; ++i) nodes.push_back({NodeKind::Question, i});
  for (const Table& table : schema.tables) nodes.push_back({NodeKind::Table, table.id});
  for (const Table& table : schema.tables)
    for (int cid : table.column_ids) nodes.push_back({NodeKind::Column, cid});
  return nodes;
}

}  // namespace

FlattenedSequence flatten_input(const std::vector<QuestionToken>& tokens, const Schema& schema) {
  if (tokens.empty()) throw ValidationError("cannot flatten an empty question");

  FlattenedSequence seq;
  auto push = [&seq](ItemKind kind, std::string text) {
    seq.items.push_back({kind, std::move(text)});
  };

  push(ItemKind::Cls, "[CLS]");
  std::vector<ItemSpan> question_spans;
  for (const QuestionToken& token : tokens) {
    question_spans.push_back({static_cast<int>(seq.items.size()), 1});
    push(ItemKind::QuestionToken, token.surface);
  }
  push(ItemKind::Sep, "[SEP]");

  std::vector<ItemSpan> table_spans;
  std::vector<ItemSpan> column_spans;
  for (const Table& table : schema.tables) {
    push(ItemKind::TableMarker, "[table]");
    table_spans.push_back(
        {static_cast<int>(seq.items.size()), static_cast<int>(table.name_tokens.size())});
    for (const std::string& tok : table.name_tokens) push(ItemKind::TableToken, tok);
    for (int cid : table.column_ids) {
      const Column& column = schema.columns[cid];
      push(ItemKind::ColumnMarker,
           "[" + std::string(column_type_name(column.data_type)) + "]");
      column_spans.push_back(
          {static_cast<int>(seq.items.size()), static_cast<int>(column.name_tokens.size())});
      for (const std::string& tok : column.name_tokens) push(ItemKind::ColumnToken, tok);
    }
  }
  push(ItemKind::Sep, "[SEP]");

  seq.node_spans = std::move(question_spans);
  seq.node_spans.insert(seq.node_spans.end(), table_spans.begin(), table_spans.end());
  seq.node_spans.insert(seq.node_spans.end(), column_spans.begin(), column_spans.end());
  return seq;
}

namespace {

// Marks every token inside an occurrence of the item's full lemma sequence.
void mark_exact_hits(const std::vector<std::string>& question_lemmas,
                     const std::vector<std::string>& item_lemmas, std::vector<char>& hit) {
  const size_t n = question_lemmas.size();
  const size_t m = item_lemmas.size();
  if (m == 0 || m > n) return;
  for (size_t start = 0; start + m <= n; ++start) {
    if (std::equal(item_lemmas.begin(), item_lemmas.end(), question_lemmas.begin() + start)) {
      for (size_t k = start; k < start + m; ++k) hit[k] = 1;
    }
  }
}

bool lemma_member(const std::string& lemma, const std::vector<std::string>& item_lemmas) {
  return std::find(item_lemmas.begin(), item_lemmas.end(), lemma) != item_lemmas.end();
}

}  // namespace

LinkingResult link_relations(const std::vector<QuestionToken>& tokens, const Schema& schema) {
  const int nq = static_cast<int>(tokens.size());
  LinkingResult result;
  result.to_tables = Dense<LinkLabel>(nq, static_cast<int>(schema.tables.size()), LinkLabel::None);
  result.to_columns =
      Dense<LinkLabel>(nq, static_cast<int>(schema.columns.size()), LinkLabel::None);

  std::vector<std::string> question_lemmas;
  question_lemmas.reserve(tokens.size());
  for (const QuestionToken& token : tokens) question_lemmas.push_back(token.lemma);

  for (const Table& table : schema.tables) {
    std::vector<char> exact(nq, 0);
    mark_exact_hits(question_lemmas, table.lemmas, exact);
    for (int i = 0; i < nq; ++i) {
      if (exact[i])
        result.to_tables.at(i, table.id) = LinkLabel::Exact;
      else if (lemma_member(question_lemmas[i], table.lemmas))
        result.to_tables.at(i, table.id) = LinkLabel::Partial;
    }
  }

  for (const Column& column : schema.columns) {
    std::vector<char> exact(nq, 0);
    mark_exact_hits(question_lemmas, column.lemmas, exact);
    std::vector<std::string> cells_lower;
    cells_lower.reserve(column.cell_values.size());
    for (const std::string& cell : column.cell_values) cells_lower.push_back(ascii_lower(cell));

    for (int i = 0; i < nq; ++i) {
      LinkLabel label = LinkLabel::None;
      if (exact[i]) {
        label = LinkLabel::Exact;
      } else if (lemma_member(question_lemmas[i], column.lemmas)) {
        label = LinkLabel::Partial;
      } else if (!cells_lower.empty()) {
        // Whole-cell equality only: single tokens against single cell
        // strings, case-insensitive, no n-gram cell matching.
        const std::string surface_lower = ascii_lower(tokens[i].surface);
        for (const std::string& cell : cells_lower) {
          if (cell == question_lemmas[i] || cell == surface_lower) {
            label = LinkLabel::Value;
            break;
          }
        }
      }
      result.to_columns.at(i, column.id) = label;
    }
  }
  return result;
}

namespace {

RelationLabel qt_label(LinkLabel link) {
  switch (link) {
    case LinkLabel::None: return RelationLabel::QTNoneLinking;
    case LinkLabel::Partial: return RelationLabel::QTPartialLinking;
    case LinkLabel::Exact: return RelationLabel::QTExactLinking;
    case LinkLabel::Value: break;
  }
  throw ValidationError("value linking is not defined for tables");
}

RelationLabel qc_label(LinkLabel link) {
  switch (link) {
    case LinkLabel::None: return RelationLabel::QCNoneLinking;
    case LinkLabel::Partial: return RelationLabel::QCPartialLinking;
    case LinkLabel::Exact: return RelationLabel::QCExactLinking;
    case LinkLabel::Value: return RelationLabel::QCValueLinking;
  }
  throw ValidationError("invalid link label");
}

RelationLabel syntax_label(SyntaxRelation rel) {
  switch (rel) {
    case SyntaxRelation::Forward: return RelationLabel::ForwardSyntax;
    case SyntaxRelation::Backward: return RelationLabel::BackwardSyntax;
    case SyntaxRelation::NoneSyntax: return RelationLabel::NoneSyntax;
    case SyntaxRelation::SelfSyntax: return RelationLabel::Self;
  }
  throw ValidationError("invalid syntax relation");
}

}  // namespace

InteractionGraph build_graph(const std::vector<QuestionToken>& tokens,
                             const DependencyParse& parse, const Schema& schema) {
  const int nq = static_cast<int>(tokens.size());
  if (nq != parse.token_count)
    throw ValidationError("question has " + std::to_string(nq) + " tokens but the parse covers " +
                          std::to_string(parse.token_count));

  InteractionGraph graph;
  graph.nodes = node_order(nq, schema);
  graph.flattened = flatten_input(tokens, schema);

  const int nt = static_cast<int>(schema.tables.size());
  const int n = graph.node_count();

  // Matrix positions: question tokens at their index, tables at nq + id,
  // columns at their grouped flattening position.
  std::vector<int> column_pos(schema.columns.size(), -1);
  {
    int next = nq + nt;
    for (const Table& table : schema.tables)
      for (int cid : table.column_ids) column_pos[cid] = next++;
  }
  const auto node_pos = [&](const NodeRef& ref) {
    switch (ref.kind) {
      case NodeKind::Question: return ref.local_index;
      case NodeKind::Table: return nq + ref.local_index;
      case NodeKind::Column: return column_pos[ref.local_index];
    }
    return -1;
  };

  graph.relations = Dense<RelationLabel>(n, n, RelationLabel::Self);

  // Question block from the syntax matrix (SelfSyntax maps onto Self).
  const Dense<SyntaxRelation> question_matrix = question_relation_matrix(parse);
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < nq; ++j)
      graph.relations.at(i, j) = syntax_label(question_matrix.at(i, j));

  // Schema block defaults.
  for (int a = nq; a < n; ++a) {
    for (int b = nq; b < n; ++b) {
      if (a == b) continue;
      const bool a_table = graph.nodes[a].kind == NodeKind::Table;
      const bool b_table = graph.nodes[b].kind == NodeKind::Table;
      if (a_table && b_table)
        graph.relations.at(a, b) = RelationLabel::DefaultTableTable;
      else if (a_table && !b_table)
        graph.relations.at(a, b) = RelationLabel::DefaultTableColumn;
      else if (!a_table && b_table)
        graph.relations.at(a, b) = RelationLabel::DefaultColumnTable;
      else
        graph.relations.at(a, b) = RelationLabel::DefaultColumnColumn;
    }
  }

  // Schema structure with inverses. Emission order makes Primary-Key win
  // over Has on the shared (table, column) cell.
  for (const SchemaRelation& rel : schema_relations(schema)) {
    const int src = node_pos(rel.source);
    const int dst = node_pos(rel.target);
    graph.relations.at(src, dst) = rel.label;
    graph.relations.at(dst, src) = inverse_label(rel.label);
  }

  // Linking blocks with inverses.
  const LinkingResult links = link_relations(tokens, schema);
  for (int i = 0; i < nq; ++i) {
    for (const Table& table : schema.tables) {
      const RelationLabel label = qt_label(links.to_tables.at(i, table.id));
      graph.relations.at(i, nq + table.id) = label;
      graph.relations.at(nq + table.id, i) = inverse_label(label);
    }
    for (const Column& column : schema.columns) {
      const RelationLabel label = qc_label(links.to_columns.at(i, column.id));
      graph.relations.at(i, column_pos[column.id]) = label;
      graph.relations.at(column_pos[column.id], i) = inverse_label(label);
    }
  }

  return graph;
}

std::string export_graph(const InteractionGraph& graph, const json* manifest) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "syntagraph-graph";
  if (manifest != nullptr) doc["manifest"] = *manifest;

  json nodes = json::array();
  for (const NodeRef& node : graph.nodes) {
    nodes.push_back({{"kind", node_kind_name(node.kind)}, {"index", node.local_index}});
  }
  doc["nodes"] = std::move(nodes);

  json items = json::array();
  for (const SequenceItem& item : graph.flattened.items) {
    items.push_back({{"kind", item_kind_name(item.kind)}, {"text", item.text}});
  }
  doc["items"] = std::move(items);

  json spans = json::array();
  for (const ItemSpan& span : graph.flattened.node_spans) {
    spans.push_back({span.begin, span.count});
  }
  doc["spans"] = std::move(spans);

  json relations = json::array();
  for (int i = 0; i < graph.node_count(); ++i) {
    json row = json::array();
    for (int j = 0; j < graph.node_count(); ++j) {
      row.push_back(relation_name(graph.relations.at(i, j)));
    }
    relations.push_back(std::move(row));
  }
  doc["relations"] = std::move(relations);

  return doc.dump(1) + "\n";
}

InteractionGraph import_graph(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph document: ") + e.what());
  }

  InteractionGraph graph;
  try {
    if (doc.at("kind").get<std::string>() != "syntagraph-graph")
      throw ParseError("graph document: unexpected kind '" +
                       doc.at("kind").get<std::string>() + "'");
    if (doc.at("format_version").get<int>() != 1)
      throw ParseError("graph document: unsupported format_version " +
                       doc.at("format_version").dump());

    for (const auto& entry : doc.at("nodes")) {
      NodeRef node;
      node.kind = node_kind_from_name(entry.at("kind").get<std::string>());
      node.local_index = entry.at("index").get<int>();
      graph.nodes.push_back(node);
    }
    for (const auto& entry : doc.at("items")) {
      SequenceItem item;
      item.kind = item_kind_from_name(entry.at("kind").get<std::string>());
      item.text = entry.at("text").get<std::string>();
      graph.flattened.items.push_back(std::move(item));
    }
    for (const auto& entry : doc.at("spans")) {
      if (!entry.is_array() || entry.size() != 2)
        throw ParseError("graph document: spans must be [begin, count] pairs");
      graph.flattened.node_spans.push_back({entry[0].get<int>(), entry[1].get<int>()});
    }

    const auto& relations = doc.at("relations");
    const int n = graph.node_count();
    if (static_cast<int>(relations.size()) != n)
      throw ValidationError("graph document: relation matrix has " +
                            std::to_string(relations.size()) + " rows for " + std::to_string(n) +
                            " nodes");
    graph.relations = Dense<RelationLabel>(n, n, RelationLabel::Self);
    for (int i = 0; i < n; ++i) {
      const auto& row = relations[i];
      if (static_cast<int>(row.size()) != n)
        throw ValidationError("graph document: relation row " + std::to_string(i) + " has " +
                              std::to_string(row.size()) + " cells for " + std::to_string(n) +
                              " nodes");
      for (int j = 0; j < n; ++j)
        graph.relations.at(i, j) = relation_from_name(row[j].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph document: ") + e.what());
  }

  // Structural checks so tampered documents fail loud.
  if (graph.flattened.node_spans.size() != graph.nodes.size())
    throw ValidationError("graph document: " + std::to_string(graph.flattened.node_spans.size()) +
                          " spans for " + std::to_string(graph.nodes.size()) + " nodes");
  {
    // Node order: question tokens with contiguous indices, then tables by id,
    // then columns with unique indices.
    size_t pos = 0;
    int expected_question = 0;
    while (pos < graph.nodes.size() && graph.nodes[pos].kind == NodeKind::Question)
      if (graph.nodes[pos++].local_index != expected_question++)
        throw ValidationError("graph document: question nodes are not contiguous from 0");
    int expected_table = 0;
    while (pos < graph.nodes.size() && graph.nodes[pos].kind == NodeKind::Table)
      if (graph.nodes[pos++].local_index != expected_table++)
        throw ValidationError("graph document: table nodes are not ordered by id");
    std::vector<char> seen_column;
    while (pos < graph.nodes.size() && graph.nodes[pos].kind == NodeKind::Column) {
      const int index = graph.nodes[pos++].local_index;
      if (index < 0) throw ValidationError("graph document: negative column index");
      if (index >= static_cast<int>(seen_column.size())) seen_column.resize(index + 1, 0);
      if (seen_column[index]++)
        throw ValidationError("graph document: duplicate column node index " +
                              std::to_string(index));
    }
    if (pos != graph.nodes.size())
      throw ValidationError("graph document: nodes are not ordered question/table/column");
  }
  const int item_count = static_cast<int>(graph.flattened.items.size());
  for (size_t i = 0; i < graph.flattened.node_spans.size(); ++i) {
    const ItemSpan& span = graph.flattened.node_spans[i];
    if (span.begin < 0 || span.count < 1 || span.begin + span.count > item_count)
      throw ValidationError("graph document: span " + std::to_string(i) + " out of bounds");
  }
  for (int i = 0; i < graph.node_count(); ++i) {
    for (int j = 0; j < graph.node_count(); ++j) {
      if (!label_allowed_in_block(graph.relations.at(i, j), graph.nodes[i].kind,
                                  graph.nodes[j].kind, i == j))
        throw ValidationError("graph document: label '" +
                              std::string(relation_name(graph.relations.at(i, j))) +
                              "' is not allowed at cell (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
    }
  }

  return graph;
}

}  // namespace syntagraph
