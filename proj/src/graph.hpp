#ifndef SYNTAGRAPH_GRAPH_HPP
#define SYNTAGRAPH_GRAPH_HPP

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "question.hpp"
#include "relations.hpp"
#include "schema.hpp"
#include "util.hpp"

namespace syntagraph {

enum class ItemKind : std::uint8_t {
  Cls,
  Sep,
  TableMarker,
  ColumnMarker,
  QuestionToken,
  TableToken,
  ColumnToken,
};

std::string_view item_kind_name(ItemKind kind);
ItemKind item_kind_from_name(std::string_view name);  // throws ParseError

struct SequenceItem {
  ItemKind kind = ItemKind::Cls;
  std::string text;

  bool operator==(const SequenceItem&) const = default;
};

// Contiguous run of items. Node spans cover content tokens only; [CLS],
// [SEP] and type markers are sequence items without a node.
struct ItemSpan {
  int begin = 0;
  int count = 0;

  bool operator==(const ItemSpan&) const = default;
};

struct FlattenedSequence {
  std::vector<SequenceItem> items;
  std::vector<ItemSpan> node_spans;  // aligned with InteractionGraph::nodes

  bool operator==(const FlattenedSequence&) const = default;
};

struct InteractionGraph {
  std::vector<NodeRef> nodes;  // question tokens, then tables, then columns
  Dense<RelationLabel> relations;
  FlattenedSequence flattened;

  int node_count() const { return static_cast<int>(nodes.size()); }
  bool operator==(const InteractionGraph&) const = default;
};

// [CLS] q1 ... qn [SEP] then per table: marker, table tokens, and per owned
// column: marker, column tokens; closing [SEP]. Column markers carry the
// column's data type.
FlattenedSequence flatten_input(const std::vector<QuestionToken>& tokens, const Schema& schema);

enum class LinkLabel : std::uint8_t { None, Partial, Exact, Value };

// One label per (question token, schema item) pair. Rows are tokens; table
// columns are table ids, column columns are column ids.
struct LinkingResult {
  Dense<LinkLabel> to_tables;
  Dense<LinkLabel> to_columns;
};

LinkingResult link_relations(const std::vector<QuestionToken>& tokens, const Schema& schema);

InteractionGraph build_graph(const std::vector<QuestionToken>& tokens,
                             const DependencyParse& parse, const Schema& schema);

// Deterministic JSON serialization; import(export(g)) reproduces g exactly.
// A manifest, when given, is embedded verbatim under "manifest" and ignored
// by import.
std::string export_graph(const InteractionGraph& graph,
                         const nlohmann::json* manifest = nullptr);
InteractionGraph import_graph(std::string_view document);

}  // namespace syntagraph

#endif
