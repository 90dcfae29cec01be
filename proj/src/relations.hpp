#ifndef SYNTAGRAPH_RELATIONS_HPP
#define SYNTAGRAPH_RELATIONS_HPP

#include <cstdint>
#include <string_view>

namespace syntagraph {

enum class NodeKind : std::uint8_t { Question = 0, Table = 1, Column = 2 };

// Reference into one of the three node collections; `local_index` is the
// question token index, table id, or column id.
struct NodeRef {
  NodeKind kind = NodeKind::Question;
  int local_index = 0;

  bool operator==(const NodeRef&) const = default;
};

// Closed label set for the interaction graph. Ordinals index the relation
// embedding tables, so the order below is part of the checkpoint format and
// must not be reshuffled. Every asymmetric label has a designated inverse
// used for the mirrored cell of the dense matrix.
enum class RelationLabel : std::uint8_t {
  Self = 0,

  // question x question
  ForwardSyntax,
  BackwardSyntax,
  NoneSyntax,

  // column x column
  ForeignKey,
  ForeignKeyInv,
  DefaultColumnColumn,

  // table x column and mirror
  Has,
  HasInv,
  PrimaryKey,
  PrimaryKeyInv,
  DefaultTableColumn,
  DefaultColumnTable,

  // table x table
  DefaultTableTable,

  // question x table and mirror
  QTNoneLinking,
  QTPartialLinking,
  QTExactLinking,
  QTNoneLinkingInv,
  QTPartialLinkingInv,
  QTExactLinkingInv,

  // question x column and mirror
  QCNoneLinking,
  QCPartialLinking,
  QCExactLinking,
  QCValueLinking,
  QCNoneLinkingInv,
  QCPartialLinkingInv,
  QCExactLinkingInv,
  QCValueLinkingInv,
};

inline constexpr int kRelationLabelCount = 28;

std::string_view relation_name(RelationLabel label);
RelationLabel relation_from_name(std::string_view name);  // throws ParseError
RelationLabel inverse_label(RelationLabel label);

// Whether `label` may appear in the (row kind, col kind) block of the matrix.
// The diagonal carries Self regardless of kind.
bool label_allowed_in_block(RelationLabel label, NodeKind row, NodeKind col, bool diagonal);

std::string_view node_kind_name(NodeKind kind);
NodeKind node_kind_from_name(std::string_view name);  // throws ParseError

}  // namespace syntagraph

#endif
