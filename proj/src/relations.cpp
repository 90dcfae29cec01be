#include "relations.hpp"

#include <array>
#include <string>

#include "errors.hpp"

namespace syntagraph {

namespace {

constexpr std::array<std::string_view, kRelationLabelCount> kNames = {
    "Self",
    "Forward-Syntax",
    "Backward-Syntax",
    "None-Syntax",
    "Foreign-Key",
    "Foreign-Key-Inv",
    "CC-Default",
    "Has",
    "Has-Inv",
    "Primary-Key",
    "Primary-Key-Inv",
    "TC-Default",
    "CT-Default",
    "TT-Default",
    "QT-None-Linking",
    "QT-Partial-Linking",
    "QT-Exact-Linking",
    "QT-None-Linking-Inv",
    "QT-Partial-Linking-Inv",
    "QT-Exact-Linking-Inv",
    "QC-None-Linking",
    "QC-Partial-Linking",
    "QC-Exact-Linking",
    "QC-Value-Linking",
    "QC-None-Linking-Inv",
    "QC-Partial-Linking-Inv",
    "QC-Exact-Linking-Inv",
    "QC-Value-Linking-Inv",
};

}  // namespace

std::string_view relation_name(RelationLabel label) {
  return kNames[static_cast<int>(label)];
}

RelationLabel relation_from_name(std::string_view name) {
  for (int i = 0; i < kRelationLabelCount; ++i) {
    if (kNames[i] == name) return static_cast<RelationLabel>(i);
  }
  throw ParseError("unknown relation label '" + std::string(name) + "'");
}

RelationLabel inverse_label(RelationLabel label) {
  using L = RelationLabel;
  switch (label) {
    case L::Self: return L::Self;
    case L::ForwardSyntax: return L::BackwardSyntax;
    case L::BackwardSyntax: return L::ForwardSyntax;
    case L::NoneSyntax: return L::NoneSyntax;
    case L::ForeignKey: return L::ForeignKeyInv;
    case L::ForeignKeyInv: return L::ForeignKey;
    case L::DefaultColumnColumn: return L::DefaultColumnColumn;
    case L::Has: return L::HasInv;
    case L::HasInv: return L::Has;
    case L::PrimaryKey: return L::PrimaryKeyInv;
    case L::PrimaryKeyInv: return L::PrimaryKey;
    case L::DefaultTableColumn: return L::DefaultColumnTable;
    case L::DefaultColumnTable: return L::DefaultTableColumn;
    case L::DefaultTableTable: return L::DefaultTableTable;
    case L::QTNoneLinking: return L::QTNoneLinkingInv;
    case L::QTPartialLinking: return L::QTPartialLinkingInv;
    case L::QTExactLinking: return L::QTExactLinkingInv;
    case L::QTNoneLinkingInv: return L::QTNoneLinking;
    case L::QTPartialLinkingInv: return L::QTPartialLinking;
    case L::QTExactLinkingInv: return L::QTExactLinking;
    case L::QCNoneLinking: return L::QCNoneLinkingInv;
    case L::QCPartialLinking: return L::QCPartialLinkingInv;
    case L::QCExactLinking: return L::QCExactLinkingInv;
    case L::QCValueLinking: return L::QCValueLinkingInv;
    case L::QCNoneLinkingInv: return L::QCNoneLinking;
    case L::QCPartialLinkingInv: return L::QCPartialLinking;
    case L::QCExactLinkingInv: return L::QCExactLinking;
    case L::QCValueLinkingInv: return L::QCValueLinking;
  }
  throw ValidationError("invalid relation label ordinal");
}

bool label_allowed_in_block(RelationLabel label, NodeKind row, NodeKind col, bool diagonal) {
  using L = RelationLabel;
  if (diagonal) return label == L::Self;
  if (label == L::Self) return false;
  switch (row) {
    case NodeKind::Question:
      if (col == NodeKind::Question)
        return label == L::ForwardSyntax || label == L::BackwardSyntax || label == L::NoneSyntax;
      if (col == NodeKind::Table)
        return label == L::QTNoneLinking || label == L::QTPartialLinking ||
               label == L::QTExactLinking;
      return label == L::QCNoneLinking || label == L::QCPartialLinking ||
             label == L::QCExactLinking || label == L::QCValueLinking;
    case NodeKind::Table:
      if (col == NodeKind::Question)
        return label == L::QTNoneLinkingInv || label == L::QTPartialLinkingInv ||
               label == L::QTExactLinkingInv;
      if (col == NodeKind::Table) return label == L::DefaultTableTable;
      return label == L::Has || label == L::PrimaryKey || label == L::DefaultTableColumn;
    case NodeKind::Column:
      if (col == NodeKind::Question)
        return label == L::QCNoneLinkingInv || label == L::QCPartialLinkingInv ||
               label == L::QCExactLinkingInv || label == L::QCValueLinkingInv;
      if (col == NodeKind::Table)
        return label == L::HasInv || label == L::PrimaryKeyInv || label == L::DefaultColumnTable;
      return label == L::ForeignKey || label == L::ForeignKeyInv ||
             label == L::DefaultColumnColumn;
  }
  return false;
}

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Question: return "question";
    case NodeKind::Table: return "table";
    case NodeKind::Column: return "column";
  }
  return "";
}

NodeKind node_kind_from_name(std::string_view name) {
  if (name == "question") return NodeKind::Question;
  if (name == "table") return NodeKind::Table;
  if (name == "column") return NodeKind::Column;
  throw ParseError("unknown node kind '" + std::string(name) + "'");
}

}  // namespace syntagraph
