#ifndef SYNTAGRAPH_SCHEMA_HPP
#define SYNTAGRAPH_SCHEMA_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relations.hpp"

namespace syntagraph {

enum class ColumnType : std::uint8_t { Text, Number, Time, Boolean, Other };

std::string_view column_type_name(ColumnType t);
ColumnType column_type_from_name(std::string_view name);  // throws ValidationError

struct Column {
  int id = 0;
  int table_id = 0;
  std::vector<std::string> name_tokens;  // lowercased at ingestion
  std::vector<std::string> lemmas;       // defaults to name_tokens
  ColumnType data_type = ColumnType::Other;
  bool is_primary = false;
  std::vector<std::string> cell_values;  // optional value-linking candidates

  bool operator==(const Column&) const = default;
};

struct Table {
  int id = 0;
  std::vector<std::string> name_tokens;
  std::vector<std::string> lemmas;
  std::vector<int> column_ids;

  bool operator==(const Table&) const = default;
};

struct Schema {
  std::string db_id;
  std::vector<Table> tables;
  std::vector<Column> columns;
  std::vector<std::pair<int, int>> foreign_keys;  // (from column id, to column id)

  bool operator==(const Schema&) const = default;
};

// Parses the schema file format: a JSON object with db_id, table_names,
// column_names as (table index, name), column_types, primary_keys and
// foreign_keys, plus an optional per-column cell_values array. A one-element
// array wrapping that object is also accepted.
Schema load_schema(std::string_view document);

void validate_schema(const Schema& schema);  // throws ValidationError

struct SchemaRelation {
  NodeRef source;
  NodeRef target;
  RelationLabel label;

  bool operator==(const SchemaRelation&) const = default;
};

// Directed intra-schema relations in a fixed order: all Has (tables by id,
// columns in listed order), then all Primary-Key, then Foreign-Key per listed
// pair. Inverse labels are minted later, during graph assembly.
std::vector<SchemaRelation> schema_relations(const Schema& schema);

}  // namespace syntagraph

#endif
