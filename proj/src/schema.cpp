#include "schema.hpp"

#include <set>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "util.hpp"

namespace syntagraph {

using nlohmann::json;

std::string_view column_type_name(ColumnType t) {
  switch (t) {
    case ColumnType::Text: return "text";
    case ColumnType::Number: return "number";
    case ColumnType::Time: return "time";
    case ColumnType::Boolean: return "boolean";
    case ColumnType::Other: return "other";
  }
  return "other";
}

ColumnType column_type_from_name(std::string_view name) {
  if (name == "text") return ColumnType::Text;
  if (name == "number") return ColumnType::Number;
  if (name == "time") return ColumnType::Time;
  if (name == "boolean") return ColumnType::Boolean;
  if (name == "other" || name == "others") return ColumnType::Other;
  throw ValidationError("unknown column type '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> name_to_tokens(const std::string& name) {
  return split_whitespace(ascii_lower(name));
}

std::vector<std::string> lemma_list(const json& entry) {
  std::vector<std::string> out;
  for (const auto& item : entry) out.push_back(ascii_lower(item.get<std::string>()));
  return out;
}

}  // namespace

Schema load_schema(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("schema document: ") + e.what());
  }

  if (doc.is_array()) {
    if (doc.size() != 1) {
      throw ParseError("schema document: expected a single schema object, got an array of " +
                       std::to_string(doc.size()));
    }
    doc = doc.front();
  }

  Schema schema;
  try {
    schema.db_id = doc.at("db_id").get<std::string>();

    const auto& table_names = doc.at("table_names");
    for (size_t i = 0; i < table_names.size(); ++i) {
      Table table;
      table.id = static_cast<int>(i);
      table.name_tokens = name_to_tokens(table_names[i].get<std::string>());
      table.lemmas = table.name_tokens;
      schema.tables.push_back(std::move(table));
    }

    const auto& column_names = doc.at("column_names");
    const auto& column_types = doc.at("column_types");
    if (column_types.size() != column_names.size()) {
      throw ValidationError("column_types length " + std::to_string(column_types.size()) +
                            " does not match column_names length " +
                            std::to_string(column_names.size()));
    }
    for (size_t i = 0; i < column_names.size(); ++i) {
      const auto& entry = column_names[i];
      Column column;
      column.id = static_cast<int>(i);
      column.table_id = entry.at(0).get<int>();
      column.name_tokens = name_to_tokens(entry.at(1).get<std::string>());
      column.lemmas = column.name_tokens;
      column.data_type = column_type_from_name(column_types[i].get<std::string>());
      schema.columns.push_back(std::move(column));
    }

    if (doc.contains("table_lemmas")) {
      const auto& lemmas = doc.at("table_lemmas");
      if (lemmas.size() != schema.tables.size())
        throw ValidationError("table_lemmas length does not match table_names");
      for (size_t i = 0; i < lemmas.size(); ++i) schema.tables[i].lemmas = lemma_list(lemmas[i]);
    }
    if (doc.contains("column_lemmas")) {
      const auto& lemmas = doc.at("column_lemmas");
      if (lemmas.size() != schema.columns.size())
        throw ValidationError("column_lemmas length does not match column_names");
      for (size_t i = 0; i < lemmas.size(); ++i) {
        if (!lemmas[i].is_null()) schema.columns[i].lemmas = lemma_list(lemmas[i]);
      }
    }

    if (doc.contains("primary_keys")) {
      for (const auto& entry : doc.at("primary_keys")) {
        // Spider writes flat column ids; composite keys appear as nested lists.
        if (entry.is_array()) {
          for (const auto& sub : entry) {
            const int id = sub.get<int>();
            if (id < 0 || id >= static_cast<int>(schema.columns.size()))
              throw ValidationError("primary key references unknown column id " +
                                    std::to_string(id));
            schema.columns[id].is_primary = true;
          }
        } else {
          const int id = entry.get<int>();
          if (id < 0 || id >= static_cast<int>(schema.columns.size()))
            throw ValidationError("primary key references unknown column id " +
                                  std::to_string(id));
          schema.columns[id].is_primary = true;
        }
      }
    }

    if (doc.contains("foreign_keys")) {
      for (const auto& pair : doc.at("foreign_keys")) {
        if (!pair.is_array() || pair.size() != 2)
          throw ValidationError("foreign key entries must be [from, to] column id pairs");
        schema.foreign_keys.emplace_back(pair[0].get<int>(), pair[1].get<int>());
      }
    }

    if (doc.contains("cell_values") && !doc.at("cell_values").is_null()) {
      const auto& cells = doc.at("cell_values");
      if (cells.size() != schema.columns.size())
        throw ValidationError("cell_values length does not match column_names");
      for (size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].is_null()) continue;
        for (const auto& value : cells[i]) {
          if (value.is_string())
            schema.columns[i].cell_values.push_back(value.get<std::string>());
          else
            schema.columns[i].cell_values.push_back(value.dump());
        }
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("schema document: ") + e.what());
  }

  // Derive each table's column list from the declared table indices,
  // preserving column id order.
  for (Column& column : schema.columns) {
    if (column.table_id < 0 || column.table_id >= static_cast<int>(schema.tables.size()))
      throw ValidationError("column '" +
                            (column.name_tokens.empty() ? std::string("?")
                                                        : column.name_tokens.front()) +
                            "' (id " + std::to_string(column.id) +
                            ") references unknown table index " + std::to_string(column.table_id));
    schema.tables[column.table_id].column_ids.push_back(column.id);
  }

  validate_schema(schema);
  return schema;
}

void validate_schema(const Schema& schema) {
  if (schema.tables.empty())
    throw ValidationError("schema '" + schema.db_id + "' declares no tables");

  for (size_t i = 0; i < schema.tables.size(); ++i) {
    const Table& table = schema.tables[i];
    if (table.id != static_cast<int>(i))
      throw ValidationError("table ids must be dense indices; found id " +
                            std::to_string(table.id) + " at position " + std::to_string(i));
    if (table.name_tokens.empty())
      throw ValidationError("table id " + std::to_string(table.id) + " has an empty name");
    if (table.lemmas.empty())
      throw ValidationError("table id " + std::to_string(table.id) + " has no lemmas");
    if (table.column_ids.empty())
      throw ValidationError("table '" + table.name_tokens.front() + "' (id " +
                            std::to_string(table.id) + ") has no columns");
    for (int cid : table.column_ids) {
      if (cid < 0 || cid >= static_cast<int>(schema.columns.size()))
        throw ValidationError("table id " + std::to_string(table.id) +
                              " lists unknown column id " + std::to_string(cid));
      if (schema.columns[cid].table_id != table.id)
        throw ValidationError("column id " + std::to_string(cid) + " is listed by table " +
                              std::to_string(table.id) + " but belongs to table " +
                              std::to_string(schema.columns[cid].table_id));
    }
  }

  for (size_t i = 0; i < schema.columns.size(); ++i) {
    const Column& column = schema.columns[i];
    if (column.id != static_cast<int>(i))
      throw ValidationError("column ids must be dense indices; found id " +
                            std::to_string(column.id) + " at position " + std::to_string(i));
    if (column.name_tokens.empty())
      throw ValidationError("column id " + std::to_string(column.id) + " has an empty name");
    if (column.lemmas.empty())
      throw ValidationError("column id " + std::to_string(column.id) + " has no lemmas");
  }

  for (size_t i = 0; i < schema.foreign_keys.size(); ++i) {
    const auto& [from, to] = schema.foreign_keys[i];
    for (int endpoint : {from, to}) {
      if (endpoint < 0 || endpoint >= static_cast<int>(schema.columns.size()))
        throw ValidationError("foreign key pair " + std::to_string(i) +
                              " references unknown column id " + std::to_string(endpoint));
    }
    if (from == to)
      throw ValidationError("foreign key pair " + std::to_string(i) +
                            " is a self-loop on column id " + std::to_string(from));
  }
}

std::vector<SchemaRelation> schema_relations(const Schema& schema) {
  std::vector<SchemaRelation> out;
  const auto table_ref = [](int id) { return NodeRef{NodeKind::Table, id}; };
  const auto column_ref = [](int id) { return NodeRef{NodeKind::Column, id}; };

  for (const Table& table : schema.tables) {
    for (int cid : table.column_ids) {
      out.push_back({table_ref(table.id), column_ref(cid), RelationLabel::Has});
    }
  }
  for (const Table& table : schema.tables) {
    for (int cid : table.column_ids) {
      if (schema.columns[cid].is_primary)
        out.push_back({table_ref(table.id), column_ref(cid), RelationLabel::PrimaryKey});
    }
  }
  for (const auto& [from, to] : schema.foreign_keys) {
    out.push_back({column_ref(from), column_ref(to), RelationLabel::ForeignKey});
  }
  return out;
}

}  // namespace syntagraph
