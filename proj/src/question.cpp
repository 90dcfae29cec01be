#include "question.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace syntagraph {

namespace {

bool parse_int_strict(std::string_view field, int& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

ParsedQuestion load_conllu(std::string_view document) {
  ParsedQuestion out;
  std::vector<int> heads;  // 0 = root, else 1-based head id
  bool sentence_done = false;
  int line_no = 0;

  size_t pos = 0;
  while (pos <= document.size()) {
    const size_t eol = document.find('\n', pos);
    std::string_view line = document.substr(pos, eol == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : eol - pos);
    pos = eol == std::string_view::npos ? document.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      if (!out.tokens.empty()) sentence_done = true;
      continue;
    }
    if (line.front() == '#') continue;
    if (sentence_done)
      throw ParseError("line " + std::to_string(line_no) +
                       ": found a second sentence; expected exactly one question per file");

    const auto fields = split_tabs(line);
    if (fields.size() < 8)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected at least 8 tab-separated CoNLL-U columns, got " +
                       std::to_string(fields.size()));

    int id = 0;
    if (!parse_int_strict(fields[0], id))
      throw ParseError("line " + std::to_string(line_no) + ": unsupported token id '" +
                       std::string(fields[0]) + "' (ranges and empty nodes are not accepted)");
    if (id != static_cast<int>(out.tokens.size()) + 1)
      throw ParseError("line " + std::to_string(line_no) + ": token ids must be contiguous from 1");

    if (fields[1].empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty FORM column");

    int head = 0;
    if (!parse_int_strict(fields[6], head))
      throw ParseError("line " + std::to_string(line_no) + ": HEAD column '" +
                       std::string(fields[6]) + "' is not an integer");
    if (head < 0)
      throw ParseError("line " + std::to_string(line_no) + ": negative HEAD");

    if (fields[7].empty() || fields[7] == "_")
      throw ParseError("line " + std::to_string(line_no) + ": DEPREL column is not populated");

    QuestionToken token;
    token.index = id - 1;
    token.surface = std::string(fields[1]);
    token.lemma = (fields[2].empty() || fields[2] == "_") ? ascii_lower(fields[1])
                                                          : ascii_lower(fields[2]);
    out.tokens.push_back(std::move(token));
    heads.push_back(head);

    if (head != 0) {
      DependencyEdge edge;
      edge.head = head - 1;
      edge.dependent = id - 1;
      edge.label = std::string(fields[7]);
      out.parse.edges.push_back(std::move(edge));
    } else {
      if (out.parse.root >= 0)
        throw ValidationError("tree violation: multiple roots (tokens " +
                              std::to_string(out.parse.root + 1) + " and " + std::to_string(id) +
                              ")");
      out.parse.root = id - 1;
    }
  }

  const int n = static_cast<int>(out.tokens.size());
  if (n == 0) throw ParseError("document contains no tokens");
  out.parse.token_count = n;
  if (out.parse.root < 0) throw ValidationError("tree violation: no root token");

  for (int i = 0; i < n; ++i) {
    if (heads[i] > n)
      throw ValidationError("tree violation: token " + std::to_string(i + 1) +
                            " references head " + std::to_string(heads[i]) + " beyond " +
                            std::to_string(n) + " tokens");
    if (heads[i] == i + 1)
      throw ValidationError("tree violation: token " + std::to_string(i + 1) + " heads itself");
  }

  // Single root plus one head per token rules out disconnection; walking to
  // the root from every token rules out cycles.
  for (int i = 0; i < n; ++i) {
    int cursor = i;
    int steps = 0;
    while (heads[cursor] != 0) {
      cursor = heads[cursor] - 1;
      if (++steps > n)
        throw ValidationError("tree violation: cycle involving token " + std::to_string(i + 1));
    }
  }

  return out;
}

int first_order_distance(const DependencyParse& parse, int i, int j) {
  if (i < 0 || i >= parse.token_count || j < 0 || j >= parse.token_count)
    throw std::out_of_range("token index out of range: (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") with " + std::to_string(parse.token_count) +
                            " tokens");
  for (const DependencyEdge& edge : parse.edges) {
    if (edge.head == i && edge.dependent == j) return 1;
  }
  return 0;
}

SyntaxRelation syntax_relation(const DependencyParse& parse, int i, int j) {
  if (i == j)
    throw std::invalid_argument("syntax_relation is undefined on the diagonal (i == j == " +
                                std::to_string(i) + ")");
  if (first_order_distance(parse, i, j) == 1) return SyntaxRelation::Forward;
  if (first_order_distance(parse, j, i) == 1) return SyntaxRelation::Backward;
  return SyntaxRelation::NoneSyntax;
}

Dense<SyntaxRelation> question_relation_matrix(const DependencyParse& parse) {
  const int n = parse.token_count;
  Dense<SyntaxRelation> matrix(n, n, SyntaxRelation::NoneSyntax);
  for (int i = 0; i < n; ++i) matrix.at(i, i) = SyntaxRelation::SelfSyntax;
  for (const DependencyEdge& edge : parse.edges) {
    matrix.at(edge.head, edge.dependent) = SyntaxRelation::Forward;
    matrix.at(edge.dependent, edge.head) = SyntaxRelation::Backward;
  }
  return matrix;
}

}  // namespace syntagraph
