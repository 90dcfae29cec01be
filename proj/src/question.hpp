#ifndef SYNTAGRAPH_QUESTION_HPP
#define SYNTAGRAPH_QUESTION_HPP

#include <string>
#include <string_view>
#include <vector>

#include "util.hpp"

namespace syntagraph {

struct QuestionToken {
  int index = 0;  // 0-based position
  std::string surface;
  std::string lemma;  // lowercase

  bool operator==(const QuestionToken&) const = default;
};

struct DependencyEdge {
  int head = 0;
  int dependent = 0;
  std::string label;  // raw parser label, diagnostics only

  bool operator==(const DependencyEdge&) const = default;
};

// A validated dependency tree: every non-root token has exactly one head,
// there is a single root and no cycles.
struct DependencyParse {
  int token_count = 0;
  int root = -1;
  std::vector<DependencyEdge> edges;  // ordered by dependent index

  bool operator==(const DependencyParse&) const = default;
};

struct ParsedQuestion {
  std::vector<QuestionToken> tokens;
  DependencyParse parse;
};

// Reads one sentence of CoNLL-U text (ID/FORM/LEMMA/.../HEAD/DEPREL columns).
// Malformed lines raise ParseError; structural problems (dangling head,
// cycle, multiple roots) raise ValidationError with a "tree violation" label.
ParsedQuestion load_conllu(std::string_view document);

// 1 iff a dependency edge head=i -> dependent=j exists; 0 otherwise,
// including i == j. Only the first-order relationship counts: transitive
// ancestry does not.
int first_order_distance(const DependencyParse& parse, int i, int j);

enum class SyntaxRelation : std::uint8_t { Forward, Backward, NoneSyntax, SelfSyntax };

// Direction-only induction of the raw dependency label set onto three
// abstract relations. i == j is rejected; the diagonal is assigned during
// graph assembly.
SyntaxRelation syntax_relation(const DependencyParse& parse, int i, int j);

// Full pairwise matrix; diagonal holds the SelfSyntax placeholder.
Dense<SyntaxRelation> question_relation_matrix(const DependencyParse& parse);

}  // namespace syntagraph

#endif
