#ifndef SYNTAGRAPH_UTIL_HPP
#define SYNTAGRAPH_UTIL_HPP

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace syntagraph {

// Dense row-major grid for label/relation matrices.
template <typename T>
class Dense {
 public:
  Dense() = default;
  Dense(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), cells_(static_cast<size_t>(rows) * cols, fill) {}

  T& at(int r, int c) { return cells_[static_cast<size_t>(r) * cols_ + c]; }
  const T& at(int r, int c) const { return cells_[static_cast<size_t>(r) * cols_ + c]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool operator==(const Dense&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> cells_;
};

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace syntagraph

#endif
