#ifndef SYMBSEL_EXPR_HPP_
#define SYMBSEL_EXPR_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace symbsel {

struct ExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownToken : ExprError {
  using ExprError::ExprError;
};
struct IncompleteSequence : ExprError {
  using ExprError::ExprError;
};
struct TrailingTokens : ExprError {
  using ExprError::ExprError;
};
struct DimensionMismatch : ExprError {
  using ExprError::ExprError;
};
struct InfeasiblePrefix : ExprError {
  using ExprError::ExprError;
};

enum class TokenKind { BinaryOp, UnaryOp, Variable, Constant };

struct Token {
  TokenKind kind;
  std::string symbol;
  int arity = 0;
  int var_index = 0;   // 1-based, variables only
  double value = 0.0;  // constants only
};

enum class LibraryMode { Pair, Symmetric };

struct LibraryOptions {
  bool with_trig = false;        // adds unary sin, cos
  bool with_const_grid = false;  // adds constants 0.1, 1.0, 10.0
};

/// Ordered token set defining the expression search space. The ordering is
/// stable and doubles as the policy's action indexing.
class TokenLibrary {
 public:
  static TokenLibrary make(LibraryMode mode, int max_length = 10,
                           LibraryOptions opts = {});

  /// Reduced library from symbol names ("+", "log", "x3", "0.5", ...);
  /// ordering follows the given list.
  static TokenLibrary from_symbols(LibraryMode mode, int max_length,
                                   const std::vector<std::string>& symbols);

  const std::vector<Token>& tokens() const { return tokens_; }
  const Token& token(int i) const { return tokens_.at(static_cast<size_t>(i)); }
  int size() const { return static_cast<int>(tokens_.size()); }
  LibraryMode mode() const { return mode_; }
  int max_length() const { return max_length_; }
  int num_variables() const { return num_variables_; }

  /// -1 if the symbol is not in the library.
  int index_of(const std::string& symbol) const;

  /// Hash over (mode, max_length, token symbols); guards checkpoint loads.
  std::uint64_t fingerprint() const;

 private:
  std::vector<Token> tokens_;
  LibraryMode mode_ = LibraryMode::Pair;
  int max_length_ = 10;
  int num_variables_ = 0;
};

const char* to_string(LibraryMode mode);
LibraryMode library_mode_from_string(const std::string& s);

/// Expression tree stored as a pre-order node arena: node 0 is the root and
/// children always follow their parent, so to_prefix is the identity walk.
class ExprTree {
 public:
  struct Node {
    int token = -1;
    std::array<int, 2> child = {-1, -1};
  };

  const Node& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  friend ExprTree parse_prefix(std::span<const int>, const TokenLibrary&);
  std::vector<Node> nodes_;
};

ExprTree parse_prefix(std::span<const int> seq, const TokenLibrary& lib);
ExprTree parse_prefix(const std::vector<std::string>& symbols,
                      const TokenLibrary& lib);

std::vector<int> to_prefix(const ExprTree& tree);

struct EvalConfig {
  double eps = 1e-9;        // protected log / divide guard
  double exp_clamp = 50.0;  // exp argument clamped to [-exp_clamp, exp_clamp]
  double value_cap = 1e12;  // every intermediate clamped to [-cap, cap]
};

/// Protected evaluation: finite output for any finite feature vector.
double evaluate(const ExprTree& tree, const TokenLibrary& lib,
                std::span<const double> features, const EvalConfig& cfg = {});

/// Mask over lib tokens: true iff appending the token keeps the sequence
/// completable within lib.max_length(). All-false only for complete inputs.
std::vector<char> valid_next_tokens(std::span<const int> partial,
                                    const TokenLibrary& lib);

/// Infix rendering with minimal parentheses; - and / are left-associative,
/// pow prints as ^2.
std::string render(const ExprTree& tree, const TokenLibrary& lib);

// Node-pair decision convention: -1 prefers node 1, +1 prefers node 2.
inline constexpr int kPreferNode1 = -1;
inline constexpr int kPreferNode2 = 1;

/// Decision of an expression over a 40-wide (node1 ⊕ node2) feature pair.
/// Pair mode: sign of f(pair); symmetric mode: sign of g(node1) - g(node2).
/// A strictly positive score prefers node 1.
int pair_decision(const ExprTree& tree, const TokenLibrary& lib,
                  std::span<const double> pair_features,
                  const EvalConfig& cfg = {});

std::vector<std::string> sequence_symbols(std::span<const int> seq,
                                          const TokenLibrary& lib);

// --- expression file format -------------------------------------------------
// First line:  mode=<pair|symmetric> max_length=<n>
// Then one expression per line, pre-order tokens space-separated.

struct ExpressionFile {
  LibraryMode mode = LibraryMode::Pair;
  int max_length = 10;
  std::vector<std::vector<std::string>> expressions;
};

void write_expression_file(const std::string& path, const TokenLibrary& lib,
                           const std::vector<std::vector<int>>& sequences);
ExpressionFile read_expression_file(const std::string& path);

}  // namespace symbsel

#endif  // SYMBSEL_EXPR_HPP_
