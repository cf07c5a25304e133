#include "symbsel/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace symbsel {

namespace {

Token binary_op(const std::string& s) {
  return Token{TokenKind::BinaryOp, s, 2, 0, 0.0};
}
Token unary_op(const std::string& s) {
  return Token{TokenKind::UnaryOp, s, 1, 0, 0.0};
}
Token variable(int index) {
  return Token{TokenKind::Variable, "x" + std::to_string(index), 0, index, 0.0};
}
Token constant(const std::string& s, double v) {
  return Token{TokenKind::Constant, s, 0, 0, v};
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

TokenLibrary TokenLibrary::make(LibraryMode mode, int max_length,
                                LibraryOptions opts) {
  TokenLibrary lib;
  lib.mode_ = mode;
  lib.max_length_ = max_length;
  lib.num_variables_ = mode == LibraryMode::Pair ? 40 : 20;

  lib.tokens_.push_back(binary_op("+"));
  lib.tokens_.push_back(binary_op("-"));
  lib.tokens_.push_back(binary_op("*"));
  lib.tokens_.push_back(binary_op("/"));
  lib.tokens_.push_back(unary_op("log"));
  lib.tokens_.push_back(unary_op("exp"));
  lib.tokens_.push_back(unary_op("pow"));  // unary square
  if (opts.with_trig) {
    lib.tokens_.push_back(unary_op("sin"));
    lib.tokens_.push_back(unary_op("cos"));
  }
  for (int i = 1; i <= lib.num_variables_; ++i) {
    lib.tokens_.push_back(variable(i));
  }
  lib.tokens_.push_back(constant("0.2", 0.2));
  lib.tokens_.push_back(constant("0.5", 0.5));
  lib.tokens_.push_back(constant("2.0", 2.0));
  lib.tokens_.push_back(constant("5.0", 5.0));
  if (opts.with_const_grid) {
    lib.tokens_.push_back(constant("0.1", 0.1));
    lib.tokens_.push_back(constant("1.0", 1.0));
    lib.tokens_.push_back(constant("10.0", 10.0));
  }
  return lib;
}

TokenLibrary TokenLibrary::from_symbols(
    LibraryMode mode, int max_length,
    const std::vector<std::string>& symbols) {
  TokenLibrary lib;
  lib.mode_ = mode;
  lib.max_length_ = max_length;
  for (const std::string& s : symbols) {
    if (s == "+" || s == "-" || s == "*" || s == "/") {
      lib.tokens_.push_back(binary_op(s));
    } else if (s == "log" || s == "exp" || s == "pow" || s == "sin" ||
               s == "cos") {
      lib.tokens_.push_back(unary_op(s));
    } else if (s.size() > 1 && s[0] == 'x') {
      const int idx = std::stoi(s.substr(1));
      lib.tokens_.push_back(variable(idx));
      lib.num_variables_ = std::max(lib.num_variables_, idx);
    } else {
      lib.tokens_.push_back(constant(s, std::stod(s)));
    }
  }
  return lib;
}

int TokenLibrary::index_of(const std::string& symbol) const {
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].symbol == symbol) return static_cast<int>(i);
  }
  return -1;
}

std::uint64_t TokenLibrary::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const char m = mode_ == LibraryMode::Pair ? 'p' : 's';
  h = fnv1a(h, &m, 1);
  h = fnv1a(h, &max_length_, sizeof(max_length_));
  for (const Token& t : tokens_) {
    h = fnv1a(h, t.symbol.data(), t.symbol.size());
    h = fnv1a(h, "|", 1);
  }
  return h;
}

const char* to_string(LibraryMode mode) {
  return mode == LibraryMode::Pair ? "pair" : "symmetric";
}

LibraryMode library_mode_from_string(const std::string& s) {
  if (s == "pair") return LibraryMode::Pair;
  if (s == "symmetric") return LibraryMode::Symmetric;
  throw ExprError("unknown library mode: " + s);
}

ExprTree parse_prefix(std::span<const int> seq, const TokenLibrary& lib) {
  ExprTree tree;
  tree.nodes_.reserve(seq.size());
  size_t pos = 0;

  // Nodes are appended in pre-order, so node index == sequence position.
  auto build = [&](auto&& self) -> int {
    if (pos >= seq.size()) {
      throw IncompleteSequence("sequence ended with open argument slots");
    }
    const int tok = seq[pos];
    if (tok < 0 || tok >= lib.size()) {
      throw UnknownToken("token index " + std::to_string(tok) +
                         " outside library");
    }
    const int idx = static_cast<int>(pos);
    ++pos;
    tree.nodes_.push_back(ExprTree::Node{tok, {-1, -1}});
    const int arity = lib.token(tok).arity;
    for (int a = 0; a < arity; ++a) {
      const int child = self(self);
      tree.nodes_[static_cast<size_t>(idx)].child[static_cast<size_t>(a)] =
          child;
    }
    return idx;
  };

  build(build);
  if (pos != seq.size()) {
    throw TrailingTokens("sequence continues after the tree is complete");
  }
  return tree;
}

ExprTree parse_prefix(const std::vector<std::string>& symbols,
                      const TokenLibrary& lib) {
  std::vector<int> seq;
  seq.reserve(symbols.size());
  for (const std::string& s : symbols) {
    const int idx = lib.index_of(s);
    if (idx < 0) throw UnknownToken("unknown token: " + s);
    seq.push_back(idx);
  }
  return parse_prefix(seq, lib);
}

std::vector<int> to_prefix(const ExprTree& tree) {
  std::vector<int> seq;
  seq.reserve(static_cast<size_t>(tree.size()));
  for (int i = 0; i < tree.size(); ++i) {
    seq.push_back(tree.node(i).token);
  }
  return seq;
}

namespace {

double clamp_value(double v, const EvalConfig& cfg) {
  return std::clamp(v, -cfg.value_cap, cfg.value_cap);
}

double eval_node(const ExprTree& tree, const TokenLibrary& lib, int idx,
                 std::span<const double> features, const EvalConfig& cfg) {
  const ExprTree::Node& n = tree.node(idx);
  const Token& t = lib.token(n.token);
  switch (t.kind) {
    case TokenKind::Variable:
      return features[static_cast<size_t>(t.var_index - 1)];
    case TokenKind::Constant:
      return t.value;
    case TokenKind::UnaryOp: {
      const double a = eval_node(tree, lib, n.child[0], features, cfg);
      double v = 0.0;
      if (t.symbol == "log") {
        v = std::log(std::abs(a) + cfg.eps);
      } else if (t.symbol == "exp") {
        v = std::exp(std::clamp(a, -cfg.exp_clamp, cfg.exp_clamp));
      } else if (t.symbol == "pow") {
        v = a * a;
      } else if (t.symbol == "sin") {
        v = std::sin(a);
      } else if (t.symbol == "cos") {
        v = std::cos(a);
      } else {
        throw ExprError("unhandled unary operator: " + t.symbol);
      }
      return clamp_value(v, cfg);
    }
    case TokenKind::BinaryOp: {
      const double a = eval_node(tree, lib, n.child[0], features, cfg);
      const double b = eval_node(tree, lib, n.child[1], features, cfg);
      double v = 0.0;
      if (t.symbol == "+") {
        v = a + b;
      } else if (t.symbol == "-") {
        v = a - b;
      } else if (t.symbol == "*") {
        v = a * b;
      } else if (t.symbol == "/") {
        const double sign = b < 0.0 ? -1.0 : 1.0;
        v = a / (sign * std::max(std::abs(b), cfg.eps));
      } else {
        throw ExprError("unhandled binary operator: " + t.symbol);
      }
      return clamp_value(v, cfg);
    }
  }
  throw ExprError("corrupt token kind");
}

int max_var_index(const ExprTree& tree, const TokenLibrary& lib) {
  int mx = 0;
  for (int i = 0; i < tree.size(); ++i) {
    const Token& t = lib.token(tree.node(i).token);
    if (t.kind == TokenKind::Variable) mx = std::max(mx, t.var_index);
  }
  return mx;
}

}  // namespace

double evaluate(const ExprTree& tree, const TokenLibrary& lib,
                std::span<const double> features, const EvalConfig& cfg) {
  const int needed = max_var_index(tree, lib);
  if (static_cast<int>(features.size()) < needed) {
    throw DimensionMismatch("expression reads x" + std::to_string(needed) +
                            " but only " + std::to_string(features.size()) +
                            " features were given");
  }
  return eval_node(tree, lib, 0, features, cfg);
}

std::vector<char> valid_next_tokens(std::span<const int> partial,
                                    const TokenLibrary& lib) {
  int open = 1;
  int used = 0;
  for (const int tok : partial) {
    if (tok < 0 || tok >= lib.size()) {
      throw UnknownToken("token index " + std::to_string(tok) +
                         " outside library");
    }
    if (open == 0) {
      throw TrailingTokens("partial sequence continues after completion");
    }
    open += lib.token(tok).arity - 1;
    ++used;
  }
  std::vector<char> mask(static_cast<size_t>(lib.size()), 0);
  if (open == 0) return mask;  // complete: nothing may follow
  if (used >= lib.max_length()) {
    throw InfeasiblePrefix("prefix already uses the full token budget");
  }
  // Appending token t needs used + 1 + (open - 1 + arity) total tokens.
  for (int i = 0; i < lib.size(); ++i) {
    if (used + open + lib.token(i).arity <= lib.max_length()) {
      mask[static_cast<size_t>(i)] = 1;
    }
  }
  return mask;
}

namespace {

// Precedence: +,- = 1; *,/ = 2; pow postfix = 3; leaves/functions = 4.
int precedence(const Token& t) {
  if (t.kind == TokenKind::BinaryOp) {
    return (t.symbol == "+" || t.symbol == "-") ? 1 : 2;
  }
  if (t.kind == TokenKind::UnaryOp && t.symbol == "pow") return 3;
  return 4;
}

void render_node(const ExprTree& tree, const TokenLibrary& lib, int idx,
                 std::string& out) {
  const ExprTree::Node& n = tree.node(idx);
  const Token& t = lib.token(n.token);
  switch (t.kind) {
    case TokenKind::Variable:
    case TokenKind::Constant:
      out += t.symbol;
      return;
    case TokenKind::UnaryOp: {
      const Token& ct = lib.token(tree.node(n.child[0]).token);
      if (t.symbol == "pow") {
        const bool parens = precedence(ct) < 4;
        if (parens) out += '(';
        render_node(tree, lib, n.child[0], out);
        if (parens) out += ')';
        out += "^2";
      } else {
        out += t.symbol;
        out += '(';
        render_node(tree, lib, n.child[0], out);
        out += ')';
      }
      return;
    }
    case TokenKind::BinaryOp: {
      const int prec = precedence(t);
      const Token& lt = lib.token(tree.node(n.child[0]).token);
      const Token& rt = lib.token(tree.node(n.child[1]).token);
      const bool lparens = precedence(lt) < prec;
      // - and / are left-associative: parenthesize an equal-precedence rhs.
      const bool strict_rhs = t.symbol == "-" || t.symbol == "/";
      const bool rparens =
          precedence(rt) < prec || (strict_rhs && precedence(rt) == prec);
      if (lparens) out += '(';
      render_node(tree, lib, n.child[0], out);
      if (lparens) out += ')';
      if (prec == 1) {
        out += ' ';
        out += t.symbol;
        out += ' ';
      } else {
        out += t.symbol;
      }
      if (rparens) out += '(';
      render_node(tree, lib, n.child[1], out);
      if (rparens) out += ')';
      return;
    }
  }
}

}  // namespace

std::string render(const ExprTree& tree, const TokenLibrary& lib) {
  std::string out;
  render_node(tree, lib, 0, out);
  return out;
}

int pair_decision(const ExprTree& tree, const TokenLibrary& lib,
                  std::span<const double> pair_features,
                  const EvalConfig& cfg) {
  if (pair_features.size() % 2 != 0) {
    throw DimensionMismatch("pair feature vector must have even length");
  }
  double score = 0.0;
  if (lib.mode() == LibraryMode::Pair) {
    score = evaluate(tree, lib, pair_features, cfg);
  } else {
    const size_t half = pair_features.size() / 2;
    const double g1 = evaluate(tree, lib, pair_features.subspan(0, half), cfg);
    const double g2 = evaluate(tree, lib, pair_features.subspan(half), cfg);
    score = g1 - g2;
  }
  return score > 0.0 ? kPreferNode1 : kPreferNode2;
}

std::vector<std::string> sequence_symbols(std::span<const int> seq,
                                          const TokenLibrary& lib) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (const int tok : seq) out.push_back(lib.token(tok).symbol);
  return out;
}

void write_expression_file(const std::string& path, const TokenLibrary& lib,
                           const std::vector<std::vector<int>>& sequences) {
  std::ofstream f(path);
  if (!f) throw ExprError("cannot open for writing: " + path);
  f << "mode=" << to_string(lib.mode()) << " max_length=" << lib.max_length()
    << "\n";
  for (const auto& seq : sequences) {
    const auto symbols = sequence_symbols(seq, lib);
    for (size_t i = 0; i < symbols.size(); ++i) {
      if (i) f << ' ';
      f << symbols[i];
    }
    f << "\n";
  }
  if (!f.good()) throw ExprError("write failed: " + path);
}

ExpressionFile read_expression_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ExprError("cannot open expression file: " + path);
  ExpressionFile out;
  std::string header;
  if (!std::getline(f, header)) {
    throw ExprError("empty expression file: " + path);
  }
  std::istringstream hs(header);
  std::string field;
  bool saw_mode = false, saw_len = false;
  while (hs >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) {
      throw ExprError("malformed expression file header: " + header);
    }
    const std::string key = field.substr(0, eq);
    const std::string val = field.substr(eq + 1);
    if (key == "mode") {
      out.mode = library_mode_from_string(val);
      saw_mode = true;
    } else if (key == "max_length") {
      out.max_length = std::stoi(val);
      saw_len = true;
    } else {
      throw ExprError("unknown expression file header key: " + key);
    }
  }
  if (!saw_mode || !saw_len) {
    throw ExprError("expression file header must name mode and max_length");
  }
  std::string line;
  while (std::getline(f, line)) {
    std::istringstream ls(line);
    std::vector<std::string> symbols;
    std::string tok;
    while (ls >> tok) symbols.push_back(tok);
    if (!symbols.empty()) out.expressions.push_back(std::move(symbols));
  }
  return out;
}

}  // namespace symbsel
