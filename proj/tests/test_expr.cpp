#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "symbsel/expr.hpp"
#include "symbsel/rng.hpp"
#include "test_util.hpp"

using namespace symbsel;

namespace {

std::vector<int> to_indices(const std::vector<std::string>& symbols,
                            const TokenLibrary& lib) {
  std::vector<int> out;
  for (const auto& s : symbols) {
    const int i = lib.index_of(s);
    REQUIRE(i >= 0);
    out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("default library layout") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair);
  CHECK(lib.size() == 7 + 40 + 4);
  CHECK(lib.num_variables() == 40);
  CHECK(lib.token(0).symbol == "+");
  CHECK(lib.token(0).arity == 2);
  CHECK(lib.index_of("pow") >= 0);
  CHECK(lib.token(lib.index_of("pow")).arity == 1);
  CHECK(lib.index_of("x40") >= 0);
  CHECK(lib.index_of("x41") == -1);
  CHECK(lib.index_of("0.2") >= 0);
  CHECK(lib.index_of("sin") == -1);

  const auto symm = TokenLibrary::make(LibraryMode::Symmetric);
  CHECK(symm.num_variables() == 20);
  CHECK(symm.size() == 7 + 20 + 4);
  CHECK(symm.fingerprint() != lib.fingerprint());

  const auto trig =
      TokenLibrary::make(LibraryMode::Pair, 10, LibraryOptions{true, false});
  CHECK(trig.index_of("sin") >= 0);
  CHECK(trig.index_of("cos") >= 0);
  const auto grid =
      TokenLibrary::make(LibraryMode::Pair, 10, LibraryOptions{false, true});
  CHECK(grid.index_of("10.0") >= 0);
}

TEST_CASE("parse_prefix builds the unique tree") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair);

  const auto t1 = parse_prefix({"+", "x19", "0.2"}, lib);
  CHECK(t1.size() == 3);
  CHECK(render(t1, lib) == "x19 + 0.2");

  const auto t2 = parse_prefix({"-", "-", "x19", "x29", "x39"}, lib);
  CHECK(render(t2, lib) == "x19 - x29 - x39");

  CHECK_THROWS_AS(parse_prefix({"+", "x1"}, lib), IncompleteSequence);
  CHECK_THROWS_AS(parse_prefix({"x1", "x2"}, lib), TrailingTokens);
  CHECK_THROWS_AS(parse_prefix({"+", "x1", "nope"}, lib), UnknownToken);
  CHECK_THROWS_AS(parse_prefix(std::vector<std::string>{}, lib),
                  IncompleteSequence);
}

TEST_CASE("to_prefix inverts parse_prefix") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair);

  const auto seq = to_indices({"+", "x19", "0.2"}, lib);
  CHECK(to_prefix(parse_prefix(seq, lib)) == seq);

  const auto leaf = to_indices({"x5"}, lib);
  CHECK(to_prefix(parse_prefix(leaf, lib)) == leaf);

  // -x16 - x26 + x6 + x9 - 0.5 encoded as ((x6 + x9) - (x16 + x26)) - 0.5
  const auto sc = to_indices(
      {"-", "-", "+", "x6", "x9", "+", "x16", "x26", "0.5"}, lib);
  CHECK(sc.size() <= 10);
  const auto tree = parse_prefix(sc, lib);
  CHECK(to_prefix(tree) == sc);
  CHECK(render(tree, lib) == "x6 + x9 - (x16 + x26) - 0.5");
}

TEST_CASE("round-trip property over random trees") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair);
  Rng rng(20240401);
  for (int i = 0; i < 10000; ++i) {
    const auto seq = test::random_sequence(rng, lib, 10);
    REQUIRE(seq.size() <= 10);
    const auto tree = parse_prefix(seq, lib);
    REQUIRE(to_prefix(tree) == seq);
  }
}

TEST_CASE("evaluate: spec examples") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair);
  std::vector<double> feats(40, 0.0);

  // x19 - x39 + 0.2 with x19 = x39 = 3.0
  feats[18] = 3.0;
  feats[38] = 3.0;
  const auto t1 = parse_prefix({"+", "-", "x19", "x39", "0.2"}, lib);
  CHECK(evaluate(t1, lib, feats) == doctest::Approx(0.2).epsilon(1e-12));

  feats[6] = 2.0;
  const auto t2 = parse_prefix({"pow", "x7"}, lib);
  CHECK(evaluate(t2, lib, feats) == doctest::Approx(4.0).epsilon(1e-12));

  feats[2] = 0.0;
  const auto t3 = parse_prefix({"log", "x3"}, lib);
  const EvalConfig cfg;
  CHECK(evaluate(t3, lib, feats) == std::log(std::abs(0.0) + cfg.eps));

  const auto t4 = parse_prefix({"x40"}, lib);
  std::vector<double> short_feats(39, 0.0);
  CHECK_THROWS_AS(evaluate(t4, lib, short_feats), DimensionMismatch);
}

TEST_CASE("evaluate matches the stack-machine oracle") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair);
  Rng rng(7);
  for (int i = 0; i < 5000; ++i) {
    const auto seq = test::random_sequence(rng, lib, 10);
    const auto tree = parse_prefix(seq, lib);
    std::vector<double> feats(40);
    for (auto& v : feats) v = rng.uniform(-10.0, 10.0);
    const double a = evaluate(tree, lib, feats);
    const double b = test::stack_eval(seq, lib, feats);
    const double denom = std::max(1.0, std::abs(b));
    CHECK(std::abs(a - b) / denom <= 1e-12);
  }
}

TEST_CASE("protected closure: no NaN or infinity on finite inputs") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair, 10,
                                      LibraryOptions{true, false});
  Rng rng(99);
  for (int i = 0; i < 20000; ++i) {
    const auto seq = test::random_sequence(rng, lib, 10);
    const auto tree = parse_prefix(seq, lib);
    std::vector<double> feats(40);
    for (auto& v : feats) {
      const int shape = rng.uniform_int(0, 3);
      if (shape == 0) {
        v = 0.0;
      } else if (shape == 1) {
        v = rng.uniform(-1e9, 1e9);
      } else if (shape == 2) {
        v = rng.uniform(-1e-12, 1e-12);
      } else {
        v = rng.uniform(-100.0, 100.0);
      }
    }
    const double v = evaluate(tree, lib, feats);
    REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("valid_next_tokens: budget arithmetic") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair, 10);

  SUBCASE("empty prefix allows everything") {
    const auto mask = valid_next_tokens(std::vector<int>{}, lib);
    for (int i = 0; i < lib.size(); ++i) CHECK(mask[i] == 1);
  }

  SUBCASE("9 tokens, one open slot: leaves only") {
    // + + + + x1 x1 x1 x1 -> wrong arity count; build explicitly:
    // chain of 4 binary ops then 4 leaves leaves 9 tokens, 1 open slot.
    std::vector<int> partial;
    const int plus = lib.index_of("+");
    const int x1 = lib.index_of("x1");
    for (int i = 0; i < 4; ++i) partial.push_back(plus);
    for (int i = 0; i < 5; ++i) partial.push_back(x1);
    // 4 ops + 5 leaves = 9 tokens; open slots = 1 + 4*1 - 5 = ... recompute:
    // open = 1; op: +1 each (4 -> open 5); leaf: -1 each (5 -> open 0).
    // That is complete. Drop last leaf to keep one slot open.
    partial.pop_back();
    REQUIRE(partial.size() == 8);
    partial.push_back(lib.index_of("log"));  // 9 tokens, still 1 slot open
    const auto mask = valid_next_tokens(partial, lib);
    for (int i = 0; i < lib.size(); ++i) {
      CHECK(static_cast<bool>(mask[i]) == (lib.token(i).arity == 0));
    }
  }

  SUBCASE("7 tokens, two open slots: binary ops excluded") {
    const int plus = lib.index_of("+");
    const int x1 = lib.index_of("x1");
    // + + + x1 x1 x1 x1 is complete; build 7 tokens with 2 open:
    // + + + x1 x1 -> open = 1+3-2 = 2, used 5; add log log -> open 2, used 7.
    std::vector<int> partial = {plus, plus, plus, x1, x1,
                                lib.index_of("log"), lib.index_of("log")};
    const auto mask = valid_next_tokens(partial, lib);
    for (int i = 0; i < lib.size(); ++i) {
      CHECK(static_cast<bool>(mask[i]) == (lib.token(i).arity <= 1));
    }
  }

  SUBCASE("complete sequence yields an all-false mask") {
    const auto mask = valid_next_tokens(to_indices({"x1"}, lib), lib);
    for (int i = 0; i < lib.size(); ++i) CHECK(mask[i] == 0);
  }
}

TEST_CASE("mask brute-force agreement on a small library") {
  // Every token the mask admits must be completable within budget; every
  // token it rejects must not be. Checked by exhaustive completion search.
  const auto lib = TokenLibrary::from_symbols(LibraryMode::Pair, 5,
                                              {"+", "log", "x1", "0.5"});

  // Depth-first search for any completion within max_length.
  auto completable = [&](std::vector<int> partial, auto&& self) -> bool {
    int open = 1;
    for (int t : partial) open += lib.token(t).arity - 1;
    if (open == 0) return true;
    if (static_cast<int>(partial.size()) >= lib.max_length()) return false;
    for (int t = 0; t < lib.size(); ++t) {
      partial.push_back(t);
      if (self(partial, self)) return true;
      partial.pop_back();
    }
    return false;
  };

  // Enumerate all partial states reachable under the mask itself.
  std::vector<std::vector<int>> frontier = {{}};
  int states = 0;
  while (!frontier.empty()) {
    const auto partial = frontier.back();
    frontier.pop_back();
    ++states;
    const auto mask = valid_next_tokens(partial, lib);
    for (int t = 0; t < lib.size(); ++t) {
      auto ext = partial;
      ext.push_back(t);
      CHECK(static_cast<bool>(mask[t]) == completable(ext, completable));
      if (mask[t]) {
        int open = 1;
        for (int tok : ext) open += lib.token(tok).arity - 1;
        if (open > 0) {
          frontier.push_back(ext);
        } else {
          CHECK(ext.size() <= static_cast<size_t>(lib.max_length()));
          CHECK_NOTHROW(parse_prefix(ext, lib));
        }
      }
    }
  }
  CHECK(states > 10);
}

TEST_CASE("mask soundness: masked sampling never fails") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair, 6);
  Rng rng(5150);
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<int> seq;
    while (true) {
      int open = 1;
      for (int t : seq) open += lib.token(t).arity - 1;
      if (open == 0) break;
      const auto mask = valid_next_tokens(seq, lib);
      std::vector<int> valid;
      for (int t = 0; t < lib.size(); ++t) {
        if (mask[t]) valid.push_back(t);
      }
      REQUIRE(!valid.empty());
      seq.push_back(valid[static_cast<size_t>(
          rng.uniform_int(0, static_cast<int>(valid.size()) - 1))]);
    }
    REQUIRE(seq.size() <= 6);
    CHECK_NOTHROW(parse_prefix(seq, lib));
  }
}

TEST_CASE("render: spec examples") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair);
  CHECK(render(parse_prefix({"-", "-", "x19", "x29", "x39"}, lib), lib) ==
        "x19 - x29 - x39");
  CHECK(render(parse_prefix({"exp", "x8"}, lib), lib) == "exp(x8)");
  // 0.5*x6*(x10*x11^2 - x8)
  const auto t = parse_prefix(
      {"*", "*", "0.5", "x6", "-", "*", "x10", "pow", "x11", "x8"}, lib);
  CHECK(render(t, lib) == "0.5*x6*(x10*x11^2 - x8)");
  // right-nested subtraction keeps parens
  CHECK(render(parse_prefix({"-", "x19", "-", "x29", "x39"}, lib), lib) ==
        "x19 - (x29 - x39)");
  CHECK(render(parse_prefix({"pow", "+", "x1", "x2"}, lib), lib) ==
        "(x1 + x2)^2");
  CHECK(render(parse_prefix({"/", "x1", "/", "x2", "x3"}, lib), lib) ==
        "x1/(x2/x3)");
}

TEST_CASE("expression file round-trip") {
  const auto lib = TokenLibrary::make(LibraryMode::Pair, 10);
  const auto dir = std::filesystem::temp_directory_path() / "symbsel_expr_t";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "exprs.txt").string();

  std::vector<std::vector<int>> seqs = {
      to_indices({"+", "x19", "0.2"}, lib),
      to_indices({"-", "-", "x19", "x29", "x39"}, lib),
  };
  write_expression_file(path, lib, seqs);

  const auto ef = read_expression_file(path);
  CHECK(ef.mode == LibraryMode::Pair);
  CHECK(ef.max_length == 10);
  REQUIRE(ef.expressions.size() == 2);
  CHECK(to_indices(ef.expressions[0], lib) == seqs[0]);
  CHECK(to_indices(ef.expressions[1], lib) == seqs[1]);

  CHECK_THROWS_AS(read_expression_file((dir / "missing.txt").string()),
                  ExprError);
  std::filesystem::remove_all(dir);
}
