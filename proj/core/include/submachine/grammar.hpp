#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "submachine/diag.hpp"
#include "submachine/simper.hpp"

namespace submachine {

// A context-free grammar over named symbols.  In the text format terminals
// are single-quoted ('a') and nonterminals are bare identifiers (which may
// carry trailing primes: X', X''); one name is never both.  Words are
// vectors of terminal names, matching the interpreter's input convention.

struct GrammarSymbol {
  std::string name;
  bool terminal = false;

  bool operator==(const GrammarSymbol& o) const = default;
  auto operator<=>(const GrammarSymbol& o) const = default;
};

struct Production {
  std::string lhs;                  // always a nonterminal
  std::vector<GrammarSymbol> rhs;   // empty means epsilon

  bool operator==(const Production& o) const = default;
  auto operator<=>(const Production& o) const = default;
};

struct Grammar {
  // Both lists are kept in first-appearance order over the production list;
  // that order drives the symbol numbering after preprocessing.
  std::vector<std::string> nonterminals;
  std::vector<std::string> terminals;
  std::vector<Production> productions;
  std::string start;
};

// Text format: a `start: S` line, then one production per line,
// `A -> 'a' B | C 'd' | `, alternatives split on `|`, an empty alternative
// meaning epsilon.  `#` starts a line comment.  Throws ParseError on
// malformed input, on a name used both quoted and bare, and on a start
// symbol that is not a nonterminal of the grammar.
Grammar parse_grammar(std::string_view text);
std::string serialize_grammar(const Grammar& g);

// Size measure: the alphabet size plus, for every production, the length of
// its right-hand side plus one.
std::size_t grammar_size(const Grammar& g);

// Caps right-hand sides at two symbols by repeatedly splitting off the first
// symbol: A -> t1 t2 ... tn becomes A -> t1 A' and A' -> t2 ... tn, with A'
// fresh (the base name plus enough primes).  Already-short productions pass
// through unchanged, in place.
Grammar binarize(const Grammar& g);

// The nonterminals that derive the empty word: the least fixed point of
// "some production's right-hand side is all-nullable" (an empty right-hand
// side included).
std::set<std::string> nullable_set(const Grammar& g);

// A grammar ready for table parsing: no epsilon productions, right-hand
// sides of length one or two, and an injective symbol numbering that puts
// the start symbol at 0, then the remaining nonterminals, then the
// terminals, each in first appearance order.
struct PreprocessedGrammar {
  std::vector<std::string> nonterminals;  // numbering order, start first
  std::vector<std::string> terminals;     // numbered after the nonterminals
  std::vector<Production> binary;         // right-hand sides of length 2
  std::vector<Production> unary;          // length 1, terminal or nonterminal
  std::string start;
  bool nullable_start = false;  // the original grammar derived epsilon

  std::map<std::string, int> numbering;
  int symbol_count() const {
    return static_cast<int>(nonterminals.size() + terminals.size());
  }
  int number_of(const std::string& name) const { return numbering.at(name); }
};

// Epsilon elimination on a binarized grammar: whenever a right-hand side
// contains a nullable nonterminal, a copy of the production with that
// occurrence dropped is added, to a fixed point; epsilon productions are
// then removed and duplicates collapsed.  Whether the start symbol was
// nullable is recorded separately.  Throws std::invalid_argument if some
// right-hand side is longer than two symbols.
PreprocessedGrammar eliminate_epsilon(const Grammar& binarized);

// binarize + eliminate_epsilon.
PreprocessedGrammar preprocess(const Grammar& g);

// Ground-truth membership: the least fixed point of derivability claims
// (span, symbol) over the word, handling arbitrary right-hand-side lengths
// and epsilon productions directly.  Exponentially slower than a real
// parser but independent of every other layer; intended for short words.
bool reference_cyk(const Grammar& g, const std::vector<std::string>& word);

// Membership via the cubic table algorithm on a preprocessed grammar: the
// same widening loop, binary pass and bounded unary pass the generated
// program performs, written directly against the table.  The empty word is
// answered by nullable_start.
bool preprocessed_cyk(const PreprocessedGrammar& pg,
                      const std::vector<std::string>& word);

// Emits the table parser as a program: an empty-word gate (only when the
// start symbol is nullable), the table allocation, the per-terminal
// initialization pass over the word, the widening loop with one conditional
// per binary production and a bounded unary fixed-point pass, and the final
// accept check on the full span.  The program halts exactly on members of
// the language; on every other word it runs to the end of the text and
// jams.
SimperProgram generate_cyk_simper(const PreprocessedGrammar& pg);

}  // namespace submachine
