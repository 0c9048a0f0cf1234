#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "submachine/grammar.hpp"

namespace submachine {

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Tracks terminal/nonterminal classification while productions are read, so
// that a name used both quoted and bare is caught at the offending line.
class SymbolRegistry {
 public:
  void add(const GrammarSymbol& s, int line, int col) {
    auto [it, fresh] = kind_.emplace(s.name, s.terminal);
    if (!fresh && it->second != s.terminal)
      throw ParseError("symbol '" + s.name +
                           "' is used both quoted and bare; a name is either "
                           "a terminal or a nonterminal",
                       line, col);
    if (fresh) (s.terminal ? terminals_ : nonterminals_).push_back(s.name);
  }

  const std::vector<std::string>& nonterminals() const { return nonterminals_; }
  const std::vector<std::string>& terminals() const { return terminals_; }

 private:
  std::map<std::string, bool> kind_;
  std::vector<std::string> nonterminals_;
  std::vector<std::string> terminals_;
};

}  // namespace

Grammar parse_grammar(std::string_view text) {
  Grammar g;
  SymbolRegistry registry;
  bool saw_start = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;

    if (std::size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);

    // Tokenize the line: quoted terminals, bare nonterminals (with optional
    // trailing primes), the arrow, and the alternative separator.
    struct Tok {
      std::string text;
      enum Kind { Name, Quoted, Arrow, Bar, Colon } kind;
      int col;
    };
    std::vector<Tok> toks;
    for (std::size_t i = 0; i < line.size();) {
      char c = line[i];
      int col = static_cast<int>(i) + 1;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
        toks.push_back({"->", Tok::Arrow, col});
        i += 2;
        continue;
      }
      if (c == '|') {
        toks.push_back({"|", Tok::Bar, col});
        ++i;
        continue;
      }
      if (c == ':') {
        toks.push_back({":", Tok::Colon, col});
        ++i;
        continue;
      }
      if (c == '\'') {
        std::size_t close = line.find('\'', i + 1);
        if (close == std::string::npos || close == i + 1)
          throw ParseError("malformed quoted terminal", line_no, col);
        toks.push_back({line.substr(i + 1, close - i - 1), Tok::Quoted, col});
        i = close + 1;
        continue;
      }
      if (is_name_start(c)) {
        std::size_t j = i + 1;
        while (j < line.size() && is_name_char(line[j])) ++j;
        while (j < line.size() && line[j] == '\'') ++j;  // primes: X', X''
        toks.push_back({line.substr(i, j - i), Tok::Name, col});
        i = j;
        continue;
      }
      throw ParseError(std::string("unexpected character '") + c + "'",
                       line_no, col);
    }
    if (toks.empty()) continue;

    if (!saw_start) {
      if (toks.size() != 3 || toks[0].text != "start" ||
          toks[1].kind != Tok::Colon || toks[2].kind != Tok::Name)
        throw ParseError("expected 'start: <nonterminal>' first", line_no,
                         toks[0].col);
      g.start = toks[2].text;
      registry.add({g.start, false}, line_no, toks[2].col);
      saw_start = true;
      continue;
    }

    if (toks.size() < 2 || toks[0].kind != Tok::Name ||
        toks[1].kind != Tok::Arrow)
      throw ParseError("expected '<nonterminal> -> ...'", line_no,
                       toks[0].col);
    registry.add({toks[0].text, false}, line_no, toks[0].col);

    // Split the remainder on '|'; an empty alternative is epsilon.
    std::vector<GrammarSymbol> rhs;
    auto flush = [&] {
      g.productions.push_back({toks[0].text, std::move(rhs)});
      rhs.clear();
    };
    for (std::size_t t = 2; t < toks.size(); ++t) {
      const Tok& tok = toks[t];
      if (tok.kind == Tok::Bar) {
        flush();
        continue;
      }
      if (tok.kind == Tok::Name || tok.kind == Tok::Quoted) {
        GrammarSymbol s{tok.text, tok.kind == Tok::Quoted};
        registry.add(s, line_no, tok.col);
        rhs.push_back(std::move(s));
        continue;
      }
      throw ParseError("unexpected '" + tok.text + "' in production",
                       line_no, tok.col);
    }
    flush();
  }

  if (!saw_start) throw ParseError("missing 'start:' line", line_no, 1);
  g.nonterminals = registry.nonterminals();
  g.terminals = registry.terminals();
  return g;
}

std::string serialize_grammar(const Grammar& g) {
  std::string out = "start: " + g.start + "\n";
  for (const Production& p : g.productions) {
    out += p.lhs + " ->";
    for (const GrammarSymbol& s : p.rhs) {
      out += ' ';
      out += s.terminal ? "'" + s.name + "'" : s.name;
    }
    out += '\n';
  }
  return out;
}

std::size_t grammar_size(const Grammar& g) {
  std::size_t size = g.terminals.size();
  for (const Production& p : g.productions) size += p.rhs.size() + 1;
  return size;
}

Grammar binarize(const Grammar& g) {
  std::set<std::string> taken(g.nonterminals.begin(), g.nonterminals.end());
  taken.insert(g.terminals.begin(), g.terminals.end());
  auto fresh = [&taken](const std::string& base) {
    std::string name = base + "'";
    while (taken.count(name)) name += "'";
    taken.insert(name);
    return name;
  };

  Grammar out;
  out.start = g.start;
  for (const Production& p : g.productions) {
    Production cur = p;
    while (cur.rhs.size() > 2) {
      std::string helper = fresh(cur.lhs);
      out.productions.push_back(
          {cur.lhs, {cur.rhs[0], GrammarSymbol{helper, false}}});
      cur.lhs = helper;
      cur.rhs.erase(cur.rhs.begin());
    }
    out.productions.push_back(std::move(cur));
  }

  // Rebuild the symbol lists in first-appearance order (start first), so the
  // helper nonterminals slot in next to the productions that introduced them.
  SymbolRegistry registry;
  registry.add({out.start, false}, 0, 0);
  for (const Production& p : out.productions) {
    registry.add({p.lhs, false}, 0, 0);
    for (const GrammarSymbol& s : p.rhs) registry.add(s, 0, 0);
  }
  out.nonterminals = registry.nonterminals();
  out.terminals = registry.terminals();
  return out;
}

std::set<std::string> nullable_set(const Grammar& g) {
  std::set<std::string> nullable;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Production& p : g.productions) {
      if (nullable.count(p.lhs)) continue;
      bool all = true;
      for (const GrammarSymbol& s : p.rhs)
        if (s.terminal || !nullable.count(s.name)) {
          all = false;
          break;
        }
      if (all) {
        nullable.insert(p.lhs);
        changed = true;
      }
    }
  }
  return nullable;
}

PreprocessedGrammar eliminate_epsilon(const Grammar& binarized) {
  for (const Production& p : binarized.productions)
    if (p.rhs.size() > 2)
      throw std::invalid_argument(
          "eliminate_epsilon: right-hand side longer than two symbols; "
          "binarize first");

  std::set<std::string> nullable = nullable_set(binarized);

  // Close over single-occurrence drops of nullable nonterminals, keeping
  // discovery order for a deterministic layout and a set for deduplication.
  std::vector<Production> ordered;
  std::set<Production> seen;
  std::deque<std::size_t> work;
  auto add = [&](Production p) {
    if (seen.insert(p).second) {
      ordered.push_back(std::move(p));
      work.push_back(ordered.size() - 1);
    }
  };
  for (const Production& p : binarized.productions) add(p);
  while (!work.empty()) {
    Production p = ordered[work.front()];
    work.pop_front();
    for (std::size_t i = 0; i < p.rhs.size(); ++i) {
      if (p.rhs[i].terminal || !nullable.count(p.rhs[i].name)) continue;
      Production dropped = p;
      dropped.rhs.erase(dropped.rhs.begin() +
                        static_cast<std::ptrdiff_t>(i));
      add(std::move(dropped));
    }
  }

  PreprocessedGrammar pg;
  pg.start = binarized.start;
  pg.nullable_start = nullable.count(binarized.start) != 0;
  for (const Production& p : ordered) {
    if (p.rhs.size() == 2)
      pg.binary.push_back(p);
    else if (p.rhs.size() == 1)
      pg.unary.push_back(p);
    // Epsilon productions are dropped; nullable_start remembers the start.
  }

  // Numbering: the start symbol, the other nonterminals, then the terminals,
  // in the order the symbol lists carry (first appearance).
  pg.nonterminals.push_back(binarized.start);
  for (const std::string& n : binarized.nonterminals)
    if (n != binarized.start) pg.nonterminals.push_back(n);
  pg.terminals = binarized.terminals;
  int next = 0;
  for (const std::string& n : pg.nonterminals) pg.numbering[n] = next++;
  for (const std::string& t : pg.terminals) pg.numbering[t] = next++;
  return pg;
}

PreprocessedGrammar preprocess(const Grammar& g) {
  return eliminate_epsilon(binarize(g));
}

bool reference_cyk(const Grammar& g, const std::vector<std::string>& word) {
  const int n = static_cast<int>(word.size());
  std::set<std::string> terminals(g.terminals.begin(), g.terminals.end());

  // claims[i][j] holds every symbol known to derive word[i..j).
  std::vector<std::vector<std::set<std::string>>> claims(
      n + 1, std::vector<std::set<std::string>>(n + 1));
  for (int i = 0; i < n; ++i)
    if (terminals.count(word[i])) claims[i][i + 1].insert(word[i]);

  bool changed = true;
  while (changed) {
    changed = false;
    for (const Production& p : g.productions) {
      for (int i = 0; i <= n; ++i) {
        for (int j = i; j <= n; ++j) {
          if (claims[i][j].count(p.lhs)) continue;
          // Can the right-hand side be split across [i, j)?
          std::set<int> reach = {i};
          for (const GrammarSymbol& s : p.rhs) {
            std::set<int> next;
            for (int k : reach)
              for (int m = k; m <= n; ++m)
                if (claims[k][m].count(s.name)) next.insert(m);
            reach = std::move(next);
            if (reach.empty()) break;
          }
          if (reach.count(j)) {
            claims[i][j].insert(p.lhs);
            changed = true;
          }
        }
      }
    }
  }
  return claims[0][n].count(g.start) != 0;
}

bool preprocessed_cyk(const PreprocessedGrammar& pg,
                      const std::vector<std::string>& word) {
  const int n = static_cast<int>(word.size());
  if (n == 0) return pg.nullable_start;

  const int symbols = pg.symbol_count();
  const int rounds = static_cast<int>(pg.nonterminals.size());
  std::vector<char> table(
      static_cast<std::size_t>(n + 1) * (n + 1) * symbols, 0);
  auto cell = [&](int i, int j, int s) -> char& {
    return table[(static_cast<std::size_t>(i) * (n + 1) + j) * symbols + s];
  };

  for (int i = 0; i < n; ++i) {
    auto it = pg.numbering.find(word[i]);
    if (it != pg.numbering.end()) cell(i, i + 1, it->second) = 1;
  }

  for (int k = 1; k <= n; ++k) {
    for (int i = 0; i + k <= n; ++i)
      for (int j = i + 1; j < i + k; ++j)
        for (const Production& p : pg.binary)
          if (cell(i, j, pg.number_of(p.rhs[0].name)) &&
              cell(j, i + k, pg.number_of(p.rhs[1].name)))
            cell(i, i + k, pg.number_of(p.lhs)) = 1;
    for (int i = 0; i + k <= n; ++i)
      for (int round = 0; round < rounds; ++round)
        for (const Production& p : pg.unary)
          if (cell(i, i + k, pg.number_of(p.rhs[0].name)))
            cell(i, i + k, pg.number_of(p.lhs)) = 1;
  }
  return cell(0, n, pg.number_of(pg.start)) != 0;
}

}  // namespace submachine
