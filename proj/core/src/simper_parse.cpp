#include <cctype>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "submachine/simper.hpp"

namespace submachine {

namespace {

// Keywords can never be variable or label names; everything else that looks
// like an identifier is one.
const std::set<std::string> kKeywords = {"goto",  "if",     "else", "halt",
                                         "while", "switch", "array"};

struct Token {
  std::string text;
  enum Kind { Ident, Nat, String, Punct, End } kind = End;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, col_);
  }

  char cur() const { return src_[pos_]; }
  bool done() const { return pos_ >= src_.size(); }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void advance() {
    // Skip whitespace and // comments.
    for (;;) {
      while (!done() && std::isspace(static_cast<unsigned char>(cur()))) bump();
      if (!done() && cur() == '/' && pos_ + 1 < src_.size() &&
          src_[pos_ + 1] == '/') {
        while (!done() && cur() != '\n') bump();
        continue;
      }
      break;
    }
    tok_ = Token{"", Token::End, line_, col_};
    if (done()) return;

    const char c = cur();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (!done() && (std::isalnum(static_cast<unsigned char>(cur())) ||
                         cur() == '_')) {
        tok_.text += cur();
        bump();
      }
      tok_.kind = Token::Ident;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (!done() && std::isdigit(static_cast<unsigned char>(cur()))) {
        tok_.text += cur();
        bump();
      }
      if (tok_.text.size() > 19)
        throw ParseError("number too large", tok_.line, tok_.col);
      tok_.kind = Token::Nat;
      return;
    }
    if (c == '"') {
      bump();
      while (!done() && cur() != '"' && cur() != '\n') {
        tok_.text += cur();
        bump();
      }
      if (done() || cur() != '"')
        throw ParseError("unterminated string literal", tok_.line, tok_.col);
      bump();
      tok_.kind = Token::String;
      return;
    }

    // Two-character operators first, then single punctuation.
    static const char* kTwo[] = {":=", "++", "--", "==", "!=", "&&", "||"};
    for (const char* op : kTwo) {
      if (c == op[0] && pos_ + 1 < src_.size() && src_[pos_ + 1] == op[1]) {
        tok_.text = op;
        tok_.kind = Token::Punct;
        bump();
        bump();
        return;
      }
    }
    if (std::string(":,[](){}").find(c) != std::string::npos) {
      tok_.text = std::string(1, c);
      tok_.kind = Token::Punct;
      bump();
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  SimperProgram parse() {
    SimperProgram p;
    while (lex_.peek().kind != Token::End) p.statements.push_back(statement());
    return p;
  }

 private:
  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(message, at.line, at.col);
  }

  Token expect_punct(const std::string& text) {
    Token t = lex_.take();
    if (t.kind != Token::Punct || t.text != text)
      fail(t, "expected '" + text + "', found '" + t.text + "'");
    return t;
  }

  Token expect_ident() {
    Token t = lex_.take();
    if (t.kind != Token::Ident)
      fail(t, "expected an identifier, found '" + t.text + "'");
    if (kKeywords.count(t.text))
      fail(t, "'" + t.text + "' is a keyword");
    return t;
  }

  bool peek_punct(const std::string& text) const {
    return lex_.peek().kind == Token::Punct && lex_.peek().text == text;
  }

  bool peek_keyword(const std::string& word) const {
    return lex_.peek().kind == Token::Ident && lex_.peek().text == word;
  }

  std::vector<SimperStatement> block() {
    expect_punct("{");
    std::vector<SimperStatement> body;
    while (!peek_punct("}")) {
      if (lex_.peek().kind == Token::End)
        fail(lex_.peek(), "unterminated block: expected '}'");
      body.push_back(statement());
    }
    lex_.take();
    return body;
  }

  SimperStatement statement() {
    const Token head = lex_.peek();
    SimperStatement s;
    s.line = head.line;
    s.col = head.col;

    if (peek_keyword("goto")) {
      lex_.take();
      s.kind = StmtKind::Goto;
      s.label = expect_ident().text;
      return s;
    }
    if (peek_keyword("halt")) {
      lex_.take();
      s.kind = StmtKind::Halt;
      return s;
    }
    if (peek_keyword("if")) {
      lex_.take();
      s.kind = StmtKind::If;
      s.cond = condition();
      s.block = block();
      if (peek_keyword("else")) {
        lex_.take();
        s.has_else = true;
        s.else_block = block();
      }
      return s;
    }
    if (peek_keyword("while")) {
      lex_.take();
      s.kind = StmtKind::While;
      s.cond = condition();
      s.block = block();
      return s;
    }
    if (peek_keyword("switch")) {
      lex_.take();
      s.kind = StmtKind::Switch;
      s.value = value();
      expect_punct("{");
      while (!peek_punct("}")) {
        if (lex_.peek().kind == Token::End)
          fail(lex_.peek(), "unterminated switch: expected '}'");
        SimperValueExpr arm_value = value();
        s.arms.emplace_back(std::move(arm_value), block());
      }
      lex_.take();
      return s;
    }
    if (peek_punct("++") || peek_punct("--")) {
      s.kind = lex_.take().text == "++" ? StmtKind::Inc : StmtKind::Dec;
      s.target = left_value();
      return s;
    }
    if (head.kind == Token::Ident && !kKeywords.count(head.text)) {
      // Either `name:` (a label) or an assignment through a left value.
      SimperValueExpr lv = left_value();
      if (lv.kind == ValueKind::Var && peek_punct(":")) {
        lex_.take();
        s.kind = StmtKind::Label;
        s.label = lv.name;
        if (!declared_labels_.insert(s.label).second)
          fail(head, "duplicate label '" + s.label + "'");
        return s;
      }
      expect_punct(":=");
      s.kind = StmtKind::Assign;
      s.target = std::move(lv);
      s.value = value();
      return s;
    }
    fail(head, "expected a statement, found '" + head.text + "'");
  }

  SimperValueExpr left_value() {
    Token name = expect_ident();
    SimperValueExpr v;
    v.line = name.line;
    v.col = name.col;
    v.name = name.text;
    v.kind = ValueKind::Var;
    if (peek_punct("[")) {
      v.kind = ValueKind::Index;
      lex_.take();
      v.args.push_back(value());
      while (peek_punct(",")) {
        lex_.take();
        v.args.push_back(value());
      }
      expect_punct("]");
    }
    return v;
  }

  SimperValueExpr value() {
    const Token head = lex_.peek();
    SimperValueExpr v;
    v.line = head.line;
    v.col = head.col;
    if (head.kind == Token::Nat) {
      lex_.take();
      v.kind = ValueKind::NatLit;
      v.nat = std::stoull(head.text);
      return v;
    }
    if (head.kind == Token::String) {
      lex_.take();
      v.kind = ValueKind::SymLit;
      v.sym = head.text;
      return v;
    }
    if (peek_keyword("array")) {
      lex_.take();
      v.kind = ValueKind::ArrayLit;
      expect_punct("[");
      v.args.push_back(value());
      while (peek_punct(",")) {
        lex_.take();
        v.args.push_back(value());
      }
      expect_punct("]");
      expect_punct("(");
      v.fill.push_back(value());
      expect_punct(")");
      return v;
    }
    if (head.kind == Token::Ident && !kKeywords.count(head.text))
      return left_value();
    fail(head, "expected a value, found '" + head.text + "'");
  }

  // cond := and ('||' and)*;  and := atom ('&&' atom)*;  atom := v ==/!= v.
  // No parentheses in the condition grammar; && binds tighter than ||.
  SimperCond condition() {
    SimperCond left = and_condition();
    while (peek_punct("||")) {
      Token op = lex_.take();
      SimperCond parent;
      parent.kind = CondKind::Or;
      parent.line = op.line;
      parent.col = op.col;
      parent.sub.push_back(std::move(left));
      parent.sub.push_back(and_condition());
      left = std::move(parent);
    }
    return left;
  }

  SimperCond and_condition() {
    SimperCond left = atom_condition();
    while (peek_punct("&&")) {
      Token op = lex_.take();
      SimperCond parent;
      parent.kind = CondKind::And;
      parent.line = op.line;
      parent.col = op.col;
      parent.sub.push_back(std::move(left));
      parent.sub.push_back(atom_condition());
      left = std::move(parent);
    }
    return left;
  }

  SimperCond atom_condition() {
    SimperCond c;
    c.operands.push_back(value());
    Token op = lex_.take();
    if (op.kind != Token::Punct || (op.text != "==" && op.text != "!="))
      fail(op, "expected '==' or '!=', found '" + op.text + "'");
    c.kind = op.text == "==" ? CondKind::Eq : CondKind::Neq;
    c.line = op.line;
    c.col = op.col;
    c.operands.push_back(value());
    return c;
  }

  Lexer lex_;
  std::set<std::string> declared_labels_;
};

class Renderer {
 public:
  std::string render(const SimperProgram& p) {
    block_body(p.statements, 0);
    return std::move(out_);
  }

 private:
  void line(int indent, const std::string& text) {
    out_.append(static_cast<std::size_t>(indent) * 2, ' ');
    out_ += text;
    out_ += '\n';
  }

  std::string value(const SimperValueExpr& v) {
    switch (v.kind) {
      case ValueKind::NatLit:
        return std::to_string(v.nat);
      case ValueKind::SymLit:
        return "\"" + v.sym + "\"";
      case ValueKind::Var:
        return v.name;
      case ValueKind::Index: {
        std::string out = v.name + "[";
        for (std::size_t i = 0; i < v.args.size(); ++i) {
          if (i) out += ",";
          out += value(v.args[i]);
        }
        return out + "]";
      }
      case ValueKind::ArrayLit: {
        std::string out = "array[";
        for (std::size_t i = 0; i < v.args.size(); ++i) {
          if (i) out += ",";
          out += value(v.args[i]);
        }
        return out + "](" + value(v.fill[0]) + ")";
      }
    }
    return "";
  }

  std::string condition(const SimperCond& c, bool under_and) {
    switch (c.kind) {
      case CondKind::Or:
        if (under_and)
          throw std::invalid_argument(
              "render_simper: a disjunction nested under a conjunction "
              "cannot be written without parentheses");
        return condition(c.sub[0], false) + " || " + condition(c.sub[1], false);
      case CondKind::And:
        return condition(c.sub[0], true) + " && " + condition(c.sub[1], true);
      case CondKind::Eq:
        return value(c.operands[0]) + " == " + value(c.operands[1]);
      case CondKind::Neq:
        return value(c.operands[0]) + " != " + value(c.operands[1]);
    }
    return "";
  }

  void block_body(const std::vector<SimperStatement>& body, int indent) {
    for (const SimperStatement& s : body) statement(s, indent);
  }

  void statement(const SimperStatement& s, int indent) {
    switch (s.kind) {
      case StmtKind::Label:
        line(indent, s.label + ":");
        return;
      case StmtKind::Goto:
        line(indent, "goto " + s.label);
        return;
      case StmtKind::Halt:
        line(indent, "halt");
        return;
      case StmtKind::Assign:
        line(indent, value(s.target) + " := " + value(s.value));
        return;
      case StmtKind::Inc:
        line(indent, "++" + value(s.target));
        return;
      case StmtKind::Dec:
        line(indent, "--" + value(s.target));
        return;
      case StmtKind::If:
        line(indent, "if " + condition(s.cond, false) + " {");
        block_body(s.block, indent + 1);
        if (s.has_else || !s.else_block.empty()) {
          line(indent, "} else {");
          block_body(s.else_block, indent + 1);
        }
        line(indent, "}");
        return;
      case StmtKind::While:
        line(indent, "while " + condition(s.cond, false) + " {");
        block_body(s.block, indent + 1);
        line(indent, "}");
        return;
      case StmtKind::Switch:
        line(indent, "switch " + value(s.value) + " {");
        for (const auto& arm : s.arms) {
          line(indent + 1, value(arm.first) + " {");
          block_body(arm.second, indent + 2);
          line(indent + 1, "}");
        }
        line(indent, "}");
        return;
    }
  }

  std::string out_;
};

}  // namespace

SimperProgram parse_simper(std::string_view text) {
  return Parser(text).parse();
}

std::string render_simper(const SimperProgram& p) {
  return Renderer().render(p);
}

}  // namespace submachine
