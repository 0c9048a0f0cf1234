#include "submachine/java_emit.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "submachine/reduction.hpp"
#include "submachine/turing.hpp"
#include "test_util.hpp"

using namespace submachine;

namespace {

std::string strip_ws(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  return s;
}

// Splits the emitted interface file into one chunk per declaration; every
// declaration starts at column zero, continuation lines are indented.
std::vector<std::string> split_decl_chunks(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line, cur;
  while (std::getline(in, line)) {
    if (line.rfind("interface", 0) == 0) {
      if (!cur.empty()) out.push_back(cur);
      cur = line;
    } else {
      cur += "\n" + line;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// --- a shallow parser for the emitted Java subset ---------------------------
//
// Good emitters survive a round trip: parsing the declarations back must
// recover exactly the rules we started from, and parsing a rendered tower
// must recover the tower.  The grammar is tiny:
//
//   decl := "interface" NAME [ "<" "x" ">" [ "extends" type ("," type)* ] ] "{" "}"
//   type := NAME "<" [ "?" "super" ] type ">" | "x" | "Z"

std::vector<std::string> jtokenize(const std::string& src) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < src.size()) {
    unsigned char c = src[i];
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalnum(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_'))
        ++j;
      out.push_back(src.substr(i, j - i));
      i = j;
    } else {
      out.emplace_back(1, static_cast<char>(c));
      ++i;
    }
  }
  return out;
}

struct JParser {
  std::vector<std::string> toks;
  std::size_t pos = 0;

  bool done() const { return pos >= toks.size(); }
  const std::string& peek() const {
    static const std::string eof = "<eof>";
    return done() ? eof : toks[pos];
  }
  std::string take() {
    REQUIRE(!done());
    return toks[pos++];
  }
  void expect(const std::string& want) {
    std::string got = take();
    CAPTURE(want);
    REQUIRE(got == want);
  }
};

// A nested generic type flattened back into tower form: the class names
// outermost first, whether each argument position carried `? super`, and the
// end marker (x or Z).
struct FlatType {
  std::vector<std::string> names;
  std::vector<bool> arg_wrapped;  // arg_wrapped[i]: argument under names[i]
  std::string end;
};

FlatType parse_type(JParser& p) {
  FlatType f;
  for (;;) {
    std::string t = p.take();
    if (t == "x" || t == "Z") {
      f.end = t;
      break;
    }
    f.names.push_back(t);
    p.expect("<");
    bool wrapped = false;
    if (p.peek() == "?") {
      p.take();
      p.expect("super");
      wrapped = true;
    }
    f.arg_wrapped.push_back(wrapped);
  }
  for (std::size_t i = 0; i < f.names.size(); ++i) p.expect(">");
  return f;
}

struct JDecl {
  std::string name;
  std::vector<FlatType> supers;
};

std::vector<JDecl> parse_interfaces(const std::string& text) {
  JParser p{jtokenize(text)};
  std::vector<JDecl> decls;
  while (!p.done()) {
    p.expect("interface");
    JDecl d;
    d.name = p.take();
    if (d.name != "Z") {
      p.expect("<");
      p.expect("x");
      p.expect(">");
    }
    if (p.peek() == "extends") {
      p.take();
      for (;;) {
        d.supers.push_back(parse_type(p));
        if (p.peek() != ",") break;
        p.take();
      }
    }
    p.expect("{");
    p.expect("}");
    decls.push_back(d);
  }
  return decls;
}

ClassTable example_table() {
  return parse_class_table(testutil::read_fixture("example1.ct"));
}

std::vector<LetterId> word(const ExtendedTm& m, const std::string& letters) {
  std::vector<LetterId> out;
  for (char c : letters) out.push_back(*m.find_letter(std::string(1, c)));
  return out;
}

}  // namespace

TEST_CASE("render_rule_type: first argument direct, the rest super-wrapped") {
  ClassTable ct;
  ClassId a = ct.intern("A");
  ClassId l = ct.intern("L");
  ClassId n = ct.intern("N");
  ClassId e = ct.intern("E");

  auto render = [&](std::vector<ClassId> body, RuleTail tail) {
    return render_rule_type(ct, InheritanceRule{a, std::move(body), tail});
  };
  CHECK(render({l, n, a, l, n}, RuleTail::Var) ==
        "L<N<? super A<? super L<? super N<? super x>>>>>");
  CHECK(render({e, e}, RuleTail::Ground) == "E<E<? super Z>>");
  CHECK(render({l, n}, RuleTail::Var) == "L<N<? super x>>");
  CHECK(render({l}, RuleTail::Var) == "L<? super x>");
  CHECK(render({}, RuleTail::Ground) == "Z");
}

TEST_CASE("render_tower_type: every level super-wrapped down to Z") {
  ClassTable ct = example_table();
  CHECK(render_tower_type(ct, parse_tower(ct, "Qr E E Z")) ==
        "Qr<? super E<? super E<? super Z>>>");
  CHECK(render_tower_type(ct, parse_tower(ct, "Z")) == "Z");
  CHECK(render_tower_type(ct, parse_tower(ct, "E E Z")) ==
        "E<? super E<? super Z>>");
}

TEST_CASE("emitted interfaces for the shuttle table match the known source") {
  // The shuttle table in Java, declaration by declaration.  The emitter
  // orders declarations by class id, so compare as whitespace-blind sets.
  const std::set<std::string> expected = {
      "interfaceZ{}",
      "interfaceN<x>{}",
      "interfaceL<x>{}",
      "interfaceQlr<x>{}",
      "interfaceQrl<x>{}",
      "interfaceE<x>extends"
      "Qlr<N<?superQr<?superE<?superE<?superx>>>>>,"
      "Qrl<N<?superQl<?superE<?superE<?superx>>>>>{}",
      "interfaceQl<x>extends"
      "L<N<?superQl<?superL<?superN<?superx>>>>>,"
      "E<Qlr<?superN<?superx>>>{}",
      "interfaceQr<x>extends"
      "L<N<?superQr<?superL<?superN<?superx>>>>>,"
      "E<Qrl<?superN<?superx>>>{}",
  };
  std::set<std::string> got;
  for (const std::string& chunk : split_decl_chunks(
           emit_java_interfaces(example_table())))
    got.insert(strip_ws(chunk));
  CHECK(got == expected);
}

TEST_CASE("query harness: parameter is the subtype, result the supertype") {
  ClassTable ct = example_table();
  SubtypeQuery q{parse_tower(ct, "Qr E E Z"),
                 parse_tower(ct, "L N L N L N E E Z")};
  CHECK(strip_ws(emit_query_harness(ct, q)) ==
        "classMain{"
        "L<?superN<?superL<?superN<?superL<?superN<?super"
        "E<?superE<?superZ>>>>>>>>"
        "doit(Qr<?superE<?superE<?superZ>>>v){returnv;}"
        "}");

  // The trivial query renders bare Z on both sides.
  SubtypeQuery zz{parse_tower(ct, "Z"), parse_tower(ct, "Z")};
  CHECK(emit_query_harness(ct, zz) ==
        "class Main {\n"
        "    Z\n"
        "  doit(Z v) {return v;}\n"
        "}\n");
}

TEST_CASE("builder: start seed, prepending letter methods, closing stop") {
  ExtendedTm m = parse_etm(
      "states: start\n"
      "initial: start\n"
      "halt: start\n"
      "alphabet: a b c\n");
  Reduction red = etm_to_classtable(m);
  CHECK(emit_builder(red.table, red.naming, m) ==
        "abstract class B<x> {\n"
        "  static B<ML<? super N<? super L_hash<? super N<? super "
        "E<? super E<? super Z>>>>>>> start;\n"
        "  abstract QwR_start<? super L_hash<? super N<? super x>>> "
        "stop();\n"
        "  abstract B<L_a<? super N<? super x>>> a();\n"
        "  abstract B<L_b<? super N<? super x>>> b();\n"
        "  abstract B<L_c<? super N<? super x>>> c();\n"
        "}\n"
        "// A word w is accepted iff the chain below compiles, e.g.:\n"
        "//   E<? super E<? super Z>> w =\n"
        "//     B.start.a().b().stop();\n");
}

TEST_CASE("builder: call chains assemble exactly the initial query type") {
  // Textually substituting each method's x argument reproduces the rendered
  // subtype tower of the initial query, which is what makes the chain
  // `B.start.<letters>.stop()` equivalent to asking the query in source.
  ExtendedTm m = parse_etm(
      "states: start\n"
      "initial: start\n"
      "halt: start\n"
      "alphabet: a b c\n");
  Reduction red = etm_to_classtable(m);
  std::string text = emit_builder(red.table, red.naming, m);

  auto extract = [&](const std::string& prefix, const std::string& suffix) {
    std::size_t e = text.find(suffix);
    REQUIRE(e != std::string::npos);
    std::size_t b = text.rfind(prefix, e);
    REQUIRE(b != std::string::npos);
    b += prefix.size();
    return text.substr(b, e - b);
  };
  std::string cur = extract("static B<", "> start;");
  const std::string stop_type = extract("abstract ", " stop();");
  auto call = [&](const std::string& method) {
    std::string t =
        extract("abstract B<", "> " + method + "();");
    std::size_t hole = t.find("? super x");
    REQUIRE(hole != std::string::npos);
    REQUIRE(t.find("? super x", hole + 1) == std::string::npos);
    cur = t.replace(hole + 8, 1, cur);
  };
  call("a");
  call("b");
  std::string final_type = stop_type;
  std::size_t hole = final_type.find("? super x");
  REQUIRE(hole != std::string::npos);
  final_type.replace(hole + 8, 1, cur);

  // Letter methods prepend cells, so calling a() then b() spells "ab".
  SubtypeQuery q = initial_query(m, red.naming, word(m, "ab"));
  CHECK(final_type == render_tower_type(red.table, q.subtype));
  CHECK(extract("//   ", " w =") == render_tower_type(red.table, q.supertype));
}

TEST_CASE("builder: method names dodge keywords, digits and collisions") {
  ExtendedTm m = parse_etm(
      "states: q\n"
      "initial: q\n"
      "halt: q\n"
      "alphabet: 0 stop class\n");
  Reduction red = etm_to_classtable(m);
  std::string text = emit_builder(red.table, red.naming, m);
  CHECK(text.find("> l0();") != std::string::npos);
  CHECK(text.find("> stop_();") != std::string::npos);
  CHECK(text.find("> lclass();") != std::string::npos);
  CHECK(text.find("abstract B<L_0<? super N<? super x>>> l0();") !=
        std::string::npos);
}

TEST_CASE("emitted declarations parse back to the identical rule set") {
  ExtendedTm m = parse_etm(testutil::read_fixture("counter.tm"));
  Reduction red = etm_to_classtable(m);
  const ClassTable& ct = red.table;

  std::vector<JDecl> decls = parse_interfaces(emit_java_interfaces(ct));
  REQUIRE(decls.size() == ct.class_count() + 1);
  CHECK(decls.front().name == "Z");
  CHECK(decls.front().supers.empty());

  std::multiset<std::string> recovered, expected;
  for (const JDecl& d : decls) {
    if (d.name == "Z") continue;
    for (const FlatType& f : d.supers) {
      if (!f.names.empty()) {
        // The one unwrapped position is the first argument, and only while
        // a body class occupies it.
        CHECK(f.arg_wrapped[0] == (f.names.size() == 1));
        for (std::size_t i = 1; i < f.names.size(); ++i)
          CHECK(f.arg_wrapped[i]);
      }
      std::string rule = d.name + " x <:";
      for (const std::string& n : f.names) rule += " " + n;
      rule += f.end == "x" ? " x" : " Z";
      recovered.insert(rule);
    }
  }
  for (const InheritanceRule& r : ct.rules()) expected.insert(ct.render_rule(r));
  CHECK(recovered == expected);
}

TEST_CASE("rendered towers parse back to the same tower") {
  ClassTable ct = example_table();
  TypeTower t = parse_tower(ct, "Qr E E Z");
  JParser p{jtokenize(render_tower_type(ct, t))};
  FlatType f = parse_type(p);
  CHECK(p.done());
  REQUIRE(f.names.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(f.names[i] == ct.name(t[i]));
  for (std::size_t i = 0; i < f.names.size(); ++i) CHECK(f.arg_wrapped[i]);
  CHECK(f.end == "Z");
}
