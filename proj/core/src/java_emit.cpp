#include "submachine/java_emit.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace submachine {

std::string render_rule_type(const ClassTable& ct, const InheritanceRule& r) {
  const std::string end = r.tail == RuleTail::Var ? "x" : "Z";
  if (r.body.empty()) return end;
  std::string out = ct.name(r.body[0]) + "<";
  for (std::size_t i = 1; i < r.body.size(); ++i) {
    if (i >= 2) out += "? super ";
    out += ct.name(r.body[i]);
    out += "<";
  }
  out += "? super ";
  out += end;
  out.append(r.body.size(), '>');
  return out;
}

std::string render_tower_type(const ClassTable& ct, const TypeTower& t) {
  std::vector<std::string> names;
  names.reserve(t.size());
  for (ClassId c : t) names.push_back(ct.name(c));
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += names[i];
    out += "<? super ";
  }
  out += "Z";
  out.append(names.size(), '>');
  return out;
}

std::string emit_java_interfaces(const ClassTable& ct) {
  std::ostringstream out;
  out << "interface Z {}\n";
  for (ClassId c = 0; c < static_cast<ClassId>(ct.class_count()); ++c) {
    const auto& indices = ct.rules_for(c);
    if (indices.empty()) {
      out << "interface " << ct.name(c) << "<x> {}\n";
      continue;
    }
    out << "interface " << ct.name(c) << "<x> extends";
    for (std::size_t i = 0; i < indices.size(); ++i) {
      out << (i == 0 ? "\n  " : ",\n  ")
          << render_rule_type(ct, ct.rules()[indices[i]]);
    }
    out << " {}\n";
  }
  return out.str();
}

std::string emit_query_harness(const ClassTable& ct, const SubtypeQuery& q) {
  std::ostringstream out;
  out << "class Main {\n"
      << "    " << render_tower_type(ct, q.supertype) << "\n"
      << "  doit(" << render_tower_type(ct, q.subtype)
      << " v) {return v;}\n"
      << "}\n";
  return out.str();
}

namespace {

bool is_java_identifier(const std::string& s) {
  static const std::set<std::string> keywords = {
      "abstract", "boolean", "break",  "byte",   "case",   "catch",
      "char",     "class",   "do",     "double", "else",   "extends",
      "final",    "float",   "for",    "goto",   "if",     "implements",
      "import",   "int",     "interface", "long", "native", "new",
      "package",  "private", "protected", "public", "return", "short",
      "static",   "super",   "switch", "this",   "throw",  "throws",
      "try",      "void",    "while"};
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])))
    return false;
  for (unsigned char c : s)
    if (!std::isalnum(c) && c != '_') return false;
  return !keywords.count(s);
}

}  // namespace

std::string emit_builder(const ClassTable& ct, const ReductionNaming& nm,
                         const ExtendedTm& m) {
  auto open_tower = [&](const std::vector<ClassId>& levels,
                        const std::string& end) {
    std::string out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      out += ct.name(levels[i]);
      out += "<? super ";
    }
    out += end;
    out.append(levels.size(), '>');
    return out;
  };

  // Letter methods prepend tape cells, so calling them in word order builds
  // the reversed tower the initial query expects.
  std::vector<std::string> method_names;
  std::set<std::string> used = {"start", "stop"};
  for (std::size_t a = 0; a < m.letter_count(); ++a) {
    std::string name = m.letter_name(static_cast<LetterId>(a));
    if (!is_java_identifier(name)) name = "l" + mangle_token(name);
    while (used.count(name)) name += "_";
    used.insert(name);
    method_names.push_back(name);
  }

  std::ostringstream out;
  out << "abstract class B<x> {\n"
      << "  static B<"
      << open_tower({nm.ml, nm.n, nm.hash, nm.n, nm.e, nm.e}, "Z")
      << "> start;\n"
      << "  abstract "
      << open_tower({nm.state_class(m.initial, Role::wR), nm.hash, nm.n},
                    "x")
      << " stop();\n";
  for (std::size_t a = 0; a < m.letter_count(); ++a) {
    out << "  abstract B<"
        << open_tower({nm.letter_class(static_cast<LetterId>(a)), nm.n}, "x")
        << "> " << method_names[a] << "();\n";
  }
  out << "}\n"
      << "// A word w is accepted iff the chain below compiles, e.g.:\n"
      << "//   " << open_tower({nm.e, nm.e}, "Z") << " w =\n"
      << "//     B.start";
  for (std::size_t a = 0; a < m.letter_count() && a < 2; ++a)
    out << "." << method_names[a] << "()";
  out << ".stop();\n";
  return out.str();
}

}  // namespace submachine
