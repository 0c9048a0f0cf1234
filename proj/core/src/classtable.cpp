#include "submachine/classtable.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace submachine {

namespace {

bool valid_class_name(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

struct Token {
  std::string text;
  int col = 0;  // 1-based
};

std::vector<Token> tokenize_line(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start + 1)});
  }
  return out;
}

}  // namespace

const std::vector<std::size_t> ClassTable::kNoRules;

ClassId ClassTable::intern(std::string_view name) {
  if (name == "Z" || name == "x")
    throw std::invalid_argument("reserved name cannot be a class: " +
                                std::string(name));
  if (!valid_class_name(name))
    throw std::invalid_argument("invalid class name: " + std::string(name));
  auto key = std::string(name);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  ClassId id = static_cast<ClassId>(names_.size());
  names_.push_back(key);
  ids_.emplace(std::move(key), id);
  rules_by_lhs_.emplace_back();
  return id;
}

std::optional<ClassId> ClassTable::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& ClassTable::name(ClassId id) const {
  return names_.at(static_cast<std::size_t>(id));
}

void ClassTable::add_rule(ClassId lhs, std::vector<ClassId> body, RuleTail tail) {
  if (lhs < 0 || static_cast<std::size_t>(lhs) >= names_.size())
    throw std::invalid_argument("rule lhs is not an interned class");
  for (ClassId c : body)
    if (c < 0 || static_cast<std::size_t>(c) >= names_.size())
      throw std::invalid_argument("rule body mentions a non-interned class");
  if (body.empty() && tail == RuleTail::Var)
    throw std::invalid_argument("trivial rule `" + name(lhs) +
                                " x <: x` is not representable");
  // Single instantiation: at most one rule per (lhs, head) arc, where an
  // empty ground body counts as the head "Z".
  for (std::size_t ri : rules_for(lhs)) {
    const InheritanceRule& prev = rules_[ri];
    bool prev_empty = prev.body.empty();
    bool cur_empty = body.empty();
    if ((prev_empty && cur_empty) ||
        (!prev_empty && !cur_empty && prev.body[0] == body[0]))
      throw std::invalid_argument(
          "duplicate (lhs, head) arc: " + name(lhs) + " -> " +
          (cur_empty ? std::string("Z") : name(body[0])));
  }
  rules_by_lhs_[static_cast<std::size_t>(lhs)].push_back(rules_.size());
  rules_.push_back({lhs, std::move(body), tail});
}

const std::vector<std::size_t>& ClassTable::rules_for(ClassId lhs) const {
  if (lhs < 0 || static_cast<std::size_t>(lhs) >= rules_by_lhs_.size())
    return kNoRules;
  return rules_by_lhs_[static_cast<std::size_t>(lhs)];
}

std::string ClassTable::render_rule(const InheritanceRule& r) const {
  std::string out = name(r.lhs) + " x <:";
  for (ClassId c : r.body) out += " " + name(c);
  out += (r.tail == RuleTail::Var) ? " x" : " Z";
  return out;
}

bool ClassTable::operator==(const ClassTable& other) const {
  if (rules_.size() != other.rules_.size()) return false;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (render_rule(rules_[i]) != other.render_rule(other.rules_[i]))
      return false;
  return true;
}

// --- text format -------------------------------------------------------------

ClassTable parse_class_table(std::string_view text) {
  ClassTable ct;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    auto toks = tokenize_line(line);
    if (toks.empty()) continue;
    if (toks.size() < 4)
      throw ParseError("expected `LHS x <: ... x|Z`", lineno, toks[0].col);
    const auto& lhs_tok = toks[0];
    if (lhs_tok.text == "Z" || lhs_tok.text == "x" ||
        !valid_class_name(lhs_tok.text))
      throw ParseError("invalid rule lhs `" + lhs_tok.text + "`", lineno,
                       lhs_tok.col);
    if (toks[1].text != "x")
      throw ParseError("expected `x` after rule lhs", lineno, toks[1].col);
    if (toks[2].text != "<:")
      throw ParseError("expected `<:`", lineno, toks[2].col);
    const auto& tail_tok = toks.back();
    RuleTail tail;
    if (tail_tok.text == "x")
      tail = RuleTail::Var;
    else if (tail_tok.text == "Z")
      tail = RuleTail::Ground;
    else
      throw ParseError("rule must end in `x` or `Z`", lineno, tail_tok.col);
    ClassId lhs = ct.intern(lhs_tok.text);
    std::vector<ClassId> body;
    for (std::size_t i = 3; i + 1 < toks.size(); ++i) {
      const auto& t = toks[i];
      if (t.text == "Z" || t.text == "x")
        throw ParseError("`" + t.text + "` may only terminate a rule", lineno,
                         t.col);
      if (!valid_class_name(t.text))
        throw ParseError("invalid class name `" + t.text + "`", lineno, t.col);
      body.push_back(ct.intern(t.text));
    }
    try {
      ct.add_rule(lhs, std::move(body), tail);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno, lhs_tok.col);
    }
  }
  return ct;
}

std::string serialize_class_table(const ClassTable& ct) {
  std::string out;
  for (const auto& r : ct.rules()) {
    out += ct.render_rule(r);
    out += '\n';
  }
  return out;
}

TypeTower parse_tower(ClassTable& ct, std::string_view text) {
  auto toks = tokenize_line(std::string(text));
  if (toks.empty()) throw ParseError("empty tower; expected at least `Z`", 1, 1);
  if (toks.back().text != "Z")
    throw ParseError("tower must end in `Z`", 1, toks.back().col);
  TypeTower tower;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t.text == "Z" || t.text == "x")
      throw ParseError("`" + t.text + "` cannot appear inside a tower", 1,
                       t.col);
    if (!valid_class_name(t.text))
      throw ParseError("invalid class name `" + t.text + "`", 1, t.col);
    tower.push_back(ct.intern(t.text));
  }
  return tower;
}

std::string render_tower(const ClassTable& ct, const TypeTower& t) {
  std::string out;
  for (ClassId c : t) {
    out += ct.name(c);
    out += ' ';
  }
  out += 'Z';
  return out;
}

// --- validation --------------------------------------------------------------

ValidationReport validate_well_formed(const ClassTable& ct) {
  ValidationReport rep;
  for (const auto& r : ct.rules()) {
    if (r.tail == RuleTail::Var && r.body.size() % 2 == 0) {
      rep.well_formed = false;
      rep.diagnostics.push_back(
          {ct.render_rule(r), "variable-tail rule body has even length " +
                                  std::to_string(r.body.size()) +
                                  "; it must be odd"});
    }
  }
  return rep;
}

std::vector<std::vector<ClassId>> inheritance_graph(const ClassTable& ct) {
  std::vector<std::vector<ClassId>> graph(ct.class_count());
  for (const auto& r : ct.rules())
    if (!r.body.empty())
      graph[static_cast<std::size_t>(r.lhs)].push_back(r.body[0]);
  return graph;
}

namespace {

// Renders a walk "A -> B -> C".
std::string render_walk(const ClassTable& ct, const std::vector<ClassId>& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += " -> ";
    out += ct.name(w[i]);
  }
  return out;
}

// Enumerates up to `limit` distinct walks from s to t in an acyclic graph.
std::vector<std::vector<ClassId>> enumerate_walks(
    const std::vector<std::vector<ClassId>>& graph, ClassId s, ClassId t,
    std::size_t limit) {
  std::vector<std::vector<ClassId>> found;
  std::vector<ClassId> path{s};
  std::function<void(ClassId)> go = [&](ClassId u) {
    if (found.size() >= limit) return;
    if (u == t && path.size() > 1) {
      found.push_back(path);
      return;  // acyclic: no walk continues through t back to t
    }
    for (ClassId v : graph[static_cast<std::size_t>(u)]) {
      path.push_back(v);
      go(v);
      path.pop_back();
    }
  };
  // A nonempty walk s -> t; when s == t acyclicity makes this impossible,
  // and the caller never asks in that case.
  for (ClassId v : graph[static_cast<std::size_t>(s)]) {
    path.push_back(v);
    go(v);
    path.pop_back();
  }
  return found;
}

}  // namespace

ValidationReport validate_deterministic(const ClassTable& ct) {
  ValidationReport rep;
  const std::size_t n = ct.class_count();
  auto graph = inheritance_graph(ct);

  // Cycle detection: iterative DFS with white/gray/black coloring.
  std::vector<int> color(n, 0);
  std::vector<ClassId> parent(n, -1);
  std::vector<ClassId> cycle;
  for (std::size_t s = 0; s < n && cycle.empty(); ++s) {
    if (color[s] != 0) continue;
    std::vector<std::pair<ClassId, std::size_t>> stack{
        {static_cast<ClassId>(s), 0}};
    color[s] = 1;
    while (!stack.empty() && cycle.empty()) {
      auto& [u, next] = stack.back();
      if (next < graph[static_cast<std::size_t>(u)].size()) {
        ClassId v = graph[static_cast<std::size_t>(u)][next++];
        if (color[static_cast<std::size_t>(v)] == 0) {
          color[static_cast<std::size_t>(v)] = 1;
          parent[static_cast<std::size_t>(v)] = u;
          stack.emplace_back(v, 0);
        } else if (color[static_cast<std::size_t>(v)] == 1) {
          cycle.push_back(v);
          for (ClassId w = u; w != v && w != -1;
               w = parent[static_cast<std::size_t>(w)])
            cycle.push_back(w);
          std::reverse(cycle.begin(), cycle.end());
          cycle.push_back(v);  // close the loop for display
        }
      } else {
        color[static_cast<std::size_t>(u)] = 2;
        stack.pop_back();
      }
    }
  }
  if (!cycle.empty()) {
    rep.acyclic = false;
    rep.deterministic = false;
    rep.diagnostics.push_back(
        {render_walk(ct, cycle), "inheritance graph contains a cycle"});
    return rep;
  }

  // Topological order (Kahn).
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& outs : graph)
    for (ClassId v : outs) ++indeg[static_cast<std::size_t>(v)];
  std::vector<ClassId> topo;
  topo.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) topo.push_back(static_cast<ClassId>(i));
  for (std::size_t i = 0; i < topo.size(); ++i)
    for (ClassId v : graph[static_cast<std::size_t>(topo[i])])
      if (--indeg[static_cast<std::size_t>(v)] == 0) topo.push_back(v);

  // Walk counting per start node, counts capped (we only care about >= 2).
  std::vector<std::uint32_t> count(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(count.begin(), count.end(), 0u);
    count[s] = 1;  // the empty walk
    for (ClassId u : topo) {
      std::uint32_t cu = count[static_cast<std::size_t>(u)];
      if (cu == 0) continue;
      for (ClassId v : graph[static_cast<std::size_t>(u)])
        count[static_cast<std::size_t>(v)] =
            std::min<std::uint32_t>(3, count[static_cast<std::size_t>(v)] + cu);
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s || count[t] < 2) continue;
      rep.deterministic = false;
      auto walks = enumerate_walks(graph, static_cast<ClassId>(s),
                                   static_cast<ClassId>(t), 2);
      std::string detail = "multiple walks share endpoints";
      if (walks.size() == 2)
        detail += ": " + render_walk(ct, walks[0]) + "  vs  " +
                  render_walk(ct, walks[1]);
      rep.diagnostics.push_back(
          {ct.name(static_cast<ClassId>(s)) + " => " +
               ct.name(static_cast<ClassId>(t)),
           detail});
    }
  }
  return rep;
}

ValidationReport validate(const ClassTable& ct) {
  ValidationReport wf = validate_well_formed(ct);
  ValidationReport det = validate_deterministic(ct);
  ValidationReport rep;
  rep.well_formed = wf.well_formed;
  rep.deterministic = det.deterministic;
  rep.acyclic = det.acyclic;
  rep.diagnostics = std::move(wf.diagnostics);
  rep.diagnostics.insert(rep.diagnostics.end(), det.diagnostics.begin(),
                         det.diagnostics.end());
  return rep;
}

// --- chain search ------------------------------------------------------------

std::vector<ChainResult> chain_search(const ClassTable& ct, ClassId from,
                                      ClassId target) {
  std::vector<ChainResult> out;
  if (from < 0 || static_cast<std::size_t>(from) >= ct.class_count())
    return out;
  std::vector<char> on_path(ct.class_count(), 0);

  std::vector<ClassId> suffix;
  std::vector<std::size_t> applied;
  std::function<void(ClassId, RuleTail)> go = [&](ClassId head, RuleTail tail) {
    if (head == target) out.push_back({target, suffix, tail, applied});
    on_path[static_cast<std::size_t>(head)] = 1;
    for (std::size_t ri : ct.rules_for(head)) {
      const InheritanceRule& r = ct.rules()[ri];
      if (r.body.empty()) continue;  // `H x <: Z` ends at bare Z; no new head
      ClassId nh = r.body[0];
      if (on_path[static_cast<std::size_t>(nh)]) continue;  // cycle guard
      std::vector<ClassId> saved_suffix = suffix;
      RuleTail saved_tail = tail;
      std::vector<ClassId> rest(r.body.begin() + 1, r.body.end());
      if (r.tail == RuleTail::Ground) {
        // Ground rule: the old suffix (and the eventual tail) is cut away.
        suffix = std::move(rest);
        tail = RuleTail::Ground;
      } else {
        rest.insert(rest.end(), suffix.begin(), suffix.end());
        suffix = std::move(rest);
      }
      applied.push_back(ri);
      go(nh, tail);
      applied.pop_back();
      suffix = std::move(saved_suffix);
      tail = saved_tail;
    }
    on_path[static_cast<std::size_t>(head)] = 0;
  };
  go(from, RuleTail::Var);
  return out;
}

bool derives_bare_z(const ClassTable& ct, ClassId from) {
  if (from < 0 || static_cast<std::size_t>(from) >= ct.class_count())
    return false;
  std::vector<char> seen(ct.class_count(), 0);
  std::vector<ClassId> stack{from};
  seen[static_cast<std::size_t>(from)] = 1;
  while (!stack.empty()) {
    ClassId u = stack.back();
    stack.pop_back();
    for (std::size_t ri : ct.rules_for(u)) {
      const InheritanceRule& r = ct.rules()[ri];
      if (r.body.empty()) return true;  // `H x <: Z`
      if (!seen[static_cast<std::size_t>(r.body[0])]) {
        seen[static_cast<std::size_t>(r.body[0])] = 1;
        stack.push_back(r.body[0]);
      }
    }
  }
  return false;
}

}  // namespace submachine
