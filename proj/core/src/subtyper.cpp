#include "submachine/subtyper.hpp"

#include <algorithm>
#include <memory>
#include <unordered_map>

namespace submachine {

namespace {

// Towers inside a run are immutable cons lists with shared tails, so a step
// costs O(chain suffix) instead of O(config length): the unconsumed part of
// the old subtype side is *shared* with the new supertype side, not copied.
// Nodes are reference counted; release is iterative to keep long towers from
// overflowing the stack on destruction.
struct Node {
  Node* next;
  ClassId cls;
  std::uint32_t rc;
};

class NodePool {
 public:
  // Returns a fresh node with rc = 1.  Steals the caller's reference to
  // `next` (the new node now owns it).
  Node* make(ClassId c, Node* next) {
    Node* n = free_;
    if (n != nullptr) {
      free_ = n->next;
    } else {
      if (used_ == kBlock) {
        blocks_.push_back(std::make_unique<Node[]>(kBlock));
        used_ = 0;
      }
      n = &blocks_.back()[used_++];
    }
    n->cls = c;
    n->next = next;
    n->rc = 1;
    return n;
  }

  static void acquire(Node* n) {
    if (n) ++n->rc;
  }

  void release(Node* n) {
    while (n && --n->rc == 0) {
      Node* t = n->next;
      n->next = free_;
      free_ = n;
      n = t;
    }
  }

 private:
  static constexpr std::size_t kBlock = 1 << 14;
  std::vector<std::unique_ptr<Node[]>> blocks_;
  std::size_t used_ = kBlock;
  Node* free_ = nullptr;
};

bool equal_towers(const Node* a, const Node* b) {
  while (a != b) {
    if (!a || !b || a->cls != b->cls) return false;
    a = a->next;
    b = b->next;
  }
  return true;  // pointer equality: shared tail
}

struct CompiledChain {
  std::vector<ClassId> suffix;
  RuleTail tail;
  ChainResult full;
};

class Engine {
 public:
  explicit Engine(const ClassTable& ct) : ct_(ct) {}

  ~Engine() {
    pool_.release(lhs_);
    pool_.release(rhs_);
  }

  void reset(const TypeTower& lhs, const TypeTower& rhs) {
    pool_.release(lhs_);
    pool_.release(rhs_);
    lhs_ = from_tower(lhs);
    rhs_ = from_tower(rhs);
  }

  struct Attempt {
    StepKind kind;
    const CompiledChain* chain = nullptr;       // Continue
    std::vector<MachineConfig> branches;        // Ambiguous
    std::vector<ChainResult> branch_chains;     // Ambiguous
    std::string reason;                         // Stuck / Ambiguous
  };

  // Classifies the current config and, when `commit` is set and the config
  // can step, performs the step in place.  A terminal classification
  // (Halted/Stuck/Ambiguous) never mutates state.
  Attempt try_step(bool commit) {
    Attempt a{StepKind::Stuck};
    if (rhs_ == nullptr) {  // supertype side is the bare Z
      if (lhs_ == nullptr || bare_z(lhs_->cls)) {
        a.kind = StepKind::Halted;
      } else {
        a.kind = StepKind::Stuck;
        a.reason = "supertype side is Z but `" + ct_.name(lhs_->cls) +
                   "` derives no bare Z";
      }
      return a;
    }
    if (lhs_ == nullptr) {
      a.kind = StepKind::Stuck;
      a.reason = "subtype side is Z but the supertype side is not";
      return a;
    }
    const auto& chains = chains_for(lhs_->cls, rhs_->cls);
    if (chains.empty()) {
      a.kind = StepKind::Stuck;
      a.reason = "no chain from `" + ct_.name(lhs_->cls) + "` to `" +
                 ct_.name(rhs_->cls) + "`";
      return a;
    }
    if (chains.size() == 1) {
      a.kind = StepKind::Continue;
      a.chain = &chains[0];
      if (commit) commit_step(chains[0]);
      return a;
    }
    // Several chains: build every successor and count the distinct ones.
    std::vector<std::pair<Node*, Node*>> nexts;
    nexts.reserve(chains.size());
    for (const auto& c : chains) nexts.push_back(build_next(c));
    std::vector<std::size_t> distinct;
    for (std::size_t i = 0; i < nexts.size(); ++i) {
      bool dup = false;
      for (std::size_t j : distinct)
        if (equal_towers(nexts[i].first, nexts[j].first) &&
            equal_towers(nexts[i].second, nexts[j].second)) {
          dup = true;
          break;
        }
      if (!dup) distinct.push_back(i);
    }
    if (distinct.size() == 1) {
      a.kind = StepKind::Continue;
      a.chain = &chains[0];
      if (commit) {
        auto [nl, nr] = nexts[0];
        NodePool::acquire(nl);
        NodePool::acquire(nr);
        pool_.release(lhs_);
        pool_.release(rhs_);
        lhs_ = nl;
        rhs_ = nr;
      }
    } else {
      a.kind = StepKind::Ambiguous;
      a.reason = std::to_string(distinct.size()) + " distinct successors from `" +
                 ct_.name(lhs_->cls) + "` consuming `" + ct_.name(rhs_->cls) +
                 "`";
      for (std::size_t i : distinct)
        a.branches.push_back(
            {materialize(nexts[i].first), materialize(nexts[i].second)});
      for (const auto& c : chains) a.branch_chains.push_back(c.full);
    }
    for (auto& [nl, nr] : nexts) {
      pool_.release(nl);
      pool_.release(nr);
    }
    return a;
  }

  MachineConfig current() const { return {materialize(lhs_), materialize(rhs_)}; }

  // Cheap scans over the live config, used by callers that poll state
  // without materializing towers.
  bool config_contains(const std::vector<char>& wanted) const {
    for (const Node* n = lhs_; n; n = n->next)
      if (wanted[static_cast<std::size_t>(n->cls)]) return true;
    for (const Node* n = rhs_; n; n = n->next)
      if (wanted[static_cast<std::size_t>(n->cls)]) return true;
    return false;
  }

 private:
  static TypeTower materialize(const Node* n) {
    TypeTower t;
    for (; n; n = n->next) t.push_back(n->cls);
    return t;
  }

  Node* from_tower(const TypeTower& t) {
    Node* n = nullptr;
    for (auto it = t.rbegin(); it != t.rend(); ++it) n = pool_.make(*it, n);
    return n;
  }

  // New (lhs, rhs) after consuming via `c`; both returned references owned
  // by the caller.
  std::pair<Node*, Node*> build_next(const CompiledChain& c) {
    Node* nl = rhs_->next;
    NodePool::acquire(nl);
    Node* nr = nullptr;
    if (c.tail == RuleTail::Var) {
      nr = lhs_->next;
      NodePool::acquire(nr);
    }
    for (auto it = c.suffix.rbegin(); it != c.suffix.rend(); ++it)
      nr = pool_.make(*it, nr);
    return {nl, nr};
  }

  void commit_step(const CompiledChain& c) {
    auto [nl, nr] = build_next(c);
    pool_.release(lhs_);
    pool_.release(rhs_);
    lhs_ = nl;
    rhs_ = nr;
  }

  const std::vector<CompiledChain>& chains_for(ClassId from, ClassId target) {
    std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(
                             from))
                         << 32) |
                        static_cast<std::uint32_t>(target);
    auto it = chain_memo_.find(key);
    if (it != chain_memo_.end()) return it->second;
    std::vector<CompiledChain> compiled;
    for (auto& ch : chain_search(ct_, from, target))
      compiled.push_back({ch.suffix, ch.tail, ch});
    return chain_memo_.emplace(key, std::move(compiled)).first->second;
  }

  bool bare_z(ClassId from) {
    if (bare_z_memo_.size() < ct_.class_count())
      bare_z_memo_.resize(ct_.class_count(), -1);
    auto& slot = bare_z_memo_[static_cast<std::size_t>(from)];
    if (slot < 0) slot = derives_bare_z(ct_, from) ? 1 : 0;
    return slot == 1;
  }

  const ClassTable& ct_;
  NodePool pool_;
  Node* lhs_ = nullptr;
  Node* rhs_ = nullptr;
  std::unordered_map<std::uint64_t, std::vector<CompiledChain>> chain_memo_;
  std::vector<std::int8_t> bare_z_memo_;
};

}  // namespace

StepResult step(const ClassTable& ct, const MachineConfig& cfg) {
  Engine e(ct);
  e.reset(cfg.lhs, cfg.rhs);
  Engine::Attempt a = e.try_step(/*commit=*/true);
  StepResult r;
  r.kind = a.kind;
  r.reason = a.reason;
  switch (a.kind) {
    case StepKind::Continue:
      r.next = e.current();
      r.chain = a.chain->full;
      break;
    case StepKind::Ambiguous:
      r.branches = std::move(a.branches);
      r.branch_chains = std::move(a.branch_chains);
      break;
    default:
      break;
  }
  return r;
}

RunResult run(const ClassTable& ct, const SubtypeQuery& q, std::uint64_t fuel,
              bool want_trace, const ConfigCallback& on_config) {
  Engine e(ct);
  e.reset(q.subtype, q.supertype);
  RunResult r;
  if (want_trace) r.trace.push_back(e.current());
  if (on_config) on_config(0, want_trace ? r.trace.back() : e.current());
  for (;;) {
    Engine::Attempt a = e.try_step(/*commit=*/r.steps_taken < fuel);
    if (a.kind == StepKind::Halted) {
      r.outcome = RunOutcome::HaltedAccept;
      break;
    }
    if (a.kind == StepKind::Stuck) {
      r.outcome = RunOutcome::Stuck;
      r.diagnostic = a.reason;
      break;
    }
    if (a.kind == StepKind::Ambiguous) {
      r.outcome = RunOutcome::AmbiguousError;
      r.diagnostic = a.reason;
      break;
    }
    if (r.steps_taken >= fuel) {  // could step, but fuel is spent
      r.outcome = RunOutcome::OutOfFuel;
      break;
    }
    ++r.steps_taken;
    if (want_trace) r.trace.push_back(e.current());
    if (on_config) on_config(r.steps_taken, want_trace ? r.trace.back() : e.current());
  }
  r.final_config = e.current();
  return r;
}

SubtypeVerdict decide_subtype(const ClassTable& ct, const TypeTower& subtype,
                              const TypeTower& supertype, std::uint64_t fuel) {
  RunResult r = run(ct, {subtype, supertype}, fuel);
  switch (r.outcome) {
    case RunOutcome::HaltedAccept:
      return SubtypeVerdict::Subtype;
    case RunOutcome::Stuck:
      return SubtypeVerdict::NotSubtype;
    case RunOutcome::OutOfFuel:
      return SubtypeVerdict::Unknown;
    case RunOutcome::AmbiguousError:
      break;
  }
  throw AmbiguousTableError(r.diagnostic);
}

std::string render_config_plain(const ClassTable& ct, const MachineConfig& c) {
  return render_tower(ct, c.lhs) + "  <:  " + render_tower(ct, c.rhs);
}

std::string render_config_arrow(const ClassTable& ct, const MachineConfig& c,
                                std::uint64_t step_index) {
  const bool even = (step_index % 2 == 0);
  const TypeTower& rev_side = even ? c.lhs : c.rhs;    // shown reversed, after Z
  const TypeTower& fwd_side = even ? c.rhs : c.lhs;    // shown in tower order
  std::string out = "Z";
  for (auto it = rev_side.rbegin(); it != rev_side.rend(); ++it)
    out += " " + ct.name(*it);
  out += even ? " <| " : " |> ";
  for (ClassId cls : fwd_side) out += ct.name(cls) + " ";
  out += "Z";
  return out;
}

}  // namespace submachine
