#pragma once

#include <string>

#include "submachine/classtable.hpp"
#include "submachine/reduction.hpp"
#include "submachine/turing.hpp"

namespace submachine {

// Renders class tables and queries as Java generics source.  A rule
//
//   C x <: D1 t2 t3 ... tk END        (END is x or Z)
//
// becomes the extends clause `D1<t2<? super t3<? super ...<? super END>>>>`:
// the first body class is the supertype, the second sits directly in its
// argument position, and each deeper level is wrapped in `? super`.  A tower
// C1 C2 ... Cm Z renders as `C1<? super C2<? super ...<? super Z>>>`.

std::string render_rule_type(const ClassTable& ct, const InheritanceRule& r);
std::string render_tower_type(const ClassTable& ct, const TypeTower& t);

// One `interface Z {}` plus one interface declaration per class:
// `interface C<x> {}` when C has no rules, otherwise
// `interface C<x> extends R1, R2, ... {}` in rule order.
std::string emit_java_interfaces(const ClassTable& ct);

// A `class Main` whose single method compiles iff the query holds:
// the parameter type renders q.subtype, the return type q.supertype.
std::string emit_query_harness(const ClassTable& ct, const SubtypeQuery& q);

// The tape-building helper: an abstract class `B<x>` with a static `start`
// field seeded with the query core, one prepending method per alphabet
// letter, and `stop()` closing the tower with the initial state and the
// right-end sentinel.  Method names reuse the letter names when they are
// valid Java identifiers and fall back to mangled names otherwise.
std::string emit_builder(const ClassTable& ct, const ReductionNaming& nm,
                         const ExtendedTm& m);

}  // namespace submachine
