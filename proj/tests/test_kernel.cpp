#include "doctest.h"
#include "exdec/kernel.hpp"
#include "exdec/semantics.hpp"

using namespace exdec;

namespace {

Signature lemma_sig() {
  Signature sig;
  sig.add_type("X").add_type("Y");
  sig.add_exception("T").add_exception("R");
  sig.add_op("g", "X", "Y");
  sig.validate();
  return sig;
}

Proof leaf(RuleName rule, Conclusion c) { return Proof{rule, {}, std::move(c)}; }

// the derivation that a propagator maps the empty map to the empty map:
// g o empty[X] == empty[Y]
Proof propagator_propagates(const Signature&) {
  Term g = Term::base_op("g");
  Ty x = Ty::named("X"), y = Ty::named("Y");
  Term gex = Term::compose(g, Term::empty(x));

  Proof s1 = leaf(RuleName::EmptyFormation,
                  Formation{Term::empty(x), {Ty::empty(), x}});
  Proof s2 = leaf(RuleName::ByTypecheck, Formation{g, {x, y}});
  Proof s3{RuleName::ComposeFormation, {s1, s2},
           Formation{gex, {Ty::empty(), y}}};
  Proof s4 = leaf(RuleName::EmptyFormation,
                  Formation{Term::empty(y), {Ty::empty(), y}});
  Proof s5{RuleName::EmptyWeakUnique, {s3, s4},
           Equation{gex, Term::empty(y), EqMode::Weak}};
  Proof s6 = leaf(RuleName::ByInference, DecorationClaim{g, Deco::Propagator});
  Proof s7 = leaf(RuleName::EmptyPure, DecorationClaim{Term::empty(x), Deco::Pure});
  Proof s8{RuleName::PureToPpg, {s7},
           DecorationClaim{Term::empty(x), Deco::Propagator}};
  Proof s9{RuleName::PpgComposeClosure, {s8, s6},
           DecorationClaim{gex, Deco::Propagator}};
  Proof s10 = leaf(RuleName::EmptyPure, DecorationClaim{Term::empty(y), Deco::Pure});
  Proof s11{RuleName::PureToPpg, {s10},
            DecorationClaim{Term::empty(y), Deco::Propagator}};
  Proof s12{RuleName::PpgWeakToStrong, {s5, s9, s11},
            Equation{gex, Term::empty(y), EqMode::Strong}};
  return s12;
}

void collect_paths(const Proof& p, std::vector<std::vector<size_t>>& out,
                   std::vector<size_t> cur) {
  out.push_back(cur);
  for (size_t i = 0; i < p.premises.size(); ++i) {
    auto next = cur;
    next.push_back(i);
    collect_paths(p.premises[i], out, next);
  }
}

Proof* node_at(Proof& p, const std::vector<size_t>& path) {
  Proof* cur = &p;
  for (size_t i : path) cur = &cur->premises[i];
  return cur;
}

}  // namespace

TEST_CASE("single-node reflexivity is accepted") {
  Signature sig = lemma_sig();
  Term g = Term::base_op("g");
  Proof p{RuleName::StrongRefl,
          {leaf(RuleName::ByTypecheck, Formation{g, {Ty::named("X"), Ty::named("Y")}})},
          Equation{g, g, EqMode::Strong}};
  Verdict v = check_proof(sig, p);
  CHECK(v.accepted);
}

TEST_CASE("the propagator-propagates derivation is accepted") {
  Signature sig = lemma_sig();
  Proof p = propagator_propagates(sig);
  Verdict v = check_proof(sig, p);
  INFO(v.path, ": ", v.reason);
  CHECK(v.accepted);
  CHECK(v.trace.size() == 12);
}

TEST_CASE("every single-node rule mutation is rejected") {
  Signature sig = lemma_sig();
  Proof original = propagator_propagates(sig);
  std::vector<std::vector<size_t>> paths;
  collect_paths(original, paths, {});
  CHECK(paths.size() == 12);
  int mutations = 0;
  for (const auto& path : paths) {
    for (RuleName alt : figure_rules()) {
      Proof mutated = original;
      Proof* node = node_at(mutated, path);
      if (node->rule == alt) continue;
      node->rule = alt;
      Verdict v = check_proof(sig, mutated);
      CHECK_FALSE(v.accepted);
      ++mutations;
    }
  }
  CHECK(mutations > 400);
}

TEST_CASE("weak substitution demands a pure substituted term") {
  Signature sig = lemma_sig();
  // f = untag[T] is a catcher; claiming it pure fails at the discharge node
  Term f = Term::untag("T");
  Term g1 = Term::id(Ty::named("T"));
  Term g2 = Term::compose(Term::id(Ty::named("T")), Term::id(Ty::named("T")));
  Proof form = leaf(RuleName::ByTypecheck, Formation{f, {Ty::empty(), Ty::named("T")}});
  Proof deco = leaf(RuleName::ByInference, DecorationClaim{f, Deco::Pure});
  Proof eq{RuleName::WeakRefl,
           {leaf(RuleName::ByTypecheck,
                 Formation{g1, {Ty::named("T"), Ty::named("T")}})},
           Equation{g1, g1, EqMode::Weak}};
  (void)g2;
  Proof p{RuleName::WeakSubst, {form, deco, eq},
          Equation{Term::compose(g1, f), Term::compose(g1, f), EqMode::Weak}};
  Verdict v = check_proof(sig, p);
  CHECK_FALSE(v.accepted);
  CHECK(v.code == Errc::DecorationViolation);
  CHECK(v.path == "root.1");  // the by_inference discharge of f :: pure
}

TEST_CASE("premise order follows the schema") {
  Signature sig = lemma_sig();
  Term g = Term::base_op("g");
  Ty x = Ty::named("X"), y = Ty::named("Y");
  Proof fx = leaf(RuleName::EmptyFormation, Formation{Term::empty(x), {Ty::empty(), x}});
  Proof fg = leaf(RuleName::ByTypecheck, Formation{g, {x, y}});
  Proof good{RuleName::ComposeFormation, {fx, fg},
             Formation{Term::compose(g, Term::empty(x)), {Ty::empty(), y}}};
  CHECK(check_proof(sig, good).accepted);
  Proof swapped{RuleName::ComposeFormation, {fg, fx},
                Formation{Term::compose(g, Term::empty(x)), {Ty::empty(), y}}};
  CHECK_FALSE(check_proof(sig, swapped).accepted);
}

TEST_CASE("instantiating the untagging schemas") {
  Signature sig = lemma_sig();
  Bindings b;
  b.types.emplace("T", Ty::named("T"));
  Conclusion match = instantiate_rule(sig, RuleName::UntagMatch, b);
  CHECK(match == Conclusion{Equation{
                     Term::compose(Term::untag("T"), Term::tag("T")),
                     Term::id(Ty::named("T")), EqMode::Weak}});

  Bindings b2;
  b2.types.emplace("T", Ty::named("T"));
  b2.types.emplace("R", Ty::named("R"));
  Conclusion mismatch = instantiate_rule(sig, RuleName::UntagMismatch, b2);
  CHECK(mismatch ==
        Conclusion{Equation{Term::compose(Term::untag("T"), Term::tag("R")),
                            Term::compose(Term::empty(Ty::named("T")), Term::tag("R")),
                            EqMode::Weak}});
}

TEST_CASE("instantiating the empty-type uniqueness schema") {
  Signature sig = lemma_sig();
  Bindings b;
  b.terms.emplace("f", Term::empty(Ty::named("Y")));
  b.terms.emplace("g", Term::compose(Term::base_op("g"), Term::empty(Ty::named("X"))));
  Conclusion c = instantiate_rule(sig, RuleName::EmptyWeakUnique, b);
  const auto* e = std::get_if<Equation>(&c);
  REQUIRE(e != nullptr);
  CHECK(e->mode == EqMode::Weak);
}

TEST_CASE("instantiation reports missing bindings and side conditions") {
  Signature sig = lemma_sig();
  Bindings empty;
  try {
    instantiate_rule(sig, RuleName::UntagMatch, empty);
    FAIL("expected MissingBinding");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingBinding);
  }
  Bindings same;
  same.types.emplace("T", Ty::named("T"));
  same.types.emplace("R", Ty::named("T"));
  try {
    instantiate_rule(sig, RuleName::UntagMismatch, same);
    FAIL("expected SideConditionViolated");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SideConditionViolated);
  }
}

TEST_CASE("instantiated schemas are accepted by the node checker") {
  // agreement between the two kernel code paths
  Signature sig = lemma_sig();
  TermGen gen(sig, 4242);
  long long checked = 0;
  for (RuleName rule : figure_rules()) {
    for (int trial = 0; trial < 60; ++trial) {
      Bindings b;
      switch (rule) {
        case RuleName::IdFormation:
        case RuleName::IdPure:
        case RuleName::EmptyFormation:
        case RuleName::EmptyPure:
          b.types.emplace("X", gen.random_type(true));
          break;
        case RuleName::TagFormation:
        case RuleName::TagPpg:
        case RuleName::UntagFormation:
        case RuleName::UntagCtc:
        case RuleName::UntagMatch:
          b.types.emplace("T", Ty::named(sig.exceptional()[static_cast<size_t>(
                                   gen.pick(2))]));
          break;
        case RuleName::UntagMismatch:
          b.types.emplace("T", Ty::named("T"));
          b.types.emplace("R", Ty::named("R"));
          break;
        default: {
          // draw terms for the generic metavariable names
          Ty x = gen.random_type(true), y = gen.random_type(true),
             z = gen.random_type(true), w = gen.random_type(true);
          auto add = [&](const char* key, const Ty& d, const Ty& c) {
            auto t = gen.gen(d, c, 2);
            if (t) b.terms.emplace(key, *t);
          };
          add("f", x, y);
          add("g", y, z);
          add("h", z, w);
          add("k", Ty::empty(), z);
          add("g1", y, z);
          add("g2", y, z);
          add("f1", x, y);
          add("f2", x, y);
          for (const auto& t : sig.exceptional()) add(("f:" + t).c_str(), Ty::named(t), y);
          b.types.emplace("R", Ty::named(sig.exceptional()[static_cast<size_t>(
                                   gen.pick(2))]));
          break;
        }
      }
      RuleInstance inst;
      try {
        inst = instantiate_schema(sig, rule, b);
      } catch (const Error&) {
        continue;  // binding does not fit this schema
      }
      auto err = check_node(sig, rule, inst.premises, inst.conclusion);
      if (err) {
        INFO(rule_name(rule), ": ", err->message);
        CHECK_FALSE(err.has_value());
      }
      ++checked;
    }
  }
  CHECK(checked > 600);
}

TEST_CASE("kernel-oracle agreement: accepted conclusions hold in every model") {
  Signature sig = lemma_sig();
  Proof p = propagator_propagates(sig);
  REQUIRE(check_proof(sig, p).accepted);
  const auto* concl = std::get_if<Equation>(&p.conclusion);
  REQUIRE(concl != nullptr);
  int models = 0;
  for (const auto& m : enumerate_models(sig, 2, 100000)) {
    CHECK(eval_equation(sig, m, *concl));
    ++models;
  }
  CHECK(models > 0);
}

TEST_CASE("unknown rule names round-trip through the table") {
  CHECK(rule_from_name("untag_match") == RuleName::UntagMatch);
  CHECK(rule_from_name("no_such_rule") == std::nullopt);
  for (RuleName r : figure_rules())
    CHECK(rule_from_name(rule_name(r)) == r);
}
