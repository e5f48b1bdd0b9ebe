#include <set>

#include "denhandle_oracle.hpp"
#include "doctest.h"
#include "exdec/semantics.hpp"

using namespace exdec;

namespace {

Signature small_sig() {
  Signature sig;
  sig.add_exception("T").add_exception("R");
  sig.add_op("f", "T", "R");
  sig.validate();
  return sig;
}

Model one_elem_model(const Signature& sig) {
  Model m;
  for (const auto& t : sig.types()) m.carrier[t] = 1;
  for (const auto& op : sig.ops()) m.op_table[op.name] = {0};
  return m;
}

}  // namespace

TEST_CASE("tagging injects, untagging recovers on match and propagates otherwise") {
  Signature sig = small_sig();
  Model m = one_elem_model(sig);
  EffFunction tag_t = interpret(sig, m, Term::tag("T"));
  CHECK(tag_t(EffValue::ordinary(0)) == EffValue::exception(0, 0));
  EffFunction untag_t = interpret(sig, m, Term::untag("T"));
  CHECK(untag_t(EffValue::exception(0, 0)) == EffValue::ordinary(0));
  // an exception of origin R passes through untag[T] unchanged
  CHECK(untag_t(EffValue::exception(1, 0)) == EffValue::exception(1, 0));
  EffFunction thr = interpret(sig, m, Term::throw_("T", Ty::named("R")));
  CHECK(thr(EffValue::ordinary(0)) == EffValue::exception(0, 0));
}

TEST_CASE("untag o tag ~~ id holds everywhere, the strong version fails") {
  Signature sig = small_sig();
  Term lhs = Term::compose(Term::untag("T"), Term::tag("T"));
  Term id_t = Term::id(Ty::named("T"));
  for (const auto& m : enumerate_models(sig, 2, 100000)) {
    CHECK(eval_equation(sig, m, Equation{lhs, id_t, EqMode::Weak}));
    CHECK(eval_equation(sig, m, Equation{lhs, lhs, EqMode::Strong}));  // f == f
  }
  // on the one-element model the sides differ at the T-tagged exception: the
  // left recovers it, the identity propagates it
  Model m = one_elem_model(sig);
  CHECK_FALSE(eval_equation(sig, m, Equation{lhs, id_t, EqMode::Strong}));
}

TEST_CASE("model enumeration counts") {
  Signature plain;
  plain.add_type("A");
  plain.validate();
  CHECK(enumerate_models(plain, 2, 1000).size() == 3);  // |A| in {0,1,2}
  CHECK(enumerate_models(plain, 2, 0).empty());         // zero budget

  Signature withop;
  withop.add_type("A").add_op("f", "A", "A");
  withop.validate();
  auto models = enumerate_models(withop, 2, 1000);
  CHECK(models.size() == 6);  // 0^0 + 1^1 + 2^2 tables
  int with_two = 0;
  for (const auto& m : models)
    if (m.carrier.at("A") == 2) ++with_two;
  CHECK(with_two == 4);
}

TEST_CASE("sampled enumeration is deterministic") {
  Signature sig;
  sig.add_type("A").add_type("B").add_op("f", "A", "B").add_op("g", "B", "A");
  sig.validate();
  auto s1 = enumerate_models(sig, 3, 40, 7);
  auto s2 = enumerate_models(sig, 3, 40, 7);
  REQUIRE(s1.size() == s2.size());
  CHECK(s1.size() == 40);  // space exceeds the budget, so exactly 40 samples
  for (size_t i = 0; i < s1.size(); ++i) CHECK(s1[i].str(sig) == s2[i].str(sig));
}

TEST_CASE("inferred pure/propagator terms obey the table laws") {
  Signature sig = small_sig();
  auto models = enumerate_models(sig, 2, 100000);
  TermGen gen(sig, 31337);
  int checked = 0;
  for (int i = 0; i < 250; ++i) {
    auto t = gen.gen_any(3);
    if (!t) continue;
    Deco d = infer_decoration(sig, *t);
    for (const auto& m : models) {
      EffFunction tbl = interpret(sig, m, *t);
      if (d <= Deco::Propagator) CHECK(tbl.propagates_exceptions());
      if (d == Deco::Pure) CHECK(tbl.is_pure_shaped());
    }
    ++checked;
  }
  CHECK(checked > 180);
}

TEST_CASE("try/catch interpretation equals the recov transcription") {
  Signature sig = small_sig();
  Term raiser = Term::compose(Term::throw_("R", Ty::named("R")), Term::base_op("f"));
  std::vector<std::pair<Term, std::vector<std::pair<TypeName, Term>>>> cases = {
      {Term::base_op("f"), {{"T", Term::base_op("f")}}},
      {raiser, {{"R", Term::id(Ty::named("R"))}}},
      {raiser, {{"T", Term::base_op("f")}, {"R", Term::id(Ty::named("R"))}}},
      {Term::throw_("T", Ty::named("R")),
       {{"T", Term::base_op("f")}, {"R", Term::id(Ty::named("R"))}}},
  };
  for (const auto& [body, handlers] : cases) {
    Term tc = Term::try_catch(body, handlers);
    for (const auto& m : enumerate_models(sig, 2, 100000)) {
      EffFunction via_elab = interpret(sig, m, tc);
      EffFunction via_oracle = exdec_tests::den_handle_oracle(sig, m, body, handlers);
      CHECK(via_elab == via_oracle);
    }
  }
}

TEST_CASE("a shadowed handler never affects the interpretation") {
  // handlers [(T,g1),(T,g2)]: any propagator table for g2 gives the same result
  Signature sig;
  sig.add_type("A").add_type("B").add_exception("T");
  sig.add_op("u", "A", "T").add_op("w", "T", "B").add_op("g2", "T", "B");
  sig.validate();

  Signature base;  // same carriers, no g2
  base.add_type("A").add_type("B").add_exception("T");
  base.add_op("u", "A", "T").add_op("w", "T", "B");
  base.validate();

  Term f = Term::compose(Term::throw_("T", Ty::named("B")), Term::base_op("u"));
  Term tc = Term::try_catch(f, {{"T", Term::base_op("w")},
                                {"T", Term::base_op("g2")}});
  int models_checked = 0;
  for (const auto& m : enumerate_models(base, 2, 100000)) {
    std::vector<EffValue> outputs;  // possible g2 outputs: [B] + Exc
    for (int v = 0; v < m.carrier.at("B"); ++v)
      outputs.push_back(EffValue::ordinary(v));
    for (const auto& e : exception_values(sig, m)) outputs.push_back(e);
    int t_size = m.carrier.at("T");
    long long combos = 1;
    for (int i = 0; i < t_size; ++i)
      combos *= static_cast<long long>(outputs.size());
    if (t_size > 0 && outputs.empty()) continue;  // no table possible at all
    std::set<std::string> results;
    for (long long c = 0; c < combos; ++c) {
      EffFunction g2(sig, m, Ty::named("T"), Ty::named("B"));
      long long code = c;
      for (int i = 0; i < g2.input_count(); ++i) {
        EffValue in = g2.input_at(i);
        if (in.exceptional) {
          g2.at_index(i) = in;  // propagator shape
        } else {
          g2.at_index(i) = outputs[static_cast<size_t>(
              code % static_cast<long long>(outputs.size()))];
          code /= static_cast<long long>(outputs.size());
        }
      }
      OpOverrides ov;
      ov.emplace("g2", g2);
      EffFunction res = interpret(sig, m, tc, ov);
      std::string flat;
      for (int i = 0; i < res.input_count(); ++i) {
        const exdec::EffValue& v = res.at_index(i);
        flat += v.exceptional ? "e" + std::to_string(v.exc_type) + "." +
                                    std::to_string(v.val) + ","
                              : "o" + std::to_string(v.val) + ",";
      }
      results.insert(flat);
    }
    CHECK(results.size() <= 1);
    ++models_checked;
  }
  CHECK(models_checked > 0);
}

TEST_CASE("soundness harness passes on representative rules") {
  Signature sig = small_sig();
  for (RuleName r : {RuleName::UntagMatch, RuleName::PpgWeakToStrong,
                     RuleName::CopairWeakEq, RuleName::WeakSubst,
                     RuleName::StrongFromAllTags}) {
    SoundnessReport rep = soundness_check(sig, r, 120, 2);
    INFO(rep.str());
    CHECK(rep.passed);
    CHECK(rep.nonvacuous > 0);
  }
}

TEST_CASE("corrupted weak substitution is caught by the oracle") {
  Signature sig = small_sig();
  SoundnessReport rep = soundness_check(sig, RuleName::WeakSubst, 200, 2, 0x50f1,
                                        SchemaVariant::CorruptWeakSubst);
  INFO(rep.str());
  CHECK_FALSE(rep.passed);
}

TEST_CASE("hierarchy: untagging routes through the cast") {
  Signature sig;
  sig.add_exception("T").add_exception("R").add_exception("S");
  sig.add_subtype("S", "R").add_subtype("R", "T");
  sig.validate();
  int models_seen = 0;
  for (const auto& m : enumerate_models(sig, 2, 100000)) {
    ++models_seen;
    EffFunction untag_t = interpret(sig, m, Term::untag("T"));
    for (const auto& e : exception_values(sig, m)) {
      const TypeName& origin = sig.exceptional()[static_cast<size_t>(e.exc_type)];
      if (sig.cast_exists(origin, "T"))
        CHECK(untag_t(e) == EffValue::ordinary(m.cast_apply(origin, "T", e.val)));
      else
        CHECK(untag_t(e) == e);
    }
    for (int v = 0; v < m.carrier.at("S"); ++v)
      CHECK(m.cast_apply("S", "T", v) ==
            m.cast_apply("R", "T", m.cast_apply("S", "R", v)));
  }
  CHECK(models_seen > 0);
  SoundnessReport rep = soundness_check(sig, RuleName::UntagCast, 60, 2);
  INFO(rep.str());
  CHECK(rep.passed);
  CHECK(rep.nonvacuous > 0);
}

TEST_CASE("every rule stays sound when a hierarchy is declared") {
  Signature chain;
  chain.add_exception("T").add_exception("R").add_exception("S");
  chain.add_subtype("S", "R").add_subtype("R", "T");
  chain.validate();
  for (RuleName r : figure_rules()) {
    SoundnessReport rep = soundness_check(chain, r, 60, 2);
    INFO(rep.str());
    CHECK(rep.passed);
  }
  Bindings b;
  b.types.emplace("T", Ty::named("T"));
  b.types.emplace("R", Ty::named("S"));
  RuleInstance inst = instantiate_schema(chain, RuleName::UntagCast, b);
  CHECK_FALSE(check_node(chain, RuleName::UntagCast, inst.premises,
                         inst.conclusion)
                  .has_value());
}

TEST_CASE("exceptional carriers may be empty") {
  Signature sig = small_sig();
  Model m;
  m.carrier = {{"T", 0}, {"R", 0}};
  m.op_table = {{"f", {}}};
  // Exc is empty, so every well-typed equation holds strongly
  Term lhs = Term::compose(Term::untag("T"), Term::tag("T"));
  CHECK(eval_equation(sig, m, Equation{lhs, Term::id(Ty::named("T")), EqMode::Strong}));
}

TEST_CASE("invalid models are rejected") {
  Signature sig = small_sig();
  Model m;
  m.carrier = {{"T", 2}, {"R", 1}};
  m.op_table = {{"f", {0}}};  // not total
  CHECK_THROWS_AS(validate_model(sig, m), Error);
  m.op_table = {{"f", {0, 5}}};  // out of range
  CHECK_THROWS_AS(validate_model(sig, m), Error);
}
