// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Budgets and bounds are fixed here, not configurable.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "denhandle_oracle.hpp"
#include "exdec/dynev.hpp"
#include "exdec/semantics.hpp"
#include "exdec/surface.hpp"

using namespace exdec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::string fixture(const std::string& name) {
  return std::string(EXDEC_FIXTURE_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// two exceptional types and one operation between them
Signature harness_sig() {
  Signature sig;
  sig.add_exception("T").add_exception("R");
  sig.add_op("f", "T", "R");
  sig.validate();
  return sig;
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

// 1. the propagator-propagates derivation is accepted and every single-node
//    rule mutation is rejected; under one second
Outcome criterion1() {
  Outcome o;
  auto file = surface::parse(slurp(fixture("lemma.dsl")));
  Verdict v = surface::check_named_proof(file.sig, file.proofs.at(0));
  o.require(v.accepted, "fixture proof rejected: " + v.path + ": " + v.reason);

  Proof tree = surface::proof_tree(file.proofs.at(0));
  o.require(check_proof(file.sig, tree).accepted, "fixture tree rejected");

  std::vector<std::vector<size_t>> paths;
  collect_paths(tree, paths, {});
  long long rejected = 0, total = 0;
  for (const auto& path : paths)
    for (RuleName alt : figure_rules()) {
      Proof mutated = tree;
      Proof* node = node_at(mutated, path);
      if (node->rule == alt) continue;
      node->rule = alt;
      ++total;
      if (!check_proof(file.sig, mutated).accepted) ++rejected;
    }
  o.require(rejected == total,
            std::to_string(total - rejected) + " mutations slipped through");
  o.detail = "derivation of " + std::to_string(paths.size()) +
             " nodes accepted; " + std::to_string(rejected) + "/" +
             std::to_string(total) + " rule mutations rejected";
  return o;
}

// 2. every figure rule is sound on all models of the two-exceptional-type
//    signature with carriers <= 3, over >= 200 usable bindings per rule; the
//    corrupted weak-substitution schema is refuted within the same budget
Outcome criterion2() {
  Outcome o;
  Signature sig = harness_sig();
  long long min_used = -1;
  for (RuleName rule : figure_rules()) {
    SoundnessReport rep = soundness_check(sig, rule, 520, 3);
    if (!rep.passed) o.fail(rep.str());
    if (rep.bindings_used < 200)
      o.fail(std::string(rule_name(rule)) + ": only " +
             std::to_string(rep.bindings_used) + " bindings instantiated");
    if (rep.nonvacuous == 0)
      o.fail(std::string(rule_name(rule)) + ": no nonvacuous instance");
    if (min_used < 0 || rep.bindings_used < min_used) min_used = rep.bindings_used;
  }
  SoundnessReport corrupt = soundness_check(
      sig, RuleName::WeakSubst, 520, 3, 0x50f1, SchemaVariant::CorruptWeakSubst);
  o.require(!corrupt.passed, "negative control found no counterexample");
  o.detail = std::to_string(figure_rules().size()) +
             " rules x >=200 bindings x all models (carriers <= 3), min used " +
             std::to_string(min_used) + "; negative control refuted";
  return o;
}

// 3. try/catch with one and two handlers interprets exactly as the recovery
//    transcription on every model with carriers <= 3
Outcome criterion3() {
  Outcome o;
  Signature sig = harness_sig();
  Term f = Term::base_op("f");
  Term raiser_r = Term::compose(Term::throw_("R", Ty::named("R")), f);
  Term thrower_t = Term::throw_("T", Ty::named("R"));
  Term id_r = Term::id(Ty::named("R"));
  std::vector<std::pair<Term, std::vector<std::pair<TypeName, Term>>>> cases = {
      // n = 1
      {f, {{"T", f}}},
      {f, {{"R", id_r}}},
      {raiser_r, {{"R", id_r}}},
      {raiser_r, {{"R", Term::throw_("R", Ty::named("R"))}}},
      {thrower_t, {{"T", f}}},
      // n = 2
      {raiser_r, {{"T", f}, {"R", id_r}}},
      {thrower_t, {{"T", f}, {"R", id_r}}},
      {thrower_t, {{"R", id_r}, {"T", f}}},
      {thrower_t, {{"T", f}, {"T", Term::throw_("T", Ty::named("R"))}}},
  };
  auto models = enumerate_models(sig, 3, 1000000);
  long long checked = 0;
  for (const auto& [body, handlers] : cases) {
    Term tc = Term::try_catch(body, handlers);
    for (const auto& m : models) {
      EffFunction via_elab = interpret(sig, m, tc);
      EffFunction oracle = exdec_tests::den_handle_oracle(sig, m, body, handlers);
      if (!(via_elab == oracle)) {
        o.fail("tables differ for " + to_string(tc) + " in " + m.str(sig));
        return o;
      }
      ++checked;
    }
  }
  o.detail = std::to_string(cases.size()) + " forms x " +
             std::to_string(models.size()) + " models, " +
             std::to_string(checked) + " table comparisons, all exact";
  return o;
}

// 4. with handlers [(T,g1),(T,g2)] every propagator table for g2 leaves the
//    interpretation unchanged, exhaustively at carriers <= 2
Outcome criterion4() {
  Outcome o;
  Signature sig;
  sig.add_type("A").add_type("B").add_exception("T");
  sig.add_op("u", "A", "T").add_op("w", "T", "B").add_op("g2", "T", "B");
  sig.validate();
  Signature base;
  base.add_type("A").add_type("B").add_exception("T");
  base.add_op("u", "A", "T").add_op("w", "T", "B");
  base.validate();

  std::vector<Term> bodies = {
      Term::compose(Term::throw_("T", Ty::named("B")), Term::base_op("u")),
      Term::compose(Term::base_op("w"), Term::base_op("u")),
  };
  long long models_checked = 0, tables_checked = 0;
  for (const auto& m : enumerate_models(base, 2, 1000000)) {
    std::vector<EffValue> outputs;
    for (int v = 0; v < m.carrier.at("B"); ++v)
      outputs.push_back(EffValue::ordinary(v));
    for (const auto& e : exception_values(sig, m)) outputs.push_back(e);
    int t_size = m.carrier.at("T");
    if (t_size > 0 && outputs.empty()) continue;
    long long combos = 1;
    for (int i = 0; i < t_size; ++i)
      combos *= static_cast<long long>(outputs.size());
    for (const Term& body : bodies) {
      Term tc = Term::try_catch(
          body, {{"T", Term::base_op("w")}, {"T", Term::base_op("g2")}});
      std::set<std::string> results;
      for (long long c = 0; c < combos; ++c) {
        EffFunction g2(sig, m, Ty::named("T"), Ty::named("B"));
        long long code = c;
        for (int i = 0; i < g2.input_count(); ++i) {
          EffValue in = g2.input_at(i);
          if (in.exceptional) {
            g2.at_index(i) = in;
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
          const EffValue& v = res.at_index(i);
          flat += v.exceptional ? "e" + std::to_string(v.exc_type) + "." +
                                      std::to_string(v.val) + ","
                                : "o" + std::to_string(v.val) + ",";
        }
        results.insert(flat);
        ++tables_checked;
      }
      if (results.size() > 1) {
        o.fail("shadowed handler changed the result in " + m.str(sig));
        return o;
      }
    }
    ++models_checked;
  }
  o.require(models_checked > 0, "no models enumerated");
  o.detail = std::to_string(models_checked) + " models, " +
             std::to_string(tables_checked) +
             " shadowed propagator tables, interpretation unchanged";
  return o;
}

// 5. the untagging case equations hold exhaustively: two exceptional types
//    (carriers <= 3), and the cast routing on the chain S <= R <= T
//    (carriers <= 2)
Outcome criterion5() {
  Outcome o;
  Signature sig;
  sig.add_exception("T").add_exception("R");
  sig.validate();
  long long checks = 0;
  for (const auto& m : enumerate_models(sig, 3, 1000000)) {
    for (const auto& t : sig.exceptional()) {
      EffFunction untag_t = interpret(sig, m, Term::untag(t));
      EffFunction tag_t = interpret(sig, m, Term::tag(t));
      for (int v = 0; v < m.carrier.at(t); ++v) {
        EffValue tagged = tag_t(EffValue::ordinary(v));
        if (!(tagged == EffValue::exception(sig.exceptional_index(t), v))) {
          o.fail("tag failed to inject in " + m.str(sig));
          return o;
        }
        ++checks;
      }
      for (const auto& e : exception_values(sig, m)) {
        const TypeName& origin = sig.exceptional()[static_cast<size_t>(e.exc_type)];
        EffValue want = origin == t ? EffValue::ordinary(e.val) : e;
        if (!(untag_t(e) == want)) {
          o.fail("untag case equation failed in " + m.str(sig));
          return o;
        }
        ++checks;
      }
    }
  }

  Signature chain;
  chain.add_exception("T").add_exception("R").add_exception("S");
  chain.add_subtype("S", "R").add_subtype("R", "T");
  chain.validate();
  long long chain_models = 0;
  for (const auto& m : enumerate_models(chain, 2, 1000000)) {
    ++chain_models;
    for (const auto& t : chain.exceptional()) {
      EffFunction untag_t = interpret(chain, m, Term::untag(t));
      for (const auto& e : exception_values(chain, m)) {
        const TypeName& origin =
            chain.exceptional()[static_cast<size_t>(e.exc_type)];
        EffValue want = chain.cast_exists(origin, t)
                            ? EffValue::ordinary(m.cast_apply(origin, t, e.val))
                            : e;
        if (!(untag_t(e) == want)) {
          o.fail("hierarchy untag deviated in " + m.str(chain));
          return o;
        }
        ++checks;
      }
    }
  }
  o.require(chain_models > 0, "no chain models enumerated");
  o.detail = std::to_string(checks) + " case-equation checks (" +
             std::to_string(chain_models) + " chain models), zero deviations";
  return o;
}

// 6. dynamic rank on 100 seeded 5x5 matrices, moduli {6, 15, 105, 2310}:
//    moduli multiply back, every factor rank matches the prime oracle, and
//    restart/continue agree
Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(0x5eed2310);
  std::uniform_int_distribution<dynev::Int> dist(-30, 30);
  long long splits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    dynev::Matrix m(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) m.at(i, j) = dist(rng);
    for (dynev::Int modulus : {6LL, 15LL, 105LL, 2310LL}) {
      dynev::SplitRankResult restart =
          dynev::dynamic_rank(m, modulus, dynev::SplitMode::Restart);
      dynev::SplitRankResult cont =
          dynev::dynamic_rank(m, modulus, dynev::SplitMode::Continue);
      if (!(restart == cont)) {
        o.fail("modes disagree at trial " + std::to_string(trial) + ", m=" +
               std::to_string(modulus));
        return o;
      }
      dynev::Int prod = 1;
      for (const auto& [r, mi] : restart.parts) {
        prod *= mi;
        dynev::Int rest = mi;
        for (dynev::Int p = 2; p <= rest; ++p) {
          if (rest % p != 0) continue;  // p is prime when reached this way
          while (rest % p == 0) rest /= p;
          if (dynev::prime_field_rank_oracle(m, p) != r) {
            o.fail("factor rank mismatch: trial " + std::to_string(trial) +
                   " modulus " + std::to_string(mi) + " prime " +
                   std::to_string(p));
            return o;
          }
        }
      }
      if (prod != modulus) {
        o.fail("moduli do not multiply back at trial " + std::to_string(trial));
        return o;
      }
      splits += static_cast<long long>(restart.parts.size()) - 1;
    }
  }
  o.detail = "100 matrices x 4 moduli; " + std::to_string(splits) +
             " splits exercised; oracle agreement and mode equality exact";
  return o;
}

// 7. decoration laws on 1000 generated terms: pure/propagator tables obey
//    their laws in every enumerated model, elaboration is idempotent and
//    preserves arity and decoration
Outcome criterion7() {
  Outcome o;
  Signature plain = harness_sig();
  Signature chain;
  chain.add_exception("T").add_exception("R").add_exception("S");
  chain.add_subtype("S", "R").add_subtype("R", "T");
  chain.add_op("f", "T", "R");
  chain.validate();

  long long terms_checked = 0;
  auto run = [&](const Signature& sig, int want, std::uint64_t seed) {
    auto models = enumerate_models(sig, 2, 200);
    TermGen gen(sig, seed);
    int done = 0;
    for (int i = 0; done < want && i < want * 4; ++i) {
      auto t = gen.gen_any(4);
      if (!t) continue;
      ++done;
      ++terms_checked;
      Deco d = infer_decoration(sig, *t);
      Term e = elaborate(sig, *t);
      if (!(elaborate(sig, e) == e)) {
        o.fail("elaboration not idempotent for " + to_string(*t));
        return;
      }
      if (!(typecheck(sig, e) == typecheck(sig, *t))) {
        o.fail("elaboration changed the arity of " + to_string(*t));
        return;
      }
      if (infer_decoration(sig, e) > d) {
        o.fail("elaboration raised the decoration of " + to_string(*t));
        return;
      }
      for (const auto& m : models) {
        EffFunction tbl = interpret(sig, m, *t);
        if (d <= Deco::Propagator && !tbl.propagates_exceptions()) {
          o.fail("propagator law violated by " + to_string(*t));
          return;
        }
        if (d == Deco::Pure && !tbl.is_pure_shaped()) {
          o.fail("pure law violated by " + to_string(*t));
          return;
        }
      }
    }
    if (done < want)
      o.fail("generator produced only " + std::to_string(done) + " terms");
  };
  run(plain, 700, 111);
  if (o.pass) run(chain, 300, 222);
  o.detail = std::to_string(terms_checked) +
             " generated terms; table laws, idempotence and preservation hold";
  return o;
}

}  // namespace

int main() {
  struct Entry {
    int num;
    const char* label;
    Outcome (*fn)();
    double budget_secs;  // 0 = no stated budget
  };
  const Entry entries[] = {
      {1, "lemma derivation + mutation rejection", criterion1, 1.0},
      {2, "rule-by-rule soundness vs finite models", criterion2, 300.0},
      {3, "handling coherence against the recov transcription", criterion3, 60.0},
      {4, "shadowed handlers are inert", criterion4, 0.0},
      {5, "untagging case equations, flat and hierarchical", criterion5, 0.0},
      {6, "dynamic-evaluation rank splitting", criterion6, 30.0},
      {7, "decoration laws and elaboration stability", criterion7, 0.0},
  };
  int failures = 0;
  for (const Entry& e : entries) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o.pass = false;
      o.detail = std::string("exception: ") + ex.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (e.budget_secs > 0 && secs > e.budget_secs) {
      o.pass = false;
      o.detail += "; exceeded the " + std::to_string(e.budget_secs) +
                  " s budget";
    }
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << e.num << ": "
         << e.label << ": " << o.detail << " (" << secs << " s)";
    std::cout << line.str() << std::endl;
    if (!o.pass) ++failures;
  }
  if (failures == 0)
    std::cout << "ACCEPTANCE: all 7 criteria passed" << std::endl;
  else
    std::cout << "ACCEPTANCE: " << failures << " criteria FAILED" << std::endl;
  return failures == 0 ? 0 : 1;
}
