#ifndef EXDEC_SEMANTICS_HPP
#define EXDEC_SEMANTICS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exdec/kernel.hpp"
#include "exdec/term.hpp"

namespace exdec {

// Finite model: a carrier size per declared type (elements are 0..n-1, the
// empty type always has size 0), a total table per base operation and, under a
// hierarchy, a table per proper subtype pair. cast tables for (T,T) are
// implicitly the identity.
struct Model {
  std::map<TypeName, int> carrier;
  std::map<std::string, std::vector<int>> op_table;
  std::map<std::pair<TypeName, TypeName>, std::vector<int>> cast_table;

  int size_of(const Ty& t) const;
  // Table for R <= T including the implicit identity at R == T.
  int cast_apply(const TypeName& from, const TypeName& to, int v) const;

  std::string str(const Signature& sig) const;  // surface-syntax printout
};

// Throws InvalidModel unless every declared type has a carrier, every op has a
// total table into its codomain, and cast tables exist for every proper
// subtype pair and compose coherently.
void validate_model(const Signature& sig, const Model& m);

// A value of the effectful domain [X] + Exc: ordinary carrier element or an
// exception tagged with its exceptional type of origin.
struct EffValue {
  bool exceptional = false;
  int exc_type = -1;  // index into sig.exceptional() when exceptional
  int val = 0;

  static EffValue ordinary(int v) { return EffValue{false, -1, v}; }
  static EffValue exception(int etype, int v) { return EffValue{true, etype, v}; }

  friend bool operator==(const EffValue& a, const EffValue& b) {
    return a.exceptional == b.exceptional && a.val == b.val &&
           (!a.exceptional || a.exc_type == b.exc_type);
  }
  friend bool operator!=(const EffValue& a, const EffValue& b) { return !(a == b); }
};

std::string to_string(const Signature& sig, const Model& m, const EffValue& v);

// Enumeration of Exc = disjoint union of the exceptional carriers, in
// signature declaration order.
std::vector<EffValue> exception_values(const Signature& sig, const Model& m);

// Total function table [X] + Exc -> [Y] + Exc. Inputs are indexed ordinary
// values first (0..|X|-1) then exceptions in enumeration order.
class EffFunction {
 public:
  EffFunction(const Signature& sig, const Model& m, Ty dom, Ty cod);

  const Ty& dom() const { return dom_; }
  const Ty& cod() const { return cod_; }

  int input_count() const { return static_cast<int>(table_.size()); }
  int ordinary_count() const { return ordinary_; }

  const EffValue& operator()(const EffValue& in) const;
  EffValue& at_index(int i) { return table_[i]; }
  const EffValue& at_index(int i) const { return table_[i]; }
  // The input enumerated at index i (ordinary then exceptional).
  EffValue input_at(int i) const;
  int index_of(const EffValue& in) const;

  // Table laws of the decorations.
  bool propagates_exceptions() const;  // phi(e) = e for every exception
  bool is_pure_shaped() const;         // propagates and ordinary -> ordinary

  friend bool operator==(const EffFunction& a, const EffFunction& b) {
    return a.dom_ == b.dom_ && a.cod_ == b.cod_ && a.table_ == b.table_;
  }
  friend bool operator!=(const EffFunction& a, const EffFunction& b) {
    return !(a == b);
  }

 private:
  Ty dom_, cod_;
  int ordinary_ = 0;                // |[dom]|
  std::vector<EffValue> exc_enum_;  // shared enumeration of Exc
  std::vector<EffValue> table_;
};

// Extension hook: overrides the interpretation of selected base operations
// with explicit tables (used by test harnesses to quantify over propagator
// tables that no syntactic term denotes).
using OpOverrides = std::map<std::string, EffFunction>;

// Interprets a well-typed term as a total table on [X] + Exc.
EffFunction interpret(const Signature& sig, const Model& m, const Term& t);
EffFunction interpret(const Signature& sig, const Model& m, const Term& t,
                      const OpOverrides& overrides);

// Strong: tables agree on every input; weak: on ordinary inputs only.
bool eval_equation(const Signature& sig, const Model& m, const Equation& e);
bool eval_equation(const Signature& sig, const Model& m, const Equation& e,
                   const OpOverrides& overrides);

// Semantic truth of a proof conclusion in a model: equations via
// eval_equation, formations via typecheck, decoration claims via the table
// laws (catcher claims always hold).
bool holds_in_model(const Signature& sig, const Model& m, const Conclusion& c);

constexpr std::uint64_t kDefaultModelSeed = 0x5eeddecULL;

// Streams models of the signature with carriers of size <= size_bound.
// Exhaustive when the model space does not exceed the budget, otherwise a
// deterministic seeded sample of `budget` models. Incoherent cast-table
// combinations are skipped.
class ModelEnumerator {
 public:
  ModelEnumerator(const Signature& sig, int size_bound, long long budget,
                  std::uint64_t seed = kDefaultModelSeed);

  std::optional<Model> next();
  bool exhaustive() const { return exhaustive_; }
  // Count of the raw model space (carriers x tables), before coherence checks.
  double space_size() const { return space_; }

 private:
  std::optional<Model> build_indexed(long long index) const;

  const Signature& sig_;
  int bound_;
  long long budget_;
  std::uint64_t seed_;
  bool exhaustive_;
  double space_;
  long long emitted_ = 0;
  long long cursor_ = 0;
  long long space_ll_ = 0;
  std::uint64_t rng_state_;
};

// Materializes the stream (mainly for tests and the CLI).
std::vector<Model> enumerate_models(const Signature& sig, int size_bound,
                                    long long budget,
                                    std::uint64_t seed = kDefaultModelSeed);

// Deterministic random terms of a requested arity, bounded depth, used for
// metavariable bindings and law testing.
class TermGen {
 public:
  TermGen(const Signature& sig, std::uint64_t seed);

  // A term of the exact arity, or nullopt when the grammar cannot realize it.
  // max_deco restricts the grammar so the result infers at most that
  // decoration.
  std::optional<Term> gen(const Ty& dom, const Ty& cod, int depth,
                          Deco max_deco = Deco::Catcher);
  // A term of any realizable arity (types drawn from the signature + 0).
  std::optional<Term> gen_any(int depth, Arity* arity_out = nullptr);

  Ty random_type(bool allow_empty = true);
  // uniform draw from [0, n)
  int pick(int n);

 private:
  std::uint64_t next_u64();

  const Signature& sig_;
  std::uint64_t state_;
};

enum class SchemaVariant {
  Standard,
  // Negative control: the weak-substitution schema with the pure-decoration
  // side condition weakened to propagator.
  CorruptWeakSubst,
};

struct SoundnessReport {
  bool passed = true;
  RuleName rule;
  long long bindings_tried = 0;
  long long bindings_used = 0;      // bindings that instantiated the schema
  long long instances_checked = 0;  // (binding, model) pairs evaluated
  long long nonvacuous = 0;         // pairs with all premises true
  std::uint64_t seed = 0;
  std::string counterexample;  // description incl. model, when !passed

  std::string str() const;
};

// Tests one rule schema against the denotational semantics: samples `trials`
// metavariable bindings, enumerates models with carriers <= size_bound, and
// requires the conclusion to hold wherever all premises hold.
SoundnessReport soundness_check(const Signature& sig, RuleName rule,
                                int trials, int size_bound,
                                std::uint64_t seed = 0x50f1,
                                SchemaVariant variant = SchemaVariant::Standard,
                                long long model_budget = 100000);

}  // namespace exdec

#endif
