#ifndef EXDEC_KERNEL_HPP
#define EXDEC_KERNEL_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "exdec/term.hpp"

namespace exdec {

enum class EqMode { Strong, Weak };

// A strong (==) or weak (~~) equation between terms of equal arity.
struct Equation {
  Term lhs, rhs;
  EqMode mode;
  friend bool operator==(const Equation& a, const Equation& b) {
    return a.mode == b.mode && a.lhs == b.lhs && a.rhs == b.rhs;
  }
};

// Judgments a proof node may conclude besides equations.
struct Formation {  // t : dom -> cod
  Term term;
  Arity arity;
  friend bool operator==(const Formation& a, const Formation& b) {
    return a.term == b.term && a.arity == b.arity;
  }
};
struct DecorationClaim {  // t may be used at decoration deco
  Term term;
  Deco deco;
  friend bool operator==(const DecorationClaim& a, const DecorationClaim& b) {
    return a.term == b.term && a.deco == b.deco;
  }
};

using Conclusion = std::variant<Equation, Formation, DecorationClaim>;

bool operator==(const Conclusion& a, const Conclusion& b);
std::string to_string(const Conclusion& c);

// One schema per rule conclusion. The first seven groups mirror the decorated
// proof rules for exceptions; ByTypecheck / ByInference discharge formation
// and decoration premises by a kernel call and are reported as such in the
// verdict trace.
enum class RuleName {
  // group 1: monadic equational rules, strong part
  ComposeFormation,
  IdFormation,
  StrongRefl,
  StrongSym,
  StrongTrans,
  StrongSubst,
  StrongRepl,
  Assoc,
  RightUnit,
  LeftUnit,
  // group 2: decorations and weak equations
  PureToPpg,
  PpgToCtc,
  IdPure,
  PureComposeClosure,
  PpgComposeClosure,
  PpgWeakToStrong,
  StrongToWeak,
  WeakRefl,
  WeakSym,
  WeakTrans,
  WeakSubst,
  WeakRepl,
  // group 3: empty type
  EmptyFormation,
  EmptyPure,
  EmptyWeakUnique,
  // group 4: case distinction over X + 0
  CopairFormation,
  CopairWeakEq,
  CopairEmptyEq,
  StrongFromWeakAndEmpty,
  // group 5: propagating (downcast)
  DowncastFormation,
  DowncastPpg,
  DowncastWeakEq,
  // group 6: tagging
  TagFormation,
  TagPpg,
  TagCaseFormation,
  TagCaseWeakEq,
  StrongFromAllTags,
  // group 7: untagging
  UntagFormation,
  UntagCtc,
  UntagMatch,
  UntagMismatch,
  UntagCast,  // hierarchy variant: R <= T yields untag_T o tag_R ~~ cast_R_T
  // discharge pseudo-rules
  ByTypecheck,
  ByInference,
};

// The rules of the seven figure groups, excluding the hierarchy variant and
// the discharge pseudo-rules.
const std::vector<RuleName>& figure_rules();

const char* rule_name(RuleName r);
std::optional<RuleName> rule_from_name(const std::string& name);

struct Proof {
  RuleName rule;
  std::vector<Proof> premises;
  Conclusion conclusion;
};

struct Verdict {
  bool accepted = false;
  std::string path;    // failing node, e.g. "root.2.0"; empty when accepted
  std::string reason;  // failing rule/schema diagnostic
  std::optional<Errc> code;
  std::vector<std::string> trace;  // one line per checked node
};

// Checks a proof tree bottom-up. Accepted iff every node instantiates its
// rule schema at its premises' conclusions.
Verdict check_proof(const Signature& sig, const Proof& p);

// Checks a single rule application given the already-established premise
// conclusions. Returns an error message on rejection. This is the same
// routine check_proof applies at every node.
struct NodeError {
  Errc code;
  std::string message;
};
std::optional<NodeError> check_node(const Signature& sig, RuleName rule,
                                    const std::vector<Conclusion>& premises,
                                    const Conclusion& conclusion);

// First-order metavariable bindings for rule instantiation. Family
// metavariables (one term per exceptional type) are keyed "name:Type".
struct Bindings {
  std::map<std::string, Term> terms;
  std::map<std::string, Ty> types;

  const Term& term(const std::string& key) const;  // throws MissingBinding
  const Ty& type(const std::string& key) const;    // throws MissingBinding
};

// Premises and conclusion of a rule schema instantiated at given bindings.
struct RuleInstance {
  std::vector<Conclusion> premises;
  Conclusion conclusion;
};

// Instantiates a schema. Throws MissingBinding or SideConditionViolated; also
// ArityMismatch etc. when the bound terms do not fit the schema arities.
RuleInstance instantiate_schema(const Signature& sig, RuleName rule,
                                const Bindings& b);

// The conclusion a rule yields under the bindings.
Conclusion instantiate_rule(const Signature& sig, RuleName rule,
                            const Bindings& b);

}  // namespace exdec

#endif
