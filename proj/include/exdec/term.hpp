#ifndef EXDEC_TERM_HPP
#define EXDEC_TERM_HPP

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "exdec/signature.hpp"

namespace exdec {

// Decorations, ordered by permissiveness. A pure term neither raises nor
// recovers, a propagator may raise but fixes every exception, a catcher may
// also recover.
enum class Deco { Pure = 0, Propagator = 1, Catcher = 2 };

inline Deco deco_max(Deco a, Deco b) { return a < b ? b : a; }
const char* deco_name(Deco d);        // "pure" / "propagator" / "catcher"
const char* deco_short_name(Deco d);  // "pure" / "ppg" / "ctc"

class Term;

struct IdNode {
  Ty at;
};
struct BaseOpNode {
  std::string op;
};
struct ComposeNode {  // outer o inner
  std::shared_ptr<const Term> outer, inner;
};
struct EmptyNode {  // the map [ ]_X : 0 -> X
  Ty cod;
};
struct TagNode {  // T -> 0
  TypeName type;
};
struct UntagNode {  // 0 -> T
  TypeName type;
};
struct DowncastNode {
  std::shared_ptr<const Term> body;
};
struct CopairNode {  // [ on_value | on_exception ], X -> Y with k : 0 -> Y
  std::shared_ptr<const Term> on_value, on_exception;
};
struct TagCaseNode {  // one branch per exceptional type, 0 -> Y
  std::vector<std::pair<TypeName, std::shared_ptr<const Term>>> branches;
};
struct CastNode {  // R -> T, requires R <= T
  TypeName from, to;
};
struct ThrowNode {  // T -> Y
  TypeName type;
  Ty cod;
};
struct TryCatchNode {
  std::shared_ptr<const Term> body;
  std::vector<std::pair<TypeName, std::shared_ptr<const Term>>> handlers;
};

using TermNode =
    std::variant<IdNode, BaseOpNode, ComposeNode, EmptyNode, TagNode, UntagNode,
                 DowncastNode, CopairNode, TagCaseNode, CastNode, ThrowNode,
                 TryCatchNode>;

// Immutable term with structural equality. Copying is cheap (shared node).
// A default-constructed Term is id at the empty type.
class Term {
 public:
  Term() : Term(IdNode{Ty::empty()}) {}

  static Term id(Ty at);
  static Term base_op(std::string op);
  static Term compose(Term outer, Term inner);
  static Term empty(Ty cod);
  static Term tag(TypeName type);
  static Term untag(TypeName type);
  static Term downcast(Term body);
  static Term copair(Term on_value, Term on_exception);
  static Term tag_case(std::vector<std::pair<TypeName, Term>> branches);
  static Term cast(TypeName from, TypeName to);
  static Term throw_(TypeName type, Ty cod);
  static Term try_catch(Term body, std::vector<std::pair<TypeName, Term>> handlers);

  const TermNode& node() const { return *node_; }

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(node_.get());
  }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  explicit Term(TermNode n) : node_(std::make_shared<TermNode>(std::move(n))) {}
  std::shared_ptr<const TermNode> node_;
};

struct Arity {
  Ty dom, cod;
  friend bool operator==(const Arity& a, const Arity& b) {
    return a.dom == b.dom && a.cod == b.cod;
  }
  friend bool operator!=(const Arity& a, const Arity& b) { return !(a == b); }
  std::string str() const { return dom.str() + " -> " + cod.str(); }
};

// Checks arities bottom-up and returns the term's dom/cod.
// Throws Error: ArityMismatch, UnknownOp, UnknownType, IllegalCast,
// EmptyHandlerList.
Arity typecheck(const Signature& sig, const Term& t);

// Minimal decoration of a well-typed term. Throws HandlerNotPropagator when a
// try/catch body or handler infers as a catcher.
Deco infer_decoration(const Signature& sig, const Term& t);

// Expands throw into [ ]_Y o tag_T and try/catch into the
// downcast-copair-untag form; the result contains no throw/try-catch nodes.
// Idempotent; preserves arity and inferred decoration.
Term elaborate(const Signature& sig, const Term& t);

// Renders a term in the surface syntax (composition prints right-associated).
std::string to_string(const Term& t);

}  // namespace exdec

#endif
