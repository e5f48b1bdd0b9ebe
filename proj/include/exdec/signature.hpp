#ifndef EXDEC_SIGNATURE_HPP
#define EXDEC_SIGNATURE_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "exdec/error.hpp"

namespace exdec {

using TypeName = std::string;

// A type endpoint of an arrow: either a declared type or the private empty
// type, which users cannot name. The empty type prints as "0".
class Ty {
 public:
  Ty() = default;

  static Ty empty() { return Ty(); }
  static Ty named(TypeName n) {
    Ty t;
    t.name_ = std::move(n);
    return t;
  }

  bool is_empty() const { return name_.empty(); }
  const TypeName& name() const { return name_; }
  std::string str() const { return is_empty() ? "0" : name_; }

  friend bool operator==(const Ty& a, const Ty& b) { return a.name_ == b.name_; }
  friend bool operator!=(const Ty& a, const Ty& b) { return !(a == b); }
  friend bool operator<(const Ty& a, const Ty& b) { return a.name_ < b.name_; }

 private:
  TypeName name_;  // empty string encodes the empty type
};

struct OpDecl {
  std::string name;
  TypeName dom;
  TypeName cod;
};

// Three-layer signature: declared base types and operations, the subset of
// exceptional types, and an optional subtyping order on the exceptional part.
// Mutable while being assembled; validate() checks every invariant, closes the
// subtyping relation and freezes the signature.
class Signature {
 public:
  Signature& add_type(const TypeName& name);
  // Declares the type too when it is not yet known.
  Signature& add_exception(const TypeName& name);
  Signature& add_op(const std::string& name, const TypeName& dom,
                    const TypeName& cod);
  // Declared subtyping edge sub <= sup; implies the hierarchy is enabled.
  Signature& add_subtype(const TypeName& sub, const TypeName& sup);
  // Opt into the hierarchy (cast operations) without declaring edges.
  Signature& enable_hierarchy();

  // Checks all invariants, computes the reflexive-transitive closure of the
  // declared subtyping edges and marks the signature validated. Throws Error
  // with DuplicateName, UnknownType, NonExceptionalSubtype or NonPartialOrder.
  Signature& validate();
  bool validated() const { return validated_; }

  const std::vector<TypeName>& types() const { return types_; }
  const std::vector<TypeName>& exceptional() const { return exceptional_; }
  const std::vector<OpDecl>& ops() const { return ops_; }

  bool has_type(const TypeName& name) const;
  bool is_exceptional(const TypeName& name) const;
  const OpDecl* find_op(const std::string& name) const;
  const OpDecl& op(const std::string& name) const;  // throws UnknownOp

  bool hierarchy_enabled() const { return hierarchy_; }
  // Declared edges, before closure (for printing).
  const std::vector<std::pair<TypeName, TypeName>>& subtype_decls() const {
    return subtype_decls_;
  }

  // True iff r <= t in the validated order. Requires both exceptional.
  bool cast_exists(const TypeName& r, const TypeName& t) const;

  // Index of an exceptional type in declaration order (for model tables).
  int exceptional_index(const TypeName& name) const;

 private:
  void require_mutable() const;

  std::vector<TypeName> types_;
  std::vector<TypeName> exceptional_;
  std::vector<OpDecl> ops_;
  std::vector<std::pair<TypeName, TypeName>> subtype_decls_;
  std::set<std::pair<TypeName, TypeName>> subtype_closure_;
  bool hierarchy_ = false;
  bool validated_ = false;
};

}  // namespace exdec

#endif
