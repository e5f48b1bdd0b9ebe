#include "exdec/signature.hpp"

#include <algorithm>
#include <cctype>

namespace exdec {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::UnknownType: return "UnknownType";
    case Errc::NonPartialOrder: return "NonPartialOrder";
    case Errc::NonExceptionalSubtype: return "NonExceptionalSubtype";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::UnknownOp: return "UnknownOp";
    case Errc::IllegalCast: return "IllegalCast";
    case Errc::EmptyHandlerList: return "EmptyHandlerList";
    case Errc::HandlerNotPropagator: return "HandlerNotPropagator";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::DecorationViolation: return "DecorationViolation";
    case Errc::UnknownRule: return "UnknownRule";
    case Errc::MissingBinding: return "MissingBinding";
    case Errc::SideConditionViolated: return "SideConditionViolated";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::NotPrime: return "NotPrime";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownIdentifier: return "UnknownIdentifier";
  }
  return "Error";
}

void Signature::require_mutable() const {
  if (validated_)
    throw Error(Errc::DuplicateName, "signature is frozen after validation");
}

namespace {
bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}
}  // namespace

Signature& Signature::add_type(const TypeName& name) {
  require_mutable();
  if (!valid_identifier(name))
    throw Error(Errc::UnknownType, "type name must be an identifier");
  if (has_type(name)) throw Error(Errc::DuplicateName, "type " + name);
  types_.push_back(name);
  return *this;
}

Signature& Signature::add_exception(const TypeName& name) {
  require_mutable();
  if (!has_type(name)) add_type(name);
  if (is_exceptional(name))
    throw Error(Errc::DuplicateName, "exception " + name);
  exceptional_.push_back(name);
  return *this;
}

Signature& Signature::add_op(const std::string& name, const TypeName& dom,
                             const TypeName& cod) {
  require_mutable();
  if (!valid_identifier(name))
    throw Error(Errc::UnknownOp, "op name must be an identifier");
  if (find_op(name)) throw Error(Errc::DuplicateName, "op " + name);
  ops_.push_back(OpDecl{name, dom, cod});
  return *this;
}

Signature& Signature::add_subtype(const TypeName& sub, const TypeName& sup) {
  require_mutable();
  hierarchy_ = true;
  subtype_decls_.emplace_back(sub, sup);
  return *this;
}

Signature& Signature::enable_hierarchy() {
  require_mutable();
  hierarchy_ = true;
  return *this;
}

Signature& Signature::validate() {
  if (validated_) return *this;
  for (const auto& op : ops_) {
    if (!has_type(op.dom)) throw Error(Errc::UnknownType, "op " + op.name + " domain " + op.dom);
    if (!has_type(op.cod)) throw Error(Errc::UnknownType, "op " + op.name + " codomain " + op.cod);
  }
  for (const auto& [sub, sup] : subtype_decls_) {
    if (!has_type(sub) || !has_type(sup))
      throw Error(Errc::UnknownType, "subtype " + sub + " <= " + sup);
    if (!is_exceptional(sub) || !is_exceptional(sup))
      throw Error(Errc::NonExceptionalSubtype, sub + " <= " + sup);
  }

  // reflexive-transitive closure over the exceptional types
  subtype_closure_.clear();
  for (const auto& t : exceptional_) subtype_closure_.emplace(t, t);
  for (const auto& e : subtype_decls_) subtype_closure_.insert(e);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<TypeName, TypeName>> add;
    for (const auto& [a, b] : subtype_closure_)
      for (const auto& [c, d] : subtype_closure_)
        if (b == c && !subtype_closure_.count({a, d})) add.emplace_back(a, d);
    for (auto& e : add) subtype_closure_.insert(e), changed = true;
  }
  for (const auto& [a, b] : subtype_closure_)
    if (a != b && subtype_closure_.count({b, a}))
      throw Error(Errc::NonPartialOrder,
                  "subtyping cycle through " + a + " and " + b);

  validated_ = true;
  return *this;
}

bool Signature::has_type(const TypeName& name) const {
  return std::find(types_.begin(), types_.end(), name) != types_.end();
}

bool Signature::is_exceptional(const TypeName& name) const {
  return std::find(exceptional_.begin(), exceptional_.end(), name) !=
         exceptional_.end();
}

const OpDecl* Signature::find_op(const std::string& name) const {
  for (const auto& op : ops_)
    if (op.name == name) return &op;
  return nullptr;
}

const OpDecl& Signature::op(const std::string& name) const {
  const OpDecl* d = find_op(name);
  if (!d) throw Error(Errc::UnknownOp, name);
  return *d;
}

bool Signature::cast_exists(const TypeName& r, const TypeName& t) const {
  if (!is_exceptional(r)) throw Error(Errc::UnknownType, r + " is not exceptional");
  if (!is_exceptional(t)) throw Error(Errc::UnknownType, t + " is not exceptional");
  return subtype_closure_.count({r, t}) > 0;
}

int Signature::exceptional_index(const TypeName& name) const {
  for (size_t i = 0; i < exceptional_.size(); ++i)
    if (exceptional_[i] == name) return static_cast<int>(i);
  throw Error(Errc::UnknownType, name + " is not exceptional");
}

}  // namespace exdec
