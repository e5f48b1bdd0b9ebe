#include "exdec/term.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace exdec {

const char* deco_name(Deco d) {
  switch (d) {
    case Deco::Pure: return "pure";
    case Deco::Propagator: return "propagator";
    case Deco::Catcher: return "catcher";
  }
  return "?";
}

const char* deco_short_name(Deco d) {
  switch (d) {
    case Deco::Pure: return "pure";
    case Deco::Propagator: return "ppg";
    case Deco::Catcher: return "ctc";
  }
  return "?";
}

namespace {
std::shared_ptr<const Term> box(Term t) {
  return std::make_shared<const Term>(std::move(t));
}
}  // namespace

Term Term::id(Ty at) { return Term(IdNode{std::move(at)}); }
Term Term::base_op(std::string op) { return Term(BaseOpNode{std::move(op)}); }
Term Term::compose(Term outer, Term inner) {
  return Term(ComposeNode{box(std::move(outer)), box(std::move(inner))});
}
Term Term::empty(Ty cod) { return Term(EmptyNode{std::move(cod)}); }
Term Term::tag(TypeName type) { return Term(TagNode{std::move(type)}); }
Term Term::untag(TypeName type) { return Term(UntagNode{std::move(type)}); }
Term Term::downcast(Term body) { return Term(DowncastNode{box(std::move(body))}); }
Term Term::copair(Term on_value, Term on_exception) {
  return Term(CopairNode{box(std::move(on_value)), box(std::move(on_exception))});
}
Term Term::tag_case(std::vector<std::pair<TypeName, Term>> branches) {
  // branch order carries no meaning (one branch per type); keep it canonical
  std::sort(branches.begin(), branches.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  TagCaseNode n;
  for (auto& [t, f] : branches) n.branches.emplace_back(t, box(std::move(f)));
  return Term(std::move(n));
}
Term Term::cast(TypeName from, TypeName to) {
  return Term(CastNode{std::move(from), std::move(to)});
}
Term Term::throw_(TypeName type, Ty cod) {
  return Term(ThrowNode{std::move(type), std::move(cod)});
}
Term Term::try_catch(Term body, std::vector<std::pair<TypeName, Term>> handlers) {
  TryCatchNode n;
  n.body = box(std::move(body));
  for (auto& [t, g] : handlers) n.handlers.emplace_back(t, box(std::move(g)));
  return Term(std::move(n));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const TermNode& x = *a.node_;
  const TermNode& y = *b.node_;
  if (x.index() != y.index()) return false;
  struct Eq {
    const TermNode& other;
    bool operator()(const IdNode& n) const {
      return std::get<IdNode>(other).at == n.at;
    }
    bool operator()(const BaseOpNode& n) const {
      return std::get<BaseOpNode>(other).op == n.op;
    }
    bool operator()(const ComposeNode& n) const {
      const auto& o = std::get<ComposeNode>(other);
      return *o.outer == *n.outer && *o.inner == *n.inner;
    }
    bool operator()(const EmptyNode& n) const {
      return std::get<EmptyNode>(other).cod == n.cod;
    }
    bool operator()(const TagNode& n) const {
      return std::get<TagNode>(other).type == n.type;
    }
    bool operator()(const UntagNode& n) const {
      return std::get<UntagNode>(other).type == n.type;
    }
    bool operator()(const DowncastNode& n) const {
      return *std::get<DowncastNode>(other).body == *n.body;
    }
    bool operator()(const CopairNode& n) const {
      const auto& o = std::get<CopairNode>(other);
      return *o.on_value == *n.on_value && *o.on_exception == *n.on_exception;
    }
    bool operator()(const TagCaseNode& n) const {
      const auto& o = std::get<TagCaseNode>(other);
      if (o.branches.size() != n.branches.size()) return false;
      for (size_t i = 0; i < n.branches.size(); ++i)
        if (o.branches[i].first != n.branches[i].first ||
            !(*o.branches[i].second == *n.branches[i].second))
          return false;
      return true;
    }
    bool operator()(const CastNode& n) const {
      const auto& o = std::get<CastNode>(other);
      return o.from == n.from && o.to == n.to;
    }
    bool operator()(const ThrowNode& n) const {
      const auto& o = std::get<ThrowNode>(other);
      return o.type == n.type && o.cod == n.cod;
    }
    bool operator()(const TryCatchNode& n) const {
      const auto& o = std::get<TryCatchNode>(other);
      if (!(*o.body == *n.body) || o.handlers.size() != n.handlers.size())
        return false;
      for (size_t i = 0; i < n.handlers.size(); ++i)
        if (o.handlers[i].first != n.handlers[i].first ||
            !(*o.handlers[i].second == *n.handlers[i].second))
          return false;
      return true;
    }
  };
  return std::visit(Eq{y}, x);
}

namespace {

Ty require_exceptional(const Signature& sig, const TypeName& t,
                       const char* what) {
  if (!sig.is_exceptional(t))
    throw Error(Errc::UnknownType,
                std::string(what) + " needs an exceptional type, got " + t);
  return Ty::named(t);
}

Ty check_ty(const Signature& sig, const Ty& t) {
  if (!t.is_empty() && !sig.has_type(t.name()))
    throw Error(Errc::UnknownType, t.name());
  return t;
}

}  // namespace

Arity typecheck(const Signature& sig, const Term& t) {
  struct V {
    const Signature& sig;
    Arity operator()(const IdNode& n) const {
      Ty a = check_ty(sig, n.at);
      return {a, a};
    }
    Arity operator()(const BaseOpNode& n) const {
      const OpDecl& d = sig.op(n.op);
      return {Ty::named(d.dom), Ty::named(d.cod)};
    }
    Arity operator()(const ComposeNode& n) const {
      Arity inner = typecheck(sig, *n.inner);
      Arity outer = typecheck(sig, *n.outer);
      if (inner.cod != outer.dom)
        throw Error(Errc::ArityMismatch,
                    "composition: " + outer.str() + " after " + inner.str());
      return {inner.dom, outer.cod};
    }
    Arity operator()(const EmptyNode& n) const {
      return {Ty::empty(), check_ty(sig, n.cod)};
    }
    Arity operator()(const TagNode& n) const {
      return {require_exceptional(sig, n.type, "tag"), Ty::empty()};
    }
    Arity operator()(const UntagNode& n) const {
      return {Ty::empty(), require_exceptional(sig, n.type, "untag")};
    }
    Arity operator()(const DowncastNode& n) const {
      return typecheck(sig, *n.body);
    }
    Arity operator()(const CopairNode& n) const {
      Arity g = typecheck(sig, *n.on_value);
      Arity k = typecheck(sig, *n.on_exception);
      if (!k.dom.is_empty())
        throw Error(Errc::ArityMismatch,
                    "copair second component must start at 0, got " + k.str());
      if (k.cod != g.cod)
        throw Error(Errc::ArityMismatch, "copair codomains differ: " + g.str() +
                                             " vs " + k.str());
      return {g.dom, g.cod};
    }
    Arity operator()(const TagCaseNode& n) const {
      if (n.branches.empty())
        throw Error(Errc::ArityMismatch, "case needs one branch per exceptional type");
      std::optional<Ty> cod;
      std::vector<TypeName> seen;
      for (const auto& [tname, f] : n.branches) {
        require_exceptional(sig, tname, "case branch");
        for (const auto& s : seen)
          if (s == tname)
            throw Error(Errc::ArityMismatch, "case has two branches for " + tname);
        seen.push_back(tname);
        Arity a = typecheck(sig, *f);
        if (a.dom != Ty::named(tname))
          throw Error(Errc::ArityMismatch,
                      "case branch for " + tname + " has domain " + a.dom.str());
        if (cod && *cod != a.cod)
          throw Error(Errc::ArityMismatch, "case branch codomains differ");
        cod = a.cod;
      }
      if (seen.size() != sig.exceptional().size())
        throw Error(Errc::ArityMismatch,
                    "case must cover every exceptional type exactly once");
      return {Ty::empty(), *cod};
    }
    Arity operator()(const CastNode& n) const {
      Ty from = require_exceptional(sig, n.from, "cast");
      Ty to = require_exceptional(sig, n.to, "cast");
      if (!sig.cast_exists(n.from, n.to))
        throw Error(Errc::IllegalCast, n.from + " is not a subtype of " + n.to);
      return {from, to};
    }
    Arity operator()(const ThrowNode& n) const {
      return {require_exceptional(sig, n.type, "throw"), check_ty(sig, n.cod)};
    }
    Arity operator()(const TryCatchNode& n) const {
      if (n.handlers.empty())
        throw Error(Errc::EmptyHandlerList, "try/catch needs at least one handler");
      Arity body = typecheck(sig, *n.body);
      for (const auto& [tname, g] : n.handlers) {
        require_exceptional(sig, tname, "catch");
        Arity h = typecheck(sig, *g);
        if (h.dom != Ty::named(tname) || h.cod != body.cod)
          throw Error(Errc::ArityMismatch,
                      "handler for " + tname + " must be " + tname + " -> " +
                          body.cod.str() + ", got " + h.str());
      }
      return body;
    }
  };
  return std::visit(V{sig}, t.node());
}

Deco infer_decoration(const Signature& sig, const Term& t) {
  struct V {
    const Signature& sig;
    Deco operator()(const IdNode&) const { return Deco::Pure; }
    Deco operator()(const BaseOpNode&) const { return Deco::Pure; }
    Deco operator()(const ComposeNode& n) const {
      return deco_max(infer_decoration(sig, *n.outer),
                      infer_decoration(sig, *n.inner));
    }
    Deco operator()(const EmptyNode&) const { return Deco::Pure; }
    Deco operator()(const TagNode&) const { return Deco::Propagator; }
    Deco operator()(const UntagNode&) const { return Deco::Catcher; }
    Deco operator()(const DowncastNode& n) const {
      infer_decoration(sig, *n.body);  // still reject illegal bodies
      return Deco::Propagator;
    }
    Deco operator()(const CopairNode& n) const {
      infer_decoration(sig, *n.on_value);
      infer_decoration(sig, *n.on_exception);
      return Deco::Catcher;
    }
    Deco operator()(const TagCaseNode& n) const {
      for (const auto& [tname, f] : n.branches) infer_decoration(sig, *f);
      return Deco::Catcher;
    }
    Deco operator()(const CastNode&) const { return Deco::Pure; }
    Deco operator()(const ThrowNode&) const { return Deco::Propagator; }
    Deco operator()(const TryCatchNode& n) const {
      if (infer_decoration(sig, *n.body) > Deco::Propagator)
        throw Error(Errc::HandlerNotPropagator, "try body is a catcher");
      for (const auto& [tname, g] : n.handlers)
        if (infer_decoration(sig, *g) > Deco::Propagator)
          throw Error(Errc::HandlerNotPropagator,
                      "handler for " + tname + " is a catcher");
      return Deco::Propagator;
    }
  };
  return std::visit(V{sig}, t.node());
}

namespace {

// recov_n = g_n o untag_{T_n};  recov_i = [ g_i | recov_{i+1} ] o untag_{T_i}
Term build_recov(const std::vector<std::pair<TypeName, Term>>& handlers,
                 size_t i) {
  const auto& [tname, g] = handlers[i];
  if (i + 1 == handlers.size()) return Term::compose(g, Term::untag(tname));
  Term rest = build_recov(handlers, i + 1);
  return Term::compose(Term::copair(g, rest), Term::untag(tname));
}

}  // namespace

Term elaborate(const Signature& sig, const Term& t) {
  struct V {
    const Signature& sig;
    Term operator()(const IdNode& n) const { return Term::id(n.at); }
    Term operator()(const BaseOpNode& n) const { return Term::base_op(n.op); }
    Term operator()(const ComposeNode& n) const {
      return Term::compose(elaborate(sig, *n.outer), elaborate(sig, *n.inner));
    }
    Term operator()(const EmptyNode& n) const { return Term::empty(n.cod); }
    Term operator()(const TagNode& n) const { return Term::tag(n.type); }
    Term operator()(const UntagNode& n) const { return Term::untag(n.type); }
    Term operator()(const DowncastNode& n) const {
      return Term::downcast(elaborate(sig, *n.body));
    }
    Term operator()(const CopairNode& n) const {
      return Term::copair(elaborate(sig, *n.on_value),
                          elaborate(sig, *n.on_exception));
    }
    Term operator()(const TagCaseNode& n) const {
      std::vector<std::pair<TypeName, Term>> bs;
      for (const auto& [tname, f] : n.branches)
        bs.emplace_back(tname, elaborate(sig, *f));
      return Term::tag_case(std::move(bs));
    }
    Term operator()(const CastNode& n) const { return Term::cast(n.from, n.to); }
    Term operator()(const ThrowNode& n) const {
      return Term::compose(Term::empty(n.cod), Term::tag(n.type));
    }
    Term operator()(const TryCatchNode& n) const {
      Term body = elaborate(sig, *n.body);
      std::vector<std::pair<TypeName, Term>> hs;
      for (const auto& [tname, g] : n.handlers)
        hs.emplace_back(tname, elaborate(sig, *g));
      Ty y = typecheck(sig, body).cod;
      Term recov = build_recov(hs, 0);
      return Term::downcast(
          Term::compose(Term::copair(Term::id(y), recov), body));
    }
  };
  typecheck(sig, t);
  infer_decoration(sig, t);
  return std::visit(V{sig}, t.node());
}

namespace {

void print_term(std::ostream& os, const Term& t, bool paren_compose) {
  struct V {
    std::ostream& os;
    bool paren;
    void operator()(const IdNode& n) const { os << "id[" << n.at.str() << "]"; }
    void operator()(const BaseOpNode& n) const { os << n.op; }
    void operator()(const ComposeNode& n) const {
      if (paren) os << "(";
      print_term(os, *n.outer, true);
      os << " o ";
      print_term(os, *n.inner, false);  // right associated
      if (paren) os << ")";
    }
    void operator()(const EmptyNode& n) const {
      os << "empty[" << n.cod.str() << "]";
    }
    void operator()(const TagNode& n) const { os << "tag[" << n.type << "]"; }
    void operator()(const UntagNode& n) const {
      os << "untag[" << n.type << "]";
    }
    void operator()(const DowncastNode& n) const {
      os << "downcast(";
      print_term(os, *n.body, false);
      os << ")";
    }
    void operator()(const CopairNode& n) const {
      os << "[";
      print_term(os, *n.on_value, false);
      os << " | ";
      print_term(os, *n.on_exception, false);
      os << "]";
    }
    void operator()(const TagCaseNode& n) const {
      os << "case{";
      bool first = true;
      for (const auto& [tname, f] : n.branches) {
        if (!first) os << ", ";
        first = false;
        os << tname << " => ";
        print_term(os, *f, false);
      }
      os << "}";
    }
    void operator()(const CastNode& n) const {
      os << "cast[" << n.from << "," << n.to << "]";
    }
    void operator()(const ThrowNode& n) const {
      os << "throw[" << n.type << "," << n.cod.str() << "]";
    }
    void operator()(const TryCatchNode& n) const {
      os << "try(";
      print_term(os, *n.body, false);
      os << ") catch{";
      bool first = true;
      for (const auto& [tname, g] : n.handlers) {
        if (!first) os << ", ";
        first = false;
        os << tname << " => ";
        print_term(os, *g, false);
      }
      os << "}";
    }
  };
  std::visit(V{os, paren_compose}, t.node());
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print_term(os, t, false);
  return os.str();
}

}  // namespace exdec
