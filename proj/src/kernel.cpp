#include "exdec/kernel.hpp"

#include <sstream>

namespace exdec {

bool operator==(const Conclusion& a, const Conclusion& b) {
  if (a.index() != b.index()) return false;
  if (const auto* e = std::get_if<Equation>(&a))
    return *e == std::get<Equation>(b);
  if (const auto* f = std::get_if<Formation>(&a))
    return *f == std::get<Formation>(b);
  return std::get<DecorationClaim>(a) == std::get<DecorationClaim>(b);
}

std::string to_string(const Conclusion& c) {
  std::ostringstream os;
  if (const auto* e = std::get_if<Equation>(&c)) {
    os << to_string(e->lhs) << (e->mode == EqMode::Strong ? " == " : " ~~ ")
       << to_string(e->rhs);
  } else if (const auto* f = std::get_if<Formation>(&c)) {
    os << to_string(f->term) << " : " << f->arity.str();
  } else {
    const auto& d = std::get<DecorationClaim>(c);
    os << to_string(d.term) << " :: " << deco_short_name(d.deco);
  }
  return os.str();
}

namespace {

struct RuleInfo {
  RuleName rule;
  const char* name;
};

constexpr RuleInfo kRules[] = {
    {RuleName::ComposeFormation, "compose_formation"},
    {RuleName::IdFormation, "id_formation"},
    {RuleName::StrongRefl, "strong_refl"},
    {RuleName::StrongSym, "strong_sym"},
    {RuleName::StrongTrans, "strong_trans"},
    {RuleName::StrongSubst, "strong_subst"},
    {RuleName::StrongRepl, "strong_repl"},
    {RuleName::Assoc, "assoc"},
    {RuleName::RightUnit, "right_unit"},
    {RuleName::LeftUnit, "left_unit"},
    {RuleName::PureToPpg, "pure_to_ppg"},
    {RuleName::PpgToCtc, "ppg_to_ctc"},
    {RuleName::IdPure, "id_pure"},
    {RuleName::PureComposeClosure, "pure_compose"},
    {RuleName::PpgComposeClosure, "ppg_compose"},
    {RuleName::PpgWeakToStrong, "ppg_weak_to_strong"},
    {RuleName::StrongToWeak, "strong_to_weak"},
    {RuleName::WeakRefl, "weak_refl"},
    {RuleName::WeakSym, "weak_sym"},
    {RuleName::WeakTrans, "weak_trans"},
    {RuleName::WeakSubst, "weak_subst"},
    {RuleName::WeakRepl, "weak_repl"},
    {RuleName::EmptyFormation, "empty_formation"},
    {RuleName::EmptyPure, "empty_pure"},
    {RuleName::EmptyWeakUnique, "empty_weak_unique"},
    {RuleName::CopairFormation, "copair_formation"},
    {RuleName::CopairWeakEq, "copair_weak_eq"},
    {RuleName::CopairEmptyEq, "copair_empty_eq"},
    {RuleName::StrongFromWeakAndEmpty, "strong_from_weak_empty"},
    {RuleName::DowncastFormation, "downcast_formation"},
    {RuleName::DowncastPpg, "downcast_ppg"},
    {RuleName::DowncastWeakEq, "downcast_weak_eq"},
    {RuleName::TagFormation, "tag_formation"},
    {RuleName::TagPpg, "tag_ppg"},
    {RuleName::TagCaseFormation, "tagcase_formation"},
    {RuleName::TagCaseWeakEq, "tagcase_weak_eq"},
    {RuleName::StrongFromAllTags, "strong_from_all_tags"},
    {RuleName::UntagFormation, "untag_formation"},
    {RuleName::UntagCtc, "untag_ctc"},
    {RuleName::UntagMatch, "untag_match"},
    {RuleName::UntagMismatch, "untag_mismatch"},
    {RuleName::UntagCast, "untag_cast"},
    {RuleName::ByTypecheck, "by_typecheck"},
    {RuleName::ByInference, "by_inference"},
};

}  // namespace

const char* rule_name(RuleName r) {
  for (const auto& info : kRules)
    if (info.rule == r) return info.name;
  return "?";
}

std::optional<RuleName> rule_from_name(const std::string& name) {
  for (const auto& info : kRules)
    if (name == info.name) return info.rule;
  return std::nullopt;
}

const std::vector<RuleName>& figure_rules() {
  static const std::vector<RuleName> rules = [] {
    std::vector<RuleName> rs;
    for (const auto& info : kRules)
      if (info.rule != RuleName::UntagCast && info.rule != RuleName::ByTypecheck &&
          info.rule != RuleName::ByInference)
        rs.push_back(info.rule);
    return rs;
  }();
  return rules;
}

const Term& Bindings::term(const std::string& key) const {
  auto it = terms.find(key);
  if (it == terms.end()) throw Error(Errc::MissingBinding, "term " + key);
  return it->second;
}

const Ty& Bindings::type(const std::string& key) const {
  auto it = types.find(key);
  if (it == types.end()) throw Error(Errc::MissingBinding, "type " + key);
  return it->second;
}

namespace {

const Equation* as_eq(const Conclusion& c, EqMode mode) {
  const auto* e = std::get_if<Equation>(&c);
  return e && e->mode == mode ? e : nullptr;
}
const Formation* as_form(const Conclusion& c) {
  return std::get_if<Formation>(&c);
}

NodeError mismatch(const std::string& msg) {
  return NodeError{Errc::SchemaMismatch, msg};
}
NodeError deco_error(const std::string& msg) {
  return NodeError{Errc::DecorationViolation, msg};
}

struct Checker {
  const Signature& sig;
  RuleName rule;
  const std::vector<Conclusion>& prem;
  const Conclusion& concl;

  std::optional<NodeError> fail_count(size_t want) const {
    std::ostringstream os;
    os << rule_name(rule) << " takes " << want << " premise(s), got "
       << prem.size();
    return mismatch(os.str());
  }

  std::optional<NodeError> expect(const Conclusion& want) const {
    if (concl == want) return std::nullopt;
    return mismatch("conclusion must be " + to_string(want) + ", got " +
                    to_string(concl));
  }

  // premise i as a formation judgment
  const Formation* form(size_t i, std::optional<NodeError>& err) const {
    const Formation* f = as_form(prem[i]);
    if (!f)
      err = mismatch("premise " + std::to_string(i + 1) +
                     " must be a formation judgment");
    return f;
  }
  const Equation* eq(size_t i, EqMode mode, std::optional<NodeError>& err) const {
    const Equation* e = as_eq(prem[i], mode);
    if (!e)
      err = mismatch("premise " + std::to_string(i + 1) + " must be a " +
                     (mode == EqMode::Strong ? "strong" : "weak") + std::string(" equation"));
    return e;
  }
  const DecorationClaim* deco(size_t i, Deco want,
                              std::optional<NodeError>& err) const {
    const auto* d = std::get_if<DecorationClaim>(&prem[i]);
    if (!d) {
      err = mismatch("premise " + std::to_string(i + 1) +
                     " must be a decoration judgment");
      return nullptr;
    }
    if (d->deco != want) {
      err = deco_error("premise " + std::to_string(i + 1) + " must claim " +
                       deco_short_name(want) + ", got " +
                       deco_short_name(d->deco));
      return nullptr;
    }
    return d;
  }

  std::optional<NodeError> check() const {
    std::optional<NodeError> err;
    switch (rule) {
      case RuleName::ComposeFormation: {
        if (prem.size() != 2) return fail_count(2);
        const Formation* f = form(0, err);
        const Formation* g = form(1, err);
        if (err) return err;
        if (f->arity.cod != g->arity.dom)
          return mismatch("premises do not compose: " + f->arity.str() +
                          " then " + g->arity.str());
        return expect(Formation{Term::compose(g->term, f->term),
                                {f->arity.dom, g->arity.cod}});
      }
      case RuleName::IdFormation: {
        if (!prem.empty()) return fail_count(0);
        const Formation* c = as_form(concl);
        if (!c || !c->term.get_if<IdNode>())
          return mismatch("conclusion must form an identity");
        Ty at = c->term.get_if<IdNode>()->at;
        return expect(Formation{Term::id(at), {at, at}});
      }
      case RuleName::StrongRefl:
      case RuleName::WeakRefl: {
        if (prem.size() != 1) return fail_count(1);
        const Formation* f = form(0, err);
        if (err) return err;
        EqMode m = rule == RuleName::StrongRefl ? EqMode::Strong : EqMode::Weak;
        return expect(Equation{f->term, f->term, m});
      }
      case RuleName::StrongSym:
      case RuleName::WeakSym: {
        if (prem.size() != 1) return fail_count(1);
        EqMode m = rule == RuleName::StrongSym ? EqMode::Strong : EqMode::Weak;
        const Equation* e = eq(0, m, err);
        if (err) return err;
        return expect(Equation{e->rhs, e->lhs, m});
      }
      case RuleName::StrongTrans:
      case RuleName::WeakTrans: {
        if (prem.size() != 2) return fail_count(2);
        EqMode m = rule == RuleName::StrongTrans ? EqMode::Strong : EqMode::Weak;
        const Equation* e1 = eq(0, m, err);
        const Equation* e2 = eq(1, m, err);
        if (err) return err;
        if (!(e1->rhs == e2->lhs))
          return mismatch("middle terms of transitivity differ");
        return expect(Equation{e1->lhs, e2->rhs, m});
      }
      case RuleName::StrongSubst: {
        if (prem.size() != 2) return fail_count(2);
        const Formation* f = form(0, err);
        const Equation* e = eq(1, EqMode::Strong, err);
        if (err) return err;
        if (typecheck(sig, e->lhs).dom != f->arity.cod)
          return mismatch("substituted term does not reach the equation domain");
        return expect(Equation{Term::compose(e->lhs, f->term),
                               Term::compose(e->rhs, f->term), EqMode::Strong});
      }
      case RuleName::StrongRepl:
      case RuleName::WeakRepl: {
        if (prem.size() != 2) return fail_count(2);
        EqMode m = rule == RuleName::StrongRepl ? EqMode::Strong : EqMode::Weak;
        const Equation* e = eq(0, m, err);
        const Formation* g = form(1, err);
        if (err) return err;
        if (typecheck(sig, e->lhs).cod != g->arity.dom)
          return mismatch("replacement context does not follow the equation");
        return expect(Equation{Term::compose(g->term, e->lhs),
                               Term::compose(g->term, e->rhs), m});
      }
      case RuleName::Assoc: {
        if (prem.size() != 3) return fail_count(3);
        const Formation* f = form(0, err);
        const Formation* g = form(1, err);
        const Formation* h = form(2, err);
        if (err) return err;
        if (f->arity.cod != g->arity.dom || g->arity.cod != h->arity.dom)
          return mismatch("premises do not compose");
        return expect(Equation{
            Term::compose(h->term, Term::compose(g->term, f->term)),
            Term::compose(Term::compose(h->term, g->term), f->term),
            EqMode::Strong});
      }
      case RuleName::RightUnit: {
        if (prem.size() != 1) return fail_count(1);
        const Formation* f = form(0, err);
        if (err) return err;
        return expect(Equation{Term::compose(f->term, Term::id(f->arity.dom)),
                               f->term, EqMode::Strong});
      }
      case RuleName::LeftUnit: {
        if (prem.size() != 1) return fail_count(1);
        const Formation* f = form(0, err);
        if (err) return err;
        return expect(Equation{Term::compose(Term::id(f->arity.cod), f->term),
                               f->term, EqMode::Strong});
      }
      case RuleName::PureToPpg: {
        if (prem.size() != 1) return fail_count(1);
        const DecorationClaim* d = deco(0, Deco::Pure, err);
        if (err) return err;
        return expect(DecorationClaim{d->term, Deco::Propagator});
      }
      case RuleName::PpgToCtc: {
        if (prem.size() != 1) return fail_count(1);
        const DecorationClaim* d = deco(0, Deco::Propagator, err);
        if (err) return err;
        return expect(DecorationClaim{d->term, Deco::Catcher});
      }
      case RuleName::IdPure: {
        if (!prem.empty()) return fail_count(0);
        const DecorationClaim* c = std::get_if<DecorationClaim>(&concl);
        if (!c || !c->term.get_if<IdNode>())
          return mismatch("conclusion must decorate an identity");
        return expect(DecorationClaim{c->term, Deco::Pure});
      }
      case RuleName::PureComposeClosure:
      case RuleName::PpgComposeClosure: {
        if (prem.size() != 2) return fail_count(2);
        Deco level = rule == RuleName::PureComposeClosure ? Deco::Pure
                                                          : Deco::Propagator;
        const DecorationClaim* f = deco(0, level, err);
        const DecorationClaim* g = deco(1, level, err);
        if (err) return err;
        return expect(DecorationClaim{Term::compose(g->term, f->term), level});
      }
      case RuleName::PpgWeakToStrong: {
        if (prem.size() != 3) return fail_count(3);
        const Equation* e = eq(0, EqMode::Weak, err);
        const DecorationClaim* df = deco(1, Deco::Propagator, err);
        const DecorationClaim* dg = deco(2, Deco::Propagator, err);
        if (err) return err;
        if (!(df->term == e->lhs) || !(dg->term == e->rhs))
          return mismatch("decoration premises must cover both equation sides");
        return expect(Equation{e->lhs, e->rhs, EqMode::Strong});
      }
      case RuleName::StrongToWeak: {
        if (prem.size() != 1) return fail_count(1);
        const Equation* e = eq(0, EqMode::Strong, err);
        if (err) return err;
        return expect(Equation{e->lhs, e->rhs, EqMode::Weak});
      }
      case RuleName::WeakSubst: {
        if (prem.size() != 3) return fail_count(3);
        const Formation* f = form(0, err);
        const DecorationClaim* d = deco(1, Deco::Pure, err);
        const Equation* e = eq(2, EqMode::Weak, err);
        if (err) return err;
        if (!(d->term == f->term))
          return mismatch("decoration premise must cover the substituted term");
        if (typecheck(sig, e->lhs).dom != f->arity.cod)
          return mismatch("substituted term does not reach the equation domain");
        return expect(Equation{Term::compose(e->lhs, f->term),
                               Term::compose(e->rhs, f->term), EqMode::Weak});
      }
      case RuleName::EmptyFormation: {
        if (!prem.empty()) return fail_count(0);
        const Formation* c = as_form(concl);
        if (!c || !c->term.get_if<EmptyNode>())
          return mismatch("conclusion must form an empty map");
        Ty cod = c->term.get_if<EmptyNode>()->cod;
        return expect(Formation{Term::empty(cod), {Ty::empty(), cod}});
      }
      case RuleName::EmptyPure: {
        if (!prem.empty()) return fail_count(0);
        const DecorationClaim* c = std::get_if<DecorationClaim>(&concl);
        if (!c || !c->term.get_if<EmptyNode>())
          return mismatch("conclusion must decorate an empty map");
        return expect(DecorationClaim{c->term, Deco::Pure});
      }
      case RuleName::EmptyWeakUnique: {
        if (prem.size() != 2) return fail_count(2);
        const Formation* f = form(0, err);
        const Formation* g = form(1, err);
        if (err) return err;
        if (!f->arity.dom.is_empty() || !g->arity.dom.is_empty())
          return mismatch("both premises must start at the empty type");
        if (f->arity.cod != g->arity.cod)
          return mismatch("premises must share their codomain");
        return expect(Equation{f->term, g->term, EqMode::Weak});
      }
      case RuleName::CopairFormation:
      case RuleName::CopairWeakEq:
      case RuleName::CopairEmptyEq: {
        if (prem.size() != 4) return fail_count(4);
        const Formation* g = form(0, err);
        const DecorationClaim* dg = deco(1, Deco::Propagator, err);
        const Formation* k = form(2, err);
        const DecorationClaim* dk = deco(3, Deco::Catcher, err);
        if (err) return err;
        if (!(dg->term == g->term) || !(dk->term == k->term))
          return mismatch("decoration premises must cover the formed terms");
        if (!k->arity.dom.is_empty())
          return mismatch("second copair component must start at the empty type");
        if (g->arity.cod != k->arity.cod)
          return mismatch("copair components must share their codomain");
        Term cp = Term::copair(g->term, k->term);
        if (rule == RuleName::CopairFormation)
          return expect(Formation{cp, {g->arity.dom, g->arity.cod}});
        if (rule == RuleName::CopairWeakEq)
          return expect(Equation{cp, g->term, EqMode::Weak});
        return expect(Equation{Term::compose(cp, Term::empty(g->arity.dom)),
                               k->term, EqMode::Strong});
      }
      case RuleName::StrongFromWeakAndEmpty: {
        if (prem.size() != 4) return fail_count(4);
        const Formation* f = form(0, err);
        const Formation* g = form(1, err);
        const Equation* w = eq(2, EqMode::Weak, err);
        const Equation* s = eq(3, EqMode::Strong, err);
        if (err) return err;
        if (f->arity != g->arity)
          return mismatch("premises must share their arity");
        if (!(w->lhs == f->term) || !(w->rhs == g->term))
          return mismatch("weak premise must relate the formed terms");
        Term empty_x = Term::empty(f->arity.dom);
        if (!(s->lhs == Term::compose(f->term, empty_x)) ||
            !(s->rhs == Term::compose(g->term, empty_x)))
          return mismatch("strong premise must compare both sides after the empty map");
        return expect(Equation{f->term, g->term, EqMode::Strong});
      }
      case RuleName::DowncastFormation:
      case RuleName::DowncastPpg:
      case RuleName::DowncastWeakEq: {
        if (prem.size() != 2) return fail_count(2);
        const Formation* k = form(0, err);
        const DecorationClaim* dk = deco(1, Deco::Catcher, err);
        if (err) return err;
        if (!(dk->term == k->term))
          return mismatch("decoration premise must cover the formed term");
        Term down = Term::downcast(k->term);
        if (rule == RuleName::DowncastFormation)
          return expect(Formation{down, k->arity});
        if (rule == RuleName::DowncastPpg)
          return expect(DecorationClaim{down, Deco::Propagator});
        return expect(Equation{down, k->term, EqMode::Weak});
      }
      case RuleName::TagFormation: {
        if (!prem.empty()) return fail_count(0);
        const Formation* c = as_form(concl);
        const TagNode* tn = c ? c->term.get_if<TagNode>() : nullptr;
        if (!tn) return mismatch("conclusion must form a tag");
        if (!sig.is_exceptional(tn->type))
          return NodeError{Errc::SideConditionViolated,
                           tn->type + " is not exceptional"};
        return expect(Formation{Term::tag(tn->type),
                                {Ty::named(tn->type), Ty::empty()}});
      }
      case RuleName::TagPpg: {
        if (!prem.empty()) return fail_count(0);
        const DecorationClaim* c = std::get_if<DecorationClaim>(&concl);
        const TagNode* tn = c ? c->term.get_if<TagNode>() : nullptr;
        if (!tn) return mismatch("conclusion must decorate a tag");
        if (!sig.is_exceptional(tn->type))
          return NodeError{Errc::SideConditionViolated,
                           tn->type + " is not exceptional"};
        return expect(DecorationClaim{c->term, Deco::Propagator});
      }
      case RuleName::TagCaseFormation:
      case RuleName::TagCaseWeakEq: {
        const auto& excs = sig.exceptional();
        if (prem.size() != 2 * excs.size()) return fail_count(2 * excs.size());
        std::vector<std::pair<TypeName, Term>> branches;
        std::optional<Ty> cod;
        for (size_t i = 0; i < excs.size(); ++i) {
          const Formation* f = form(2 * i, err);
          const DecorationClaim* d = deco(2 * i + 1, Deco::Propagator, err);
          if (err) return err;
          if (!(d->term == f->term))
            return mismatch("decoration premise must cover the branch for " +
                            excs[i]);
          if (f->arity.dom != Ty::named(excs[i]))
            return mismatch("branch " + std::to_string(i + 1) +
                            " must start at " + excs[i]);
          if (cod && *cod != f->arity.cod)
            return mismatch("branches must share their codomain");
          cod = f->arity.cod;
          branches.emplace_back(excs[i], f->term);
        }
        Term tc = Term::tag_case(branches);
        if (rule == RuleName::TagCaseFormation)
          return expect(Formation{tc, {Ty::empty(), *cod}});
        // conclusion picks the matched exceptional type
        const Equation* e = as_eq(concl, EqMode::Weak);
        if (!e) return mismatch("conclusion must be a weak equation");
        for (size_t i = 0; i < excs.size(); ++i) {
          Equation want{Term::compose(tc, Term::tag(excs[i])),
                        branches[i].second, EqMode::Weak};
          if (*e == want) return std::nullopt;
        }
        return mismatch(
            "conclusion must project the case onto one tagged branch");
      }
      case RuleName::StrongFromAllTags: {
        const auto& excs = sig.exceptional();
        if (prem.size() != 2 + excs.size())
          return fail_count(2 + excs.size());
        const Formation* f = form(0, err);
        const Formation* g = form(1, err);
        if (err) return err;
        if (!f->arity.dom.is_empty() || !g->arity.dom.is_empty())
          return mismatch("both premises must start at the empty type");
        if (f->arity.cod != g->arity.cod)
          return mismatch("premises must share their codomain");
        for (size_t i = 0; i < excs.size(); ++i) {
          const Equation* e = eq(2 + i, EqMode::Weak, err);
          if (err) return err;
          Equation want{Term::compose(f->term, Term::tag(excs[i])),
                        Term::compose(g->term, Term::tag(excs[i])),
                        EqMode::Weak};
          if (!(*e == want))
            return mismatch("premise " + std::to_string(3 + i) +
                            " must compare both sides after tag[" + excs[i] + "]");
        }
        return expect(Equation{f->term, g->term, EqMode::Strong});
      }
      case RuleName::UntagFormation: {
        if (!prem.empty()) return fail_count(0);
        const Formation* c = as_form(concl);
        const UntagNode* un = c ? c->term.get_if<UntagNode>() : nullptr;
        if (!un) return mismatch("conclusion must form an untag");
        if (!sig.is_exceptional(un->type))
          return NodeError{Errc::SideConditionViolated,
                           un->type + " is not exceptional"};
        return expect(Formation{Term::untag(un->type),
                                {Ty::empty(), Ty::named(un->type)}});
      }
      case RuleName::UntagCtc: {
        if (!prem.empty()) return fail_count(0);
        const DecorationClaim* c = std::get_if<DecorationClaim>(&concl);
        const UntagNode* un = c ? c->term.get_if<UntagNode>() : nullptr;
        if (!un) return mismatch("conclusion must decorate an untag");
        if (!sig.is_exceptional(un->type))
          return NodeError{Errc::SideConditionViolated,
                           un->type + " is not exceptional"};
        return expect(DecorationClaim{c->term, Deco::Catcher});
      }
      case RuleName::UntagMatch: {
        if (!prem.empty()) return fail_count(0);
        const Equation* e = as_eq(concl, EqMode::Weak);
        if (!e) return mismatch("conclusion must be a weak equation");
        for (const auto& t : sig.exceptional()) {
          Equation want{Term::compose(Term::untag(t), Term::tag(t)),
                        Term::id(Ty::named(t)), EqMode::Weak};
          if (*e == want) return std::nullopt;
        }
        return mismatch("conclusion must equate untag[T] o tag[T] with id[T]");
      }
      case RuleName::UntagMismatch: {
        if (!prem.empty()) return fail_count(0);
        const Equation* e = as_eq(concl, EqMode::Weak);
        if (!e) return mismatch("conclusion must be a weak equation");
        for (const auto& t : sig.exceptional())
          for (const auto& r : sig.exceptional()) {
            bool matched = sig.hierarchy_enabled() ? sig.cast_exists(r, t) : r == t;
            if (matched) continue;
            Equation want{Term::compose(Term::untag(t), Term::tag(r)),
                          Term::compose(Term::empty(Ty::named(t)), Term::tag(r)),
                          EqMode::Weak};
            if (*e == want) return std::nullopt;
          }
        return mismatch(
            "conclusion must propagate an unmatched tag through untag");
      }
      case RuleName::UntagCast: {
        if (!prem.empty()) return fail_count(0);
        if (!sig.hierarchy_enabled())
          return NodeError{Errc::SideConditionViolated,
                           "signature has no exceptional hierarchy"};
        const Equation* e = as_eq(concl, EqMode::Weak);
        if (!e) return mismatch("conclusion must be a weak equation");
        for (const auto& t : sig.exceptional())
          for (const auto& r : sig.exceptional()) {
            if (!sig.cast_exists(r, t)) continue;
            Equation want{Term::compose(Term::untag(t), Term::tag(r)),
                          Term::cast(r, t), EqMode::Weak};
            if (*e == want) return std::nullopt;
          }
        return mismatch("conclusion must recover a subtyped tag through cast");
      }
      case RuleName::ByTypecheck: {
        if (!prem.empty()) return fail_count(0);
        const Formation* c = as_form(concl);
        if (!c) return mismatch("conclusion must be a formation judgment");
        Arity got = typecheck(sig, c->term);
        if (got != c->arity)
          return NodeError{Errc::ArityMismatch, "term has arity " + got.str() +
                                                    ", claimed " +
                                                    c->arity.str()};
        return std::nullopt;
      }
      case RuleName::ByInference: {
        if (!prem.empty()) return fail_count(0);
        const DecorationClaim* c = std::get_if<DecorationClaim>(&concl);
        if (!c) return mismatch("conclusion must be a decoration judgment");
        Deco got = infer_decoration(sig, c->term);
        if (got > c->deco)
          return deco_error("term infers as " + std::string(deco_name(got)) +
                            ", claimed " + deco_name(c->deco));
        return std::nullopt;
      }
    }
    return NodeError{Errc::UnknownRule, "unhandled rule"};
  }
};

// every term mentioned by a conclusion must typecheck
std::optional<NodeError> typecheck_conclusion(const Signature& sig,
                                              const Conclusion& c) {
  try {
    if (const auto* e = std::get_if<Equation>(&c)) {
      Arity l = typecheck(sig, e->lhs);
      Arity r = typecheck(sig, e->rhs);
      if (l != r)
        return NodeError{Errc::ArityMismatch,
                         "equation sides have arities " + l.str() + " and " +
                             r.str()};
    } else if (const auto* f = std::get_if<Formation>(&c)) {
      typecheck(sig, f->term);
    } else {
      typecheck(sig, std::get<DecorationClaim>(c).term);
    }
  } catch (const Error& e) {
    return NodeError{e.code(), e.what()};
  }
  return std::nullopt;
}

}  // namespace

std::optional<NodeError> check_node(const Signature& sig, RuleName rule,
                                    const std::vector<Conclusion>& premises,
                                    const Conclusion& conclusion) {
  if (auto err = typecheck_conclusion(sig, conclusion)) return err;
  try {
    return Checker{sig, rule, premises, conclusion}.check();
  } catch (const Error& e) {
    return NodeError{e.code(), e.what()};
  }
}

namespace {

bool check_rec(const Signature& sig, const Proof& p, const std::string& path,
               Verdict& v) {
  for (size_t i = 0; i < p.premises.size(); ++i)
    if (!check_rec(sig, p.premises[i], path + "." + std::to_string(i), v))
      return false;
  std::vector<Conclusion> prem;
  prem.reserve(p.premises.size());
  for (const auto& q : p.premises) prem.push_back(q.conclusion);
  if (auto err = check_node(sig, p.rule, prem, p.conclusion)) {
    v.accepted = false;
    v.path = path;
    v.reason = err->message;
    v.code = err->code;
    return false;
  }
  std::string note;
  if (p.rule == RuleName::ByTypecheck) note = "  [discharged by typecheck]";
  if (p.rule == RuleName::ByInference) note = "  [discharged by inference]";
  v.trace.push_back(path + ": " + rule_name(p.rule) + " |- " +
                    to_string(p.conclusion) + note);
  return true;
}

}  // namespace

Verdict check_proof(const Signature& sig, const Proof& p) {
  Verdict v;
  v.accepted = true;
  if (!check_rec(sig, p, "root", v)) return v;
  v.accepted = true;
  return v;
}

namespace {

Arity arity_of(const Signature& sig, const Term& t) { return typecheck(sig, t); }

void require_side(bool ok, const std::string& msg) {
  if (!ok) throw Error(Errc::SideConditionViolated, msg);
}

TypeName bound_exc(const Signature& sig, const Bindings& b,
                   const std::string& key) {
  Ty t = b.type(key);
  require_side(!t.is_empty() && sig.is_exceptional(t.name()),
               key + " must be an exceptional type");
  return t.name();
}

}  // namespace

RuleInstance instantiate_schema(const Signature& sig, RuleName rule,
                                const Bindings& b) {
  RuleInstance out;
  auto formation = [&](const Term& t) {
    out.premises.push_back(Formation{t, arity_of(sig, t)});
  };
  auto decoration = [&](const Term& t, Deco d) {
    out.premises.push_back(DecorationClaim{t, d});
  };
  auto equation = [&](const Term& l, const Term& r, EqMode m) {
    out.premises.push_back(Equation{l, r, m});
  };

  switch (rule) {
    case RuleName::ComposeFormation: {
      Term f = b.term("f"), g = b.term("g");
      Arity af = arity_of(sig, f), ag = arity_of(sig, g);
      require_side(af.cod == ag.dom, "f and g must compose");
      formation(f);
      formation(g);
      out.conclusion = Formation{Term::compose(g, f), {af.dom, ag.cod}};
      return out;
    }
    case RuleName::IdFormation: {
      Ty x = b.type("X");
      out.conclusion = Formation{Term::id(x), {x, x}};
      return out;
    }
    case RuleName::StrongRefl:
    case RuleName::WeakRefl: {
      Term f = b.term("f");
      formation(f);
      out.conclusion =
          Equation{f, f,
                   rule == RuleName::StrongRefl ? EqMode::Strong : EqMode::Weak};
      return out;
    }
    case RuleName::StrongSym:
    case RuleName::WeakSym: {
      EqMode m = rule == RuleName::StrongSym ? EqMode::Strong : EqMode::Weak;
      Term f = b.term("f"), g = b.term("g");
      require_side(arity_of(sig, f) == arity_of(sig, g),
                   "equation sides must share their arity");
      equation(f, g, m);
      out.conclusion = Equation{g, f, m};
      return out;
    }
    case RuleName::StrongTrans:
    case RuleName::WeakTrans: {
      EqMode m = rule == RuleName::StrongTrans ? EqMode::Strong : EqMode::Weak;
      Term f = b.term("f"), g = b.term("g"), h = b.term("h");
      Arity a = arity_of(sig, f);
      require_side(a == arity_of(sig, g) && a == arity_of(sig, h),
                   "equation sides must share their arity");
      equation(f, g, m);
      equation(g, h, m);
      out.conclusion = Equation{f, h, m};
      return out;
    }
    case RuleName::StrongSubst: {
      Term f = b.term("f"), g1 = b.term("g1"), g2 = b.term("g2");
      Arity af = arity_of(sig, f), a1 = arity_of(sig, g1);
      require_side(a1 == arity_of(sig, g2), "equation sides must share their arity");
      require_side(af.cod == a1.dom, "f must reach the equation domain");
      formation(f);
      equation(g1, g2, EqMode::Strong);
      out.conclusion = Equation{Term::compose(g1, f), Term::compose(g2, f),
                                EqMode::Strong};
      return out;
    }
    case RuleName::WeakSubst: {
      Term f = b.term("f"), g1 = b.term("g1"), g2 = b.term("g2");
      Arity af = arity_of(sig, f), a1 = arity_of(sig, g1);
      require_side(a1 == arity_of(sig, g2), "equation sides must share their arity");
      require_side(af.cod == a1.dom, "f must reach the equation domain");
      formation(f);
      decoration(f, Deco::Pure);
      equation(g1, g2, EqMode::Weak);
      out.conclusion =
          Equation{Term::compose(g1, f), Term::compose(g2, f), EqMode::Weak};
      return out;
    }
    case RuleName::StrongRepl:
    case RuleName::WeakRepl: {
      EqMode m = rule == RuleName::StrongRepl ? EqMode::Strong : EqMode::Weak;
      Term f1 = b.term("f1"), f2 = b.term("f2"), g = b.term("g");
      Arity a1 = arity_of(sig, f1), ag = arity_of(sig, g);
      require_side(a1 == arity_of(sig, f2), "equation sides must share their arity");
      require_side(a1.cod == ag.dom, "g must follow the equation codomain");
      equation(f1, f2, m);
      formation(g);
      out.conclusion = Equation{Term::compose(g, f1), Term::compose(g, f2), m};
      return out;
    }
    case RuleName::Assoc: {
      Term f = b.term("f"), g = b.term("g"), h = b.term("h");
      Arity af = arity_of(sig, f), ag = arity_of(sig, g), ah = arity_of(sig, h);
      require_side(af.cod == ag.dom && ag.cod == ah.dom, "terms must compose");
      formation(f);
      formation(g);
      formation(h);
      out.conclusion =
          Equation{Term::compose(h, Term::compose(g, f)),
                   Term::compose(Term::compose(h, g), f), EqMode::Strong};
      return out;
    }
    case RuleName::RightUnit: {
      Term f = b.term("f");
      Arity a = arity_of(sig, f);
      formation(f);
      out.conclusion =
          Equation{Term::compose(f, Term::id(a.dom)), f, EqMode::Strong};
      return out;
    }
    case RuleName::LeftUnit: {
      Term f = b.term("f");
      Arity a = arity_of(sig, f);
      formation(f);
      out.conclusion =
          Equation{Term::compose(Term::id(a.cod), f), f, EqMode::Strong};
      return out;
    }
    case RuleName::PureToPpg: {
      Term f = b.term("f");
      decoration(f, Deco::Pure);
      out.conclusion = DecorationClaim{f, Deco::Propagator};
      return out;
    }
    case RuleName::PpgToCtc: {
      Term f = b.term("f");
      decoration(f, Deco::Propagator);
      out.conclusion = DecorationClaim{f, Deco::Catcher};
      return out;
    }
    case RuleName::IdPure: {
      Ty x = b.type("X");
      out.conclusion = DecorationClaim{Term::id(x), Deco::Pure};
      return out;
    }
    case RuleName::PureComposeClosure:
    case RuleName::PpgComposeClosure: {
      Deco level = rule == RuleName::PureComposeClosure ? Deco::Pure
                                                        : Deco::Propagator;
      Term f = b.term("f"), g = b.term("g");
      require_side(arity_of(sig, f).cod == arity_of(sig, g).dom,
                   "f and g must compose");
      decoration(f, level);
      decoration(g, level);
      out.conclusion = DecorationClaim{Term::compose(g, f), level};
      return out;
    }
    case RuleName::PpgWeakToStrong: {
      Term f = b.term("f"), g = b.term("g");
      require_side(arity_of(sig, f) == arity_of(sig, g),
                   "equation sides must share their arity");
      equation(f, g, EqMode::Weak);
      decoration(f, Deco::Propagator);
      decoration(g, Deco::Propagator);
      out.conclusion = Equation{f, g, EqMode::Strong};
      return out;
    }
    case RuleName::StrongToWeak: {
      Term f = b.term("f"), g = b.term("g");
      require_side(arity_of(sig, f) == arity_of(sig, g),
                   "equation sides must share their arity");
      equation(f, g, EqMode::Strong);
      out.conclusion = Equation{f, g, EqMode::Weak};
      return out;
    }
    case RuleName::EmptyFormation: {
      Ty x = b.type("X");
      out.conclusion = Formation{Term::empty(x), {Ty::empty(), x}};
      return out;
    }
    case RuleName::EmptyPure: {
      Ty x = b.type("X");
      out.conclusion = DecorationClaim{Term::empty(x), Deco::Pure};
      return out;
    }
    case RuleName::EmptyWeakUnique: {
      Term f = b.term("f"), g = b.term("g");
      Arity af = arity_of(sig, f);
      require_side(af.dom.is_empty(), "f must start at the empty type");
      require_side(af == arity_of(sig, g), "f and g must share their arity");
      formation(f);
      formation(g);
      out.conclusion = Equation{f, g, EqMode::Weak};
      return out;
    }
    case RuleName::CopairFormation:
    case RuleName::CopairWeakEq:
    case RuleName::CopairEmptyEq: {
      Term g = b.term("g"), k = b.term("k");
      Arity ag = arity_of(sig, g), ak = arity_of(sig, k);
      require_side(ak.dom.is_empty(), "k must start at the empty type");
      require_side(ag.cod == ak.cod, "g and k must share their codomain");
      formation(g);
      decoration(g, Deco::Propagator);
      formation(k);
      decoration(k, Deco::Catcher);
      Term cp = Term::copair(g, k);
      if (rule == RuleName::CopairFormation)
        out.conclusion = Formation{cp, {ag.dom, ag.cod}};
      else if (rule == RuleName::CopairWeakEq)
        out.conclusion = Equation{cp, g, EqMode::Weak};
      else
        out.conclusion = Equation{Term::compose(cp, Term::empty(ag.dom)), k,
                                  EqMode::Strong};
      return out;
    }
    case RuleName::StrongFromWeakAndEmpty: {
      Term f = b.term("f"), g = b.term("g");
      Arity a = arity_of(sig, f);
      require_side(a == arity_of(sig, g), "f and g must share their arity");
      formation(f);
      formation(g);
      equation(f, g, EqMode::Weak);
      Term e = Term::empty(a.dom);
      equation(Term::compose(f, e), Term::compose(g, e), EqMode::Strong);
      out.conclusion = Equation{f, g, EqMode::Strong};
      return out;
    }
    case RuleName::DowncastFormation:
    case RuleName::DowncastPpg:
    case RuleName::DowncastWeakEq: {
      Term k = b.term("k");
      Arity a = arity_of(sig, k);
      formation(k);
      decoration(k, Deco::Catcher);
      Term down = Term::downcast(k);
      if (rule == RuleName::DowncastFormation)
        out.conclusion = Formation{down, a};
      else if (rule == RuleName::DowncastPpg)
        out.conclusion = DecorationClaim{down, Deco::Propagator};
      else
        out.conclusion = Equation{down, k, EqMode::Weak};
      return out;
    }
    case RuleName::TagFormation: {
      TypeName t = bound_exc(sig, b, "T");
      out.conclusion = Formation{Term::tag(t), {Ty::named(t), Ty::empty()}};
      return out;
    }
    case RuleName::TagPpg: {
      TypeName t = bound_exc(sig, b, "T");
      out.conclusion = DecorationClaim{Term::tag(t), Deco::Propagator};
      return out;
    }
    case RuleName::TagCaseFormation:
    case RuleName::TagCaseWeakEq: {
      const auto& excs = sig.exceptional();
      require_side(!excs.empty(), "signature has no exceptional types");
      std::vector<std::pair<TypeName, Term>> branches;
      std::optional<Ty> cod;
      for (const auto& t : excs) {
        Term ft = b.term("f:" + t);
        Arity a = arity_of(sig, ft);
        require_side(a.dom == Ty::named(t), "branch for " + t + " must start at " + t);
        require_side(!cod || *cod == a.cod, "branches must share their codomain");
        cod = a.cod;
        formation(ft);
        decoration(ft, Deco::Propagator);
        branches.emplace_back(t, ft);
      }
      Term tc = Term::tag_case(branches);
      if (rule == RuleName::TagCaseFormation) {
        out.conclusion = Formation{tc, {Ty::empty(), *cod}};
      } else {
        TypeName r = bound_exc(sig, b, "R");
        Term fr = b.term("f:" + r);
        out.conclusion =
            Equation{Term::compose(tc, Term::tag(r)), fr, EqMode::Weak};
      }
      return out;
    }
    case RuleName::StrongFromAllTags: {
      Term f = b.term("f"), g = b.term("g");
      Arity a = arity_of(sig, f);
      require_side(a.dom.is_empty(), "f must start at the empty type");
      require_side(a == arity_of(sig, g), "f and g must share their arity");
      formation(f);
      formation(g);
      for (const auto& t : sig.exceptional())
        equation(Term::compose(f, Term::tag(t)),
                 Term::compose(g, Term::tag(t)), EqMode::Weak);
      out.conclusion = Equation{f, g, EqMode::Strong};
      return out;
    }
    case RuleName::UntagFormation: {
      TypeName t = bound_exc(sig, b, "T");
      out.conclusion = Formation{Term::untag(t), {Ty::empty(), Ty::named(t)}};
      return out;
    }
    case RuleName::UntagCtc: {
      TypeName t = bound_exc(sig, b, "T");
      out.conclusion = DecorationClaim{Term::untag(t), Deco::Catcher};
      return out;
    }
    case RuleName::UntagMatch: {
      TypeName t = bound_exc(sig, b, "T");
      out.conclusion = Equation{Term::compose(Term::untag(t), Term::tag(t)),
                                Term::id(Ty::named(t)), EqMode::Weak};
      return out;
    }
    case RuleName::UntagMismatch: {
      TypeName t = bound_exc(sig, b, "T");
      TypeName r = bound_exc(sig, b, "R");
      bool matched = sig.hierarchy_enabled() ? sig.cast_exists(r, t) : r == t;
      require_side(!matched, r + " must not match " + t);
      out.conclusion =
          Equation{Term::compose(Term::untag(t), Term::tag(r)),
                   Term::compose(Term::empty(Ty::named(t)), Term::tag(r)),
                   EqMode::Weak};
      return out;
    }
    case RuleName::UntagCast: {
      require_side(sig.hierarchy_enabled(), "signature has no exceptional hierarchy");
      TypeName t = bound_exc(sig, b, "T");
      TypeName r = bound_exc(sig, b, "R");
      require_side(sig.cast_exists(r, t), r + " must be a subtype of " + t);
      out.conclusion = Equation{Term::compose(Term::untag(t), Term::tag(r)),
                                Term::cast(r, t), EqMode::Weak};
      return out;
    }
    case RuleName::ByTypecheck: {
      Term t = b.term("t");
      out.conclusion = Formation{t, arity_of(sig, t)};
      return out;
    }
    case RuleName::ByInference: {
      Term t = b.term("t");
      out.conclusion = DecorationClaim{t, infer_decoration(sig, t)};
      return out;
    }
  }
  throw Error(Errc::UnknownRule, "unhandled rule");
}

Conclusion instantiate_rule(const Signature& sig, RuleName rule,
                            const Bindings& b) {
  return instantiate_schema(sig, rule, b).conclusion;
}

}  // namespace exdec
