#include "exdec/semantics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace exdec {

int Model::size_of(const Ty& t) const {
  if (t.is_empty()) return 0;
  auto it = carrier.find(t.name());
  if (it == carrier.end())
    throw Error(Errc::InvalidModel, "no carrier for " + t.name());
  return it->second;
}

int Model::cast_apply(const TypeName& from, const TypeName& to, int v) const {
  if (from == to) return v;
  auto it = cast_table.find({from, to});
  if (it == cast_table.end())
    throw Error(Errc::InvalidModel, "no cast table " + from + " -> " + to);
  return it->second.at(static_cast<size_t>(v));
}

namespace {
std::string elem_name(const TypeName& type, int v) {
  std::string base = type;
  std::transform(base.begin(), base.end(), base.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return base + std::to_string(v);
}
}  // namespace

std::string Model::str(const Signature& sig) const {
  std::ostringstream os;
  os << "model {";
  for (const auto& t : sig.types()) {
    os << " carrier " << t << " = {";
    int n = carrier.count(t) ? carrier.at(t) : 0;
    for (int i = 0; i < n; ++i) os << (i ? ", " : " ") << elem_name(t, i);
    os << (n ? " }" : "}") << ";";
  }
  for (const auto& op : sig.ops()) {
    os << " table " << op.name << " = {";
    const auto& tbl = op_table.at(op.name);
    for (size_t i = 0; i < tbl.size(); ++i)
      os << (i ? ", " : " ") << elem_name(op.dom, static_cast<int>(i)) << " -> "
         << elem_name(op.cod, tbl[i]);
    os << (tbl.empty() ? "}" : " }") << ";";
  }
  for (const auto& [pair, tbl] : cast_table) {
    os << " cast " << pair.first << " " << pair.second << " = {";
    for (size_t i = 0; i < tbl.size(); ++i)
      os << (i ? ", " : " ") << elem_name(pair.first, static_cast<int>(i))
         << " -> " << elem_name(pair.second, tbl[i]);
    os << (tbl.empty() ? "}" : " }") << ";";
  }
  os << " }";
  return os.str();
}

namespace {
void validate_model_impl(const Signature& sig, const Model& m,
                         const OpOverrides* overridden);
}

void validate_model(const Signature& sig, const Model& m) {
  validate_model_impl(sig, m, nullptr);
}

namespace {

void validate_model_impl(const Signature& sig, const Model& m,
                         const OpOverrides* overridden) {
  for (const auto& t : sig.types()) {
    auto it = m.carrier.find(t);
    if (it == m.carrier.end())
      throw Error(Errc::InvalidModel, "no carrier for " + t);
    if (it->second < 0)
      throw Error(Errc::InvalidModel, "negative carrier for " + t);
  }
  for (const auto& op : sig.ops()) {
    if (overridden && overridden->count(op.name)) continue;
    auto it = m.op_table.find(op.name);
    if (it == m.op_table.end())
      throw Error(Errc::InvalidModel, "no table for op " + op.name);
    int dom = m.carrier.at(op.dom), cod = m.carrier.at(op.cod);
    if (static_cast<int>(it->second.size()) != dom)
      throw Error(Errc::InvalidModel, "table for " + op.name + " is not total");
    for (int v : it->second)
      if (v < 0 || v >= cod)
        throw Error(Errc::InvalidModel,
                    "table for " + op.name + " leaves the codomain");
  }
  const auto& excs = sig.exceptional();
  for (const auto& r : excs)
    for (const auto& t : excs) {
      if (!sig.cast_exists(r, t)) continue;
      if (r == t) {
        auto it = m.cast_table.find({r, t});
        if (it != m.cast_table.end())
          for (size_t i = 0; i < it->second.size(); ++i)
            if (it->second[i] != static_cast<int>(i))
              throw Error(Errc::InvalidModel, "cast " + r + " -> " + t +
                                                  " must be the identity");
        continue;
      }
      auto it = m.cast_table.find({r, t});
      if (it == m.cast_table.end())
        throw Error(Errc::InvalidModel, "no cast table " + r + " -> " + t);
      int dom = m.carrier.at(r), cod = m.carrier.at(t);
      if (static_cast<int>(it->second.size()) != dom)
        throw Error(Errc::InvalidModel, "cast " + r + " -> " + t + " is not total");
      for (int v : it->second)
        if (v < 0 || v >= cod)
          throw Error(Errc::InvalidModel,
                      "cast " + r + " -> " + t + " leaves the codomain");
    }
  // composition coherence
  for (const auto& s : excs)
    for (const auto& r : excs)
      for (const auto& t : excs) {
        if (s == r || r == t) continue;
        if (!sig.cast_exists(s, r) || !sig.cast_exists(r, t)) continue;
        for (int v = 0; v < m.carrier.at(s); ++v)
          if (m.cast_apply(s, t, v) != m.cast_apply(r, t, m.cast_apply(s, r, v)))
            throw Error(Errc::InvalidModel, "cast tables do not compose: " + s +
                                                " -> " + r + " -> " + t);
      }
}

}  // namespace

std::vector<EffValue> exception_values(const Signature& sig, const Model& m) {
  std::vector<EffValue> out;
  const auto& excs = sig.exceptional();
  for (size_t i = 0; i < excs.size(); ++i) {
    int n = m.carrier.count(excs[i]) ? m.carrier.at(excs[i]) : 0;
    for (int v = 0; v < n; ++v)
      out.push_back(EffValue::exception(static_cast<int>(i), v));
  }
  return out;
}

std::string to_string(const Signature& sig, const Model& m, const EffValue& v) {
  (void)m;
  if (!v.exceptional) return "ord " + std::to_string(v.val);
  return "exc " + sig.exceptional()[static_cast<size_t>(v.exc_type)] + ":" +
         std::to_string(v.val);
}

EffFunction::EffFunction(const Signature& sig, const Model& m, Ty dom, Ty cod)
    : dom_(std::move(dom)),
      cod_(std::move(cod)),
      ordinary_(m.size_of(dom_)),
      exc_enum_(exception_values(sig, m)) {
  table_.resize(static_cast<size_t>(ordinary_) + exc_enum_.size());
}

EffValue EffFunction::input_at(int i) const {
  if (i < ordinary_) return EffValue::ordinary(i);
  return exc_enum_[static_cast<size_t>(i - ordinary_)];
}

int EffFunction::index_of(const EffValue& in) const {
  if (!in.exceptional) {
    if (in.val < 0 || in.val >= ordinary_)
      throw Error(Errc::InvalidModel, "ordinary value outside the carrier");
    return in.val;
  }
  for (size_t k = 0; k < exc_enum_.size(); ++k)
    if (exc_enum_[k] == in) return ordinary_ + static_cast<int>(k);
  throw Error(Errc::InvalidModel, "exception outside the model");
}

const EffValue& EffFunction::operator()(const EffValue& in) const {
  return table_[static_cast<size_t>(index_of(in))];
}

bool EffFunction::propagates_exceptions() const {
  for (size_t k = 0; k < exc_enum_.size(); ++k)
    if (!(table_[static_cast<size_t>(ordinary_) + k] == exc_enum_[k]))
      return false;
  return true;
}

bool EffFunction::is_pure_shaped() const {
  if (!propagates_exceptions()) return false;
  for (int i = 0; i < ordinary_; ++i)
    if (table_[static_cast<size_t>(i)].exceptional) return false;
  return true;
}

namespace {

EffFunction compose_eff(const Signature& sig, const Model& m,
                        const EffFunction& g, const EffFunction& f) {
  EffFunction out(sig, m, f.dom(), g.cod());
  for (int i = 0; i < out.input_count(); ++i)
    out.at_index(i) = g(f.at_index(i));
  return out;
}

EffFunction interpret_impl(const Signature& sig, const Model& m, const Term& t,
                           const OpOverrides* ov);

struct Interp {
  const Signature& sig;
  const Model& m;
  const OpOverrides* ov;

  EffFunction rec(const Term& t) const { return interpret_impl(sig, m, t, ov); }

  EffFunction operator()(const IdNode& n) const {
    EffFunction out(sig, m, n.at, n.at);
    for (int i = 0; i < out.input_count(); ++i) out.at_index(i) = out.input_at(i);
    return out;
  }
  EffFunction operator()(const BaseOpNode& n) const {
    const OpDecl& d = sig.op(n.op);
    if (ov) {
      auto it = ov->find(n.op);
      if (it != ov->end()) return it->second;
    }
    const auto& tbl = m.op_table.at(n.op);
    EffFunction out(sig, m, Ty::named(d.dom), Ty::named(d.cod));
    for (int i = 0; i < out.input_count(); ++i) {
      EffValue in = out.input_at(i);
      out.at_index(i) =
          in.exceptional ? in : EffValue::ordinary(tbl[static_cast<size_t>(in.val)]);
    }
    return out;
  }
  EffFunction operator()(const ComposeNode& n) const {
    return compose_eff(sig, m, rec(*n.outer), rec(*n.inner));
  }
  EffFunction operator()(const EmptyNode& n) const {
    EffFunction out(sig, m, Ty::empty(), n.cod);
    for (int i = 0; i < out.input_count(); ++i) out.at_index(i) = out.input_at(i);
    return out;
  }
  EffFunction operator()(const TagNode& n) const {
    int etype = sig.exceptional_index(n.type);
    EffFunction out(sig, m, Ty::named(n.type), Ty::empty());
    for (int i = 0; i < out.input_count(); ++i) {
      EffValue in = out.input_at(i);
      out.at_index(i) = in.exceptional ? in : EffValue::exception(etype, in.val);
    }
    return out;
  }
  EffFunction operator()(const UntagNode& n) const {
    int etype = sig.exceptional_index(n.type);
    EffFunction out(sig, m, Ty::empty(), Ty::named(n.type));
    for (int i = 0; i < out.input_count(); ++i) {
      EffValue in = out.input_at(i);  // always exceptional: dom is 0
      const TypeName& origin = sig.exceptional()[static_cast<size_t>(in.exc_type)];
      bool matched = sig.hierarchy_enabled() ? sig.cast_exists(origin, n.type)
                                             : in.exc_type == etype;
      out.at_index(i) =
          matched
              ? EffValue::ordinary(m.cast_apply(origin, n.type, in.val))
              : in;
    }
    return out;
  }
  EffFunction operator()(const DowncastNode& n) const {
    EffFunction body = rec(*n.body);
    EffFunction out(sig, m, body.dom(), body.cod());
    for (int i = 0; i < out.input_count(); ++i) {
      EffValue in = out.input_at(i);
      out.at_index(i) = in.exceptional ? in : body.at_index(i);
    }
    return out;
  }
  EffFunction operator()(const CopairNode& n) const {
    EffFunction g = rec(*n.on_value);
    EffFunction k = rec(*n.on_exception);
    EffFunction out(sig, m, g.dom(), g.cod());
    for (int i = 0; i < out.input_count(); ++i) {
      EffValue in = out.input_at(i);
      out.at_index(i) = in.exceptional ? k(in) : g(in);
    }
    return out;
  }
  EffFunction operator()(const TagCaseNode& n) const {
    std::vector<EffFunction> branches;
    std::vector<int> branch_of_etype(sig.exceptional().size(), -1);
    Ty cod;
    for (const auto& [tname, f] : n.branches) {
      branch_of_etype[static_cast<size_t>(sig.exceptional_index(tname))] =
          static_cast<int>(branches.size());
      branches.push_back(rec(*f));
      cod = branches.back().cod();
    }
    EffFunction out(sig, m, Ty::empty(), cod);
    for (int i = 0; i < out.input_count(); ++i) {
      EffValue in = out.input_at(i);  // exceptional
      const EffFunction& br =
          branches[static_cast<size_t>(branch_of_etype[static_cast<size_t>(in.exc_type)])];
      out.at_index(i) = br(EffValue::ordinary(in.val));
    }
    return out;
  }
  EffFunction operator()(const CastNode& n) const {
    EffFunction out(sig, m, Ty::named(n.from), Ty::named(n.to));
    for (int i = 0; i < out.input_count(); ++i) {
      EffValue in = out.input_at(i);
      out.at_index(i) =
          in.exceptional ? in
                         : EffValue::ordinary(m.cast_apply(n.from, n.to, in.val));
    }
    return out;
  }
  EffFunction operator()(const ThrowNode& n) const {
    int etype = sig.exceptional_index(n.type);
    EffFunction out(sig, m, Ty::named(n.type), n.cod);
    for (int i = 0; i < out.input_count(); ++i) {
      EffValue in = out.input_at(i);
      out.at_index(i) = in.exceptional ? in : EffValue::exception(etype, in.val);
    }
    return out;
  }
  EffFunction operator()(const TryCatchNode&) const;  // defined below
};

EffFunction interpret_impl(const Signature& sig, const Model& m, const Term& t,
                           const OpOverrides* ov) {
  return std::visit(Interp{sig, m, ov}, t.node());
}

EffFunction Interp::operator()(const TryCatchNode& n) const {
  // try/catch means its elaboration
  std::vector<std::pair<TypeName, Term>> hs;
  for (const auto& [tname, g] : n.handlers) hs.emplace_back(tname, *g);
  Term t = Term::try_catch(*n.body, std::move(hs));
  return interpret_impl(sig, m, elaborate(sig, t), ov);
}

}  // namespace

EffFunction interpret(const Signature& sig, const Model& m, const Term& t) {
  validate_model(sig, m);
  typecheck(sig, t);
  return interpret_impl(sig, m, t, nullptr);
}

EffFunction interpret(const Signature& sig, const Model& m, const Term& t,
                      const OpOverrides& overrides) {
  validate_model_impl(sig, m, &overrides);
  typecheck(sig, t);
  return interpret_impl(sig, m, t, &overrides);
}

namespace {

bool eval_equation_impl(const Signature& sig, const Model& m, const Equation& e,
                        const OpOverrides* ov) {
  Arity l = typecheck(sig, e.lhs);
  Arity r = typecheck(sig, e.rhs);
  if (l != r)
    throw Error(Errc::ArityMismatch, "equation sides have arities " + l.str() +
                                         " and " + r.str());
  EffFunction fl = interpret_impl(sig, m, e.lhs, ov);
  EffFunction fr = interpret_impl(sig, m, e.rhs, ov);
  int upto = e.mode == EqMode::Strong ? fl.input_count() : fl.ordinary_count();
  for (int i = 0; i < upto; ++i)
    if (!(fl.at_index(i) == fr.at_index(i))) return false;
  return true;
}

}  // namespace

bool eval_equation(const Signature& sig, const Model& m, const Equation& e) {
  validate_model(sig, m);
  return eval_equation_impl(sig, m, e, nullptr);
}

bool eval_equation(const Signature& sig, const Model& m, const Equation& e,
                   const OpOverrides& overrides) {
  validate_model_impl(sig, m, &overrides);
  return eval_equation_impl(sig, m, e, &overrides);
}

bool holds_in_model(const Signature& sig, const Model& m, const Conclusion& c) {
  if (const auto* e = std::get_if<Equation>(&c))
    return eval_equation_impl(sig, m, *e, nullptr);
  if (const auto* f = std::get_if<Formation>(&c))
    return typecheck(sig, f->term) == f->arity;
  const auto& d = std::get<DecorationClaim>(c);
  EffFunction tbl = interpret_impl(sig, m, d.term, nullptr);
  switch (d.deco) {
    case Deco::Pure: return tbl.is_pure_shaped();
    case Deco::Propagator: return tbl.propagates_exceptions();
    case Deco::Catcher: return true;
  }
  return true;
}

// ---------------------------------------------------------------------------
// model enumeration

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double ipow(double b, int e) { return std::pow(b, e); }

// Covering edges of the exceptional subtype order.
std::vector<std::pair<TypeName, TypeName>> hasse_edges(const Signature& sig) {
  std::vector<std::pair<TypeName, TypeName>> out;
  const auto& excs = sig.exceptional();
  for (const auto& r : excs)
    for (const auto& t : excs) {
      if (r == t || !sig.cast_exists(r, t)) continue;
      bool covered = true;
      for (const auto& z : excs) {
        if (z == r || z == t) continue;
        if (sig.cast_exists(r, z) && sig.cast_exists(z, t)) {
          covered = false;
          break;
        }
      }
      if (covered) out.emplace_back(r, t);
    }
  return out;
}

// Fills derived cast tables by composing along the covering edges; returns
// false when different paths disagree or a table cannot be built.
bool complete_casts(const Signature& sig, Model& m) {
  const auto& excs = sig.exceptional();
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& r : excs)
      for (const auto& t : excs) {
        if (r == t || !sig.cast_exists(r, t)) continue;
        if (m.cast_table.count({r, t})) continue;
        for (const auto& z : excs) {
          if (z == r || z == t) continue;
          if (!sig.cast_exists(r, z) || !sig.cast_exists(z, t)) continue;
          if (!m.cast_table.count({r, z}) || !m.cast_table.count({z, t})) continue;
          std::vector<int> tbl(static_cast<size_t>(m.carrier.at(r)));
          for (size_t i = 0; i < tbl.size(); ++i)
            tbl[i] = m.cast_apply(z, t, m.cast_apply(r, z, static_cast<int>(i)));
          m.cast_table[{r, t}] = std::move(tbl);
          progress = true;
          break;
        }
      }
  }
  for (const auto& r : excs)
    for (const auto& t : excs)
      if (r != t && sig.cast_exists(r, t) && !m.cast_table.count({r, t}))
        return false;
  try {
    validate_model(sig, m);
  } catch (const Error&) {
    return false;
  }
  return true;
}

}  // namespace

ModelEnumerator::ModelEnumerator(const Signature& sig, int size_bound,
                                 long long budget, std::uint64_t seed)
    : sig_(sig), bound_(size_bound), budget_(budget), seed_(seed),
      rng_state_(seed ^ 0xa5a5a5a5a5a5a5a5ULL) {
  // raw space: size combos x op tables x covering-edge cast tables
  double space = 0;
  long long combos = 1;
  for (size_t i = 0; i < sig.types().size(); ++i) combos *= (bound_ + 1);
  for (long long s = 0; s < combos; ++s) {
    long long rest = s;
    std::map<TypeName, int> sizes;
    for (const auto& t : sig.types()) {
      sizes[t] = static_cast<int>(rest % (bound_ + 1));
      rest /= (bound_ + 1);
    }
    double tables = 1;
    for (const auto& op : sig.ops())
      tables *= ipow(sizes[op.cod], sizes[op.dom]);
    for (const auto& [r, t] : hasse_edges(sig)) tables *= ipow(sizes[t], sizes[r]);
    space += tables;
  }
  space_ = space;
  exhaustive_ = space <= static_cast<double>(budget);
  space_ll_ = exhaustive_ ? static_cast<long long>(space) : 0;
}

std::optional<Model> ModelEnumerator::build_indexed(long long index) const {
  long long combos = 1;
  for (size_t i = 0; i < sig_.types().size(); ++i) combos *= (bound_ + 1);
  for (long long s = 0; s < combos; ++s) {
    long long rest = s;
    std::map<TypeName, int> sizes;
    for (const auto& t : sig_.types()) {
      sizes[t] = static_cast<int>(rest % (bound_ + 1));
      rest /= (bound_ + 1);
    }
    double tables_d = 1;
    for (const auto& op : sig_.ops())
      tables_d *= ipow(sizes[op.cod], sizes[op.dom]);
    auto hasse = hasse_edges(sig_);
    for (const auto& [r, t] : hasse) tables_d *= ipow(sizes[t], sizes[r]);
    long long tables = static_cast<long long>(tables_d);
    if (index >= tables) {
      index -= tables;
      continue;
    }
    Model m;
    m.carrier = sizes;
    long long code = index;
    for (const auto& op : sig_.ops()) {
      int dom = sizes[op.dom], cod = sizes[op.cod];
      if (dom > 0 && cod == 0) return std::nullopt;  // no total map
      std::vector<int> tbl(static_cast<size_t>(dom));
      for (int i = 0; i < dom; ++i) {
        tbl[static_cast<size_t>(i)] = static_cast<int>(code % cod);
        code /= cod;
      }
      m.op_table[op.name] = std::move(tbl);
    }
    for (const auto& [r, t] : hasse) {
      int dom = sizes[r], cod = sizes[t];
      if (dom > 0 && cod == 0) return std::nullopt;
      std::vector<int> tbl(static_cast<size_t>(dom));
      for (int i = 0; i < dom; ++i) {
        tbl[static_cast<size_t>(i)] = static_cast<int>(code % cod);
        code /= cod;
      }
      m.cast_table[{r, t}] = std::move(tbl);
    }
    if (!complete_casts(sig_, m)) return std::nullopt;
    return m;
  }
  return std::nullopt;
}

std::optional<Model> ModelEnumerator::next() {
  if (exhaustive_) {
    while (cursor_ < space_ll_) {
      long long idx = cursor_++;
      if (auto m = build_indexed(idx)) return m;
    }
    return std::nullopt;
  }
  while (emitted_ < budget_) {
    // seeded sample: draw a raw index in [0, space)
    double r = static_cast<double>(splitmix64(rng_state_) >> 11) /
               9007199254740992.0;  // [0,1)
    double clamped = std::min(space_, 9.0e18);
    long long idx = static_cast<long long>(r * clamped);
    if (auto m = build_indexed(idx)) {
      ++emitted_;
      return m;
    }
  }
  return std::nullopt;
}

std::vector<Model> enumerate_models(const Signature& sig, int size_bound,
                                    long long budget, std::uint64_t seed) {
  ModelEnumerator en(sig, size_bound, budget, seed);
  std::vector<Model> out;
  while (auto m = en.next()) {
    out.push_back(std::move(*m));
    if (static_cast<long long>(out.size()) >= budget) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// term generation

TermGen::TermGen(const Signature& sig, std::uint64_t seed)
    : sig_(sig), state_(seed ^ 0x6a09e667f3bcc908ULL) {}

std::uint64_t TermGen::next_u64() { return splitmix64(state_); }

int TermGen::pick(int n) {
  return n <= 0 ? 0 : static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
}

Ty TermGen::random_type(bool allow_empty) {
  const auto& ts = sig_.types();
  int n = static_cast<int>(ts.size()) + (allow_empty ? 1 : 0);
  int i = pick(n);
  if (i == static_cast<int>(ts.size())) return Ty::empty();
  return Ty::named(ts[static_cast<size_t>(i)]);
}

std::optional<Term> TermGen::gen(const Ty& dom, const Ty& cod, int depth,
                                 Deco max_deco) {
  enum Kind {
    kId, kOp, kEmpty, kTag, kUntag, kCast, kThrow,
    kCompose, kCopair, kTagCase, kDowncast, kTryCatch
  };
  std::vector<Kind> cands;
  std::vector<std::string> ops;
  if (dom == cod) cands.push_back(kId);
  for (const auto& op : sig_.ops())
    if (Ty::named(op.dom) == dom && Ty::named(op.cod) == cod)
      ops.push_back(op.name);
  if (!ops.empty()) cands.push_back(kOp);
  if (dom.is_empty()) cands.push_back(kEmpty);
  bool dom_exc = !dom.is_empty() && sig_.is_exceptional(dom.name());
  bool cod_exc = !cod.is_empty() && sig_.is_exceptional(cod.name());
  if (max_deco >= Deco::Propagator) {
    if (dom_exc && cod.is_empty()) cands.push_back(kTag);
    if (dom_exc) cands.push_back(kThrow);
  }
  if (max_deco >= Deco::Catcher && dom.is_empty() && cod_exc)
    cands.push_back(kUntag);
  if (dom_exc && cod_exc && sig_.cast_exists(dom.name(), cod.name()))
    cands.push_back(kCast);
  if (depth > 0) {
    cands.push_back(kCompose);
    if (max_deco >= Deco::Catcher) cands.push_back(kCopair);
    if (max_deco >= Deco::Catcher && dom.is_empty() && !sig_.exceptional().empty())
      cands.push_back(kTagCase);
    if (max_deco >= Deco::Propagator) cands.push_back(kDowncast);
    if (max_deco >= Deco::Propagator && !sig_.exceptional().empty())
      cands.push_back(kTryCatch);
  }

  for (int attempt = 0; attempt < 6 && !cands.empty(); ++attempt) {
    size_t ci = static_cast<size_t>(pick(static_cast<int>(cands.size())));
    Kind k = cands[ci];
    switch (k) {
      case kId: return Term::id(dom);
      case kOp: return Term::base_op(ops[static_cast<size_t>(pick(static_cast<int>(ops.size())))]);
      case kEmpty: return Term::empty(cod);
      case kTag: return Term::tag(dom.name());
      case kUntag: return Term::untag(cod.name());
      case kCast: return Term::cast(dom.name(), cod.name());
      case kThrow: return Term::throw_(dom.name(), cod);
      case kCompose: {
        Ty mid = random_type(true);
        auto inner = gen(dom, mid, depth - 1, max_deco);
        auto outer = inner ? gen(mid, cod, depth - 1, max_deco) : std::nullopt;
        if (inner && outer) return Term::compose(*outer, *inner);
        break;
      }
      case kCopair: {
        auto g = gen(dom, cod, depth - 1, max_deco);
        auto kk = g ? gen(Ty::empty(), cod, depth - 1, max_deco) : std::nullopt;
        if (g && kk) return Term::copair(*g, *kk);
        break;
      }
      case kTagCase: {
        std::vector<std::pair<TypeName, Term>> branches;
        bool ok = true;
        for (const auto& t : sig_.exceptional()) {
          auto f = gen(Ty::named(t), cod, depth - 1, max_deco);
          if (!f) {
            ok = false;
            break;
          }
          branches.emplace_back(t, *f);
        }
        if (ok) return Term::tag_case(std::move(branches));
        break;
      }
      case kDowncast: {
        auto body = gen(dom, cod, depth - 1, Deco::Catcher);
        if (body) return Term::downcast(*body);
        break;
      }
      case kTryCatch: {
        auto body = gen(dom, cod, depth - 1, Deco::Propagator);
        if (!body) break;
        const auto& excs = sig_.exceptional();
        int n = 1 + pick(2);
        std::vector<std::pair<TypeName, Term>> handlers;
        bool ok = true;
        for (int i = 0; i < n; ++i) {
          const TypeName& t = excs[static_cast<size_t>(pick(static_cast<int>(excs.size())))];
          auto g = gen(Ty::named(t), cod, depth - 1, Deco::Propagator);
          if (!g) {
            ok = false;
            break;
          }
          handlers.emplace_back(t, *g);
        }
        if (ok) return Term::try_catch(*body, std::move(handlers));
        break;
      }
    }
  }
  return std::nullopt;
}

std::optional<Term> TermGen::gen_any(int depth, Arity* arity_out) {
  for (int attempt = 0; attempt < 12; ++attempt) {
    Ty dom = random_type(true);
    Ty cod = random_type(true);
    if (auto t = gen(dom, cod, depth)) {
      if (arity_out) *arity_out = {dom, cod};
      return t;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// soundness harness

namespace {

// Samples metavariable bindings for a rule schema; nullopt when the signature
// cannot realize the shapes.
std::optional<Bindings> sample_bindings(const Signature& sig, RuleName rule,
                                        TermGen& gen) {
  Bindings b;
  auto depth = [&]() { return gen.pick(4); };
  auto term_pair_same_arity = [&](const char* k1, const char* k2) -> bool {
    Ty x = gen.random_type(true), y = gen.random_type(true);
    auto f = gen.gen(x, y, depth());
    if (!f) return false;
    // reuse the same term now and then so equational premises can fire
    std::optional<Term> g = gen.pick(3) == 0 ? f : gen.gen(x, y, depth());
    if (!g) return false;
    b.terms.emplace(k1, *f);
    b.terms.emplace(k2, *g);
    return true;
  };
  auto exc_type = [&](const char* key) -> bool {
    const auto& excs = sig.exceptional();
    if (excs.empty()) return false;
    b.types.emplace(key,
                    Ty::named(excs[static_cast<size_t>(gen.pick(static_cast<int>(excs.size())))]));
    return true;
  };

  switch (rule) {
    case RuleName::ComposeFormation:
    case RuleName::PureComposeClosure:
    case RuleName::PpgComposeClosure: {
      Ty x = gen.random_type(true), y = gen.random_type(true),
         z = gen.random_type(true);
      auto f = gen.gen(x, y, depth());
      auto g = gen.gen(y, z, depth());
      if (!f || !g) return std::nullopt;
      b.terms.emplace("f", *f);
      b.terms.emplace("g", *g);
      return b;
    }
    case RuleName::IdFormation:
    case RuleName::IdPure:
    case RuleName::EmptyFormation:
    case RuleName::EmptyPure:
      b.types.emplace("X", gen.random_type(true));
      return b;
    case RuleName::StrongRefl:
    case RuleName::WeakRefl:
    case RuleName::RightUnit:
    case RuleName::LeftUnit:
    case RuleName::PureToPpg:
    case RuleName::PpgToCtc: {
      auto f = gen.gen_any(depth());
      if (!f) return std::nullopt;
      b.terms.emplace("f", *f);
      return b;
    }
    case RuleName::StrongSym:
    case RuleName::WeakSym:
    case RuleName::PpgWeakToStrong:
    case RuleName::StrongToWeak:
    case RuleName::StrongFromWeakAndEmpty:
      if (!term_pair_same_arity("f", "g")) return std::nullopt;
      return b;
    case RuleName::StrongTrans:
    case RuleName::WeakTrans: {
      Ty x = gen.random_type(true), y = gen.random_type(true);
      auto f = gen.gen(x, y, depth());
      if (!f) return std::nullopt;
      std::optional<Term> g = gen.pick(2) == 0 ? f : gen.gen(x, y, depth());
      std::optional<Term> h = gen.pick(2) == 0 ? f : gen.gen(x, y, depth());
      if (!g || !h) return std::nullopt;
      b.terms.emplace("f", *f);
      b.terms.emplace("g", *g);
      b.terms.emplace("h", *h);
      return b;
    }
    case RuleName::StrongSubst:
    case RuleName::WeakSubst: {
      Ty x = gen.random_type(true), y = gen.random_type(true),
         z = gen.random_type(true);
      auto f = gen.gen(x, y, depth());
      auto g1 = gen.gen(y, z, depth());
      if (!f || !g1) return std::nullopt;
      std::optional<Term> g2 = gen.pick(3) == 0 ? g1 : gen.gen(y, z, depth());
      if (!g2) return std::nullopt;
      b.terms.emplace("f", *f);
      b.terms.emplace("g1", *g1);
      b.terms.emplace("g2", *g2);
      return b;
    }
    case RuleName::StrongRepl:
    case RuleName::WeakRepl: {
      Ty x = gen.random_type(true), y = gen.random_type(true),
         z = gen.random_type(true);
      auto f1 = gen.gen(x, y, depth());
      if (!f1) return std::nullopt;
      std::optional<Term> f2 = gen.pick(3) == 0 ? f1 : gen.gen(x, y, depth());
      auto g = gen.gen(y, z, depth());
      if (!f2 || !g) return std::nullopt;
      b.terms.emplace("f1", *f1);
      b.terms.emplace("f2", *f2);
      b.terms.emplace("g", *g);
      return b;
    }
    case RuleName::Assoc: {
      Ty x = gen.random_type(true), y = gen.random_type(true),
         z = gen.random_type(true), w = gen.random_type(true);
      auto f = gen.gen(x, y, depth());
      auto g = gen.gen(y, z, depth());
      auto h = gen.gen(z, w, depth());
      if (!f || !g || !h) return std::nullopt;
      b.terms.emplace("f", *f);
      b.terms.emplace("g", *g);
      b.terms.emplace("h", *h);
      return b;
    }
    case RuleName::EmptyWeakUnique:
    case RuleName::StrongFromAllTags: {
      Ty y = gen.random_type(true);
      auto f = gen.gen(Ty::empty(), y, depth());
      if (!f) return std::nullopt;
      std::optional<Term> g =
          gen.pick(3) == 0 ? f : gen.gen(Ty::empty(), y, depth());
      if (!g) return std::nullopt;
      b.terms.emplace("f", *f);
      b.terms.emplace("g", *g);
      return b;
    }
    case RuleName::CopairFormation:
    case RuleName::CopairWeakEq:
    case RuleName::CopairEmptyEq: {
      Ty x = gen.random_type(true), y = gen.random_type(true);
      auto g = gen.gen(x, y, depth());
      auto k = gen.gen(Ty::empty(), y, depth());
      if (!g || !k) return std::nullopt;
      b.terms.emplace("g", *g);
      b.terms.emplace("k", *k);
      return b;
    }
    case RuleName::DowncastFormation:
    case RuleName::DowncastPpg:
    case RuleName::DowncastWeakEq: {
      auto k = gen.gen_any(depth());
      if (!k) return std::nullopt;
      b.terms.emplace("k", *k);
      return b;
    }
    case RuleName::TagFormation:
    case RuleName::TagPpg:
    case RuleName::UntagFormation:
    case RuleName::UntagCtc:
    case RuleName::UntagMatch:
      if (!exc_type("T")) return std::nullopt;
      return b;
    case RuleName::UntagMismatch:
    case RuleName::UntagCast:
      if (!exc_type("T") || !exc_type("R")) return std::nullopt;
      return b;
    case RuleName::TagCaseFormation:
    case RuleName::TagCaseWeakEq: {
      Ty y = gen.random_type(true);
      for (const auto& t : sig.exceptional()) {
        auto ft = gen.gen(Ty::named(t), y, depth());
        if (!ft) return std::nullopt;
        b.terms.emplace("f:" + t, *ft);
      }
      if (rule == RuleName::TagCaseWeakEq && !exc_type("R")) return std::nullopt;
      return b;
    }
    case RuleName::ByTypecheck:
    case RuleName::ByInference: {
      auto t = gen.gen_any(depth());
      if (!t) return std::nullopt;
      b.terms.emplace("t", *t);
      return b;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string SoundnessReport::str() const {
  std::ostringstream os;
  os << rule_name(rule) << ": ";
  if (passed)
    os << "pass (" << bindings_used << " bindings, " << instances_checked
       << " instances, " << nonvacuous << " nonvacuous)";
  else
    os << "COUNTEREXAMPLE " << counterexample;
  return os.str();
}

SoundnessReport soundness_check(const Signature& sig, RuleName rule, int trials,
                                int size_bound, std::uint64_t seed,
                                SchemaVariant variant, long long model_budget) {
  SoundnessReport rep;
  rep.rule = rule;
  rep.seed = seed;
  std::vector<Model> models = enumerate_models(sig, size_bound, model_budget);
  TermGen gen(sig, seed);
  for (int trial = 0; trial < trials; ++trial) {
    ++rep.bindings_tried;
    auto b = sample_bindings(sig, rule, gen);
    if (!b) continue;
    RuleInstance inst;
    try {
      inst = instantiate_schema(sig, rule, *b);
    } catch (const Error&) {
      continue;
    }
    if (variant == SchemaVariant::CorruptWeakSubst &&
        rule == RuleName::WeakSubst) {
      // deliberately weakened side condition: f only needs to propagate
      inst.premises[1] =
          DecorationClaim{std::get<Formation>(inst.premises[0]).term,
                          Deco::Propagator};
    }
    ++rep.bindings_used;
    for (size_t mi = 0; mi < models.size(); ++mi) {
      const Model& m = models[mi];
      ++rep.instances_checked;
      bool premises_hold = true;
      for (const auto& p : inst.premises)
        if (!holds_in_model(sig, m, p)) {
          premises_hold = false;
          break;
        }
      if (!premises_hold) continue;
      ++rep.nonvacuous;
      if (!holds_in_model(sig, m, inst.conclusion)) {
        rep.passed = false;
        std::ostringstream os;
        os << "at binding " << trial << ", model " << mi << " (seed " << seed
           << "): conclusion " << to_string(inst.conclusion)
           << " fails; premises:";
        for (const auto& p : inst.premises) os << " [" << to_string(p) << "]";
        os << "; " << m.str(sig);
        rep.counterexample = os.str();
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace exdec
