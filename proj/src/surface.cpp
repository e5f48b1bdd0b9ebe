#include "exdec/surface.hpp"

#include <cctype>
#include <functional>
#include <sstream>

namespace exdec {
namespace surface {

std::string Diagnostic::str() const {
  const char* sev = severity == Severity::Error     ? "error"
                    : severity == Severity::Warning ? "warning"
                                                    : "note";
  std::ostringstream os;
  os << line << ":" << col << ": " << sev << ": " << message;
  return os.str();
}

namespace {

struct Token {
  enum Kind { Ident, Number, Sym, End } kind = End;
  std::string text;
  int line = 1, col = 1;
};

[[noreturn]] void fail_at(int line, int col, const std::string& msg) {
  throw ParseError(Diagnostic{Severity::Error, line, col, msg});
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { tokenize(); }
  const std::vector<Token>& tokens() const { return toks_; }

 private:
  void tokenize() {
    size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](size_t n) {
      for (size_t k = 0; k < n; ++k) {
        if (src_[i + k] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      i += n;
    };
    while (i < src_.size()) {
      char c = src_[i];
      if (c == '#') {  // comment to end of line
        while (i < src_.size() && src_[i] != '\n') advance(1);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
        continue;
      }
      Token t;
      t.line = line;
      t.col = col;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
          ++j;
        t.kind = Token::Ident;
        t.text = src_.substr(i, j - i);
        advance(j - i);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[i + 1])))) {
        size_t j = i + 1;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j])))
          ++j;
        t.kind = Token::Number;
        t.text = src_.substr(i, j - i);
        advance(j - i);
      } else {
        static const char* two[] = {"::", "->", "=>", "==", "~~", "|-"};
        t.kind = Token::Sym;
        t.text = src_.substr(i, 1);
        for (const char* s : two)
          if (src_.compare(i, 2, s) == 0) {
            t.text = s;
            break;
          }
        advance(t.text.size());
      }
      toks_.push_back(std::move(t));
    }
    Token end;
    end.kind = Token::End;
    end.line = line;
    end.col = col;
    toks_.push_back(end);
  }

  const std::string& src_;
  std::vector<Token> toks_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  SourceFile run() {
    bool saw_sig_decl = false;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind != Token::Ident)
        fail_at(t.line, t.col, "expected a declaration, got '" + t.text + "'");
      const std::string& kw = t.text;
      if (kw == "type" || kw == "op" || kw == "exception") {
        if (frozen_)
          fail_at(t.line, t.col,
                  "signature declarations must precede all other blocks");
        saw_sig_decl = true;
        parse_sig_decl();
      } else if (kw == "term") {
        freeze(t);
        parse_term_decl();
      } else if (kw == "eq" || kw == "lemma") {
        freeze(t);
        parse_eq_decl();
      } else if (kw == "model") {
        freeze(t);
        parse_model_decl();
      } else if (kw == "proof") {
        freeze(t);
        parse_proof_decl();
      } else {
        fail_at(t.line, t.col, "unknown declaration '" + kw + "'");
      }
    }
    if (!saw_sig_decl) fail_at(1, 1, "missing signature block");
    const Token& t = peek();
    freeze(t);
    return std::move(file_);
  }

 private:
  bool at_end() const { return pos_ >= lex_.tokens().size() - 1; }
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    const auto& ts = lex_.tokens();
    return ts[i < ts.size() ? i : ts.size() - 1];
  }
  Token next() { return lex_.tokens()[pos_ < lex_.tokens().size() - 1 ? pos_++ : pos_]; }

  Token expect_sym(const std::string& s) {
    const Token& t = peek();
    if (t.kind != Token::Sym || t.text != s)
      fail_at(t.line, t.col, "expected '" + s + "', got '" + t.text + "'");
    return next();
  }
  Token expect_ident() {
    const Token& t = peek();
    if (t.kind != Token::Ident)
      fail_at(t.line, t.col, "expected an identifier, got '" + t.text + "'");
    return next();
  }
  Token expect_kw(const std::string& kw) {
    Token t = expect_ident();
    if (t.text != kw)
      fail_at(t.line, t.col, "expected '" + kw + "', got '" + t.text + "'");
    return t;
  }
  bool peek_sym(const std::string& s, size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Sym && t.text == s;
  }
  bool peek_kw(const std::string& s, size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Ident && t.text == s;
  }

  void freeze(const Token& at) {
    if (frozen_) return;
    try {
      file_.sig.validate();
    } catch (const Error& e) {
      fail_at(at.line, at.col, e.what());
    }
    frozen_ = true;
  }

  static bool reserved(const std::string& s) {
    static const char* words[] = {
        "type", "op",   "exception", "extends", "term",  "eq",      "lemma",
        "model", "proof", "proves",   "carrier", "table", "cast",    "from",
        "id",    "tag",  "untag",     "empty",   "downcast", "throw", "try",
        "catch", "case", "o",         "pure",    "ppg",   "ctc"};
    for (const char* w : words)
      if (s == w) return true;
    return false;
  }

  Token decl_name() {
    Token t = expect_ident();
    if (reserved(t.text))
      fail_at(t.line, t.col, "'" + t.text + "' is a reserved word");
    return t;
  }

  void parse_sig_decl() {
    Token kw = next();
    try {
      if (kw.text == "type") {
        Token name = decl_name();
        file_.sig.add_type(name.text);
      } else if (kw.text == "op") {
        Token name = decl_name();
        expect_sym(":");
        Token dom = expect_ident();
        expect_sym("->");
        Token cod = expect_ident();
        file_.sig.add_op(name.text, dom.text, cod.text);
      } else {  // exception
        Token name = decl_name();
        file_.sig.add_exception(name.text);
        if (peek_kw("extends")) {
          next();
          while (true) {
            Token sup = expect_ident();
            file_.sig.add_subtype(name.text, sup.text);
            if (peek_sym(","))
              next();
            else
              break;
          }
        }
      }
    } catch (const Error& e) {
      fail_at(kw.line, kw.col, e.what());
    }
    expect_sym(";");
  }

  Ty parse_ty() {
    const Token& t = peek();
    if (t.kind == Token::Number && t.text == "0") {
      next();
      return Ty::empty();
    }
    Token id = expect_ident();
    if (!file_.sig.has_type(id.text))
      fail_at(id.line, id.col, "UnknownIdentifier: type " + id.text);
    return Ty::named(id.text);
  }

  TypeName parse_exc_name() {
    Token id = expect_ident();
    if (!file_.sig.is_exceptional(id.text))
      fail_at(id.line, id.col, "UnknownIdentifier: exceptional type " + id.text);
    return id.text;
  }

  // term := atom [ 'o' term ]      (right associative)
  Term parse_term() {
    Term lhs = parse_atom();
    if (peek_kw("o")) {
      next();
      Term rhs = parse_term();
      return Term::compose(lhs, rhs);
    }
    return lhs;
  }

  std::vector<std::pair<TypeName, Term>> parse_handler_list(const char* what,
                                                            bool note_dupes) {
    std::vector<std::pair<TypeName, Term>> out;
    expect_sym("{");
    while (true) {
      Token id = peek();
      TypeName t = parse_exc_name();
      expect_sym("=>");
      Term g = parse_term();
      for (const auto& [seen, _] : out)
        if (note_dupes && seen == t)
          file_.notes.push_back(Diagnostic{
              Severity::Note, id.line, id.col,
              std::string(what) + " repeats type " + t +
                  "; the later handler is never executed"});
      out.emplace_back(t, g);
      if (peek_sym(",")) {
        next();
        continue;
      }
      break;
    }
    expect_sym("}");
    return out;
  }

  Term parse_atom() {
    const Token& t = peek();
    if (t.kind == Token::Sym && t.text == "(") {
      next();
      Term inner = parse_term();
      expect_sym(")");
      return inner;
    }
    if (t.kind == Token::Sym && t.text == "[") {
      next();
      Term g = parse_term();
      expect_sym("|");
      Term k = parse_term();
      expect_sym("]");
      return Term::copair(g, k);
    }
    Token id = expect_ident();
    const std::string& kw = id.text;
    if (kw == "id") {
      expect_sym("[");
      Ty at = parse_ty();
      expect_sym("]");
      return Term::id(at);
    }
    if (kw == "tag" || kw == "untag") {
      expect_sym("[");
      TypeName ty = parse_exc_name();
      expect_sym("]");
      return kw == "tag" ? Term::tag(ty) : Term::untag(ty);
    }
    if (kw == "empty") {
      expect_sym("[");
      Ty cod = parse_ty();
      expect_sym("]");
      return Term::empty(cod);
    }
    if (kw == "cast") {
      expect_sym("[");
      TypeName from = parse_exc_name();
      expect_sym(",");
      TypeName to = parse_exc_name();
      expect_sym("]");
      return Term::cast(from, to);
    }
    if (kw == "throw") {
      expect_sym("[");
      TypeName ty = parse_exc_name();
      expect_sym(",");
      Ty cod = parse_ty();
      expect_sym("]");
      return Term::throw_(ty, cod);
    }
    if (kw == "downcast") {
      expect_sym("(");
      Term body = parse_term();
      expect_sym(")");
      return Term::downcast(body);
    }
    if (kw == "case")
      return Term::tag_case(parse_handler_list("case", false));
    if (kw == "try") {
      expect_sym("(");
      Term body = parse_term();
      expect_sym(")");
      expect_kw("catch");
      return Term::try_catch(body, parse_handler_list("catch", true));
    }
    // named term or base operation
    for (const auto& nt : file_.terms)
      if (nt.name == kw) return nt.term;
    if (file_.sig.find_op(kw)) return Term::base_op(kw);
    fail_at(id.line, id.col, "UnknownIdentifier: " + kw);
  }

  void parse_term_decl() {
    Token kw = next();  // term
    Token name = decl_name();
    expect_sym("=");
    Term t = parse_term();
    expect_sym(";");
    try {
      typecheck(file_.sig, t);
      infer_decoration(file_.sig, t);
    } catch (const Error& e) {
      fail_at(kw.line, kw.col, e.what());
    }
    for (const auto& nt : file_.terms)
      if (nt.name == name.text)
        fail_at(name.line, name.col, "DuplicateName: term " + name.text);
    file_.terms.push_back(NamedTerm{name.text, t});
  }

  void parse_eq_decl() {
    next();  // eq | lemma
    Token name = decl_name();
    expect_sym(":");
    Term lhs = parse_term();
    const Token& rel = peek();
    EqMode mode;
    if (peek_sym("=="))
      mode = EqMode::Strong;
    else if (peek_sym("~~"))
      mode = EqMode::Weak;
    else
      fail_at(rel.line, rel.col, "expected '==' or '~~'");
    next();
    Term rhs = parse_term();
    expect_sym(";");
    try {
      Arity l = typecheck(file_.sig, lhs);
      Arity r = typecheck(file_.sig, rhs);
      if (l != r)
        throw Error(Errc::ArityMismatch,
                    "equation sides have arities " + l.str() + " and " + r.str());
      infer_decoration(file_.sig, lhs);
      infer_decoration(file_.sig, rhs);
    } catch (const Error& e) {
      fail_at(name.line, name.col, e.what());
    }
    for (const auto& ne : file_.equations)
      if (ne.name == name.text)
        fail_at(name.line, name.col, "DuplicateName: eq " + name.text);
    file_.equations.push_back(NamedEquation{name.text, Equation{lhs, rhs, mode}});
  }

  int elem_index(const NamedModel& m, const TypeName& type, const Token& name) {
    auto it = m.elem_names.find(type);
    if (it != m.elem_names.end())
      for (size_t i = 0; i < it->second.size(); ++i)
        if (it->second[i] == name.text) return static_cast<int>(i);
    fail_at(name.line, name.col,
            "UnknownIdentifier: element " + name.text + " of " + type);
  }

  void parse_model_decl() {
    Token kw = next();  // model
    Token name = decl_name();
    NamedModel nm;
    nm.name = name.text;
    for (const auto& t : file_.sig.types()) nm.model.carrier[t] = 0;
    expect_sym("{");
    while (!peek_sym("}")) {
      Token item = expect_ident();
      if (item.text == "carrier") {
        Token ty = expect_ident();
        if (!file_.sig.has_type(ty.text))
          fail_at(ty.line, ty.col, "UnknownIdentifier: type " + ty.text);
        expect_sym("=");
        expect_sym("{");
        std::vector<std::string> elems;
        while (!peek_sym("}")) {
          Token e = expect_ident();
          elems.push_back(e.text);
          if (peek_sym(",")) next();
        }
        expect_sym("}");
        expect_sym(";");
        nm.model.carrier[ty.text] = static_cast<int>(elems.size());
        nm.elem_names[ty.text] = std::move(elems);
      } else if (item.text == "table") {
        Token opname = expect_ident();
        const OpDecl* op = file_.sig.find_op(opname.text);
        if (!op)
          fail_at(opname.line, opname.col, "UnknownIdentifier: op " + opname.text);
        expect_sym("=");
        std::vector<int> tbl(static_cast<size_t>(nm.model.carrier[op->dom]), -1);
        parse_map_into(nm, op->dom, op->cod, tbl);
        for (size_t i = 0; i < tbl.size(); ++i)
          if (tbl[i] < 0)
            fail_at(opname.line, opname.col,
                    "table for " + opname.text + " is not total");
        nm.model.op_table[opname.text] = std::move(tbl);
      } else if (item.text == "cast") {
        Token from = expect_ident();
        Token to = expect_ident();
        expect_sym("=");
        std::vector<int> tbl(
            static_cast<size_t>(nm.model.carrier.count(from.text)
                                    ? nm.model.carrier[from.text]
                                    : 0),
            -1);
        parse_map_into(nm, from.text, to.text, tbl);
        for (size_t i = 0; i < tbl.size(); ++i)
          if (tbl[i] < 0)
            fail_at(from.line, from.col, "cast table is not total");
        nm.model.cast_table[{from.text, to.text}] = std::move(tbl);
      } else {
        fail_at(item.line, item.col,
                "expected 'carrier', 'table' or 'cast' in model block");
      }
    }
    expect_sym("}");
    try {
      validate_model(file_.sig, nm.model);
    } catch (const Error& e) {
      fail_at(kw.line, kw.col, e.what());
    }
    for (const auto& m : file_.models)
      if (m.name == nm.name)
        fail_at(name.line, name.col, "DuplicateName: model " + nm.name);
    file_.models.push_back(std::move(nm));
  }

  void parse_map_into(NamedModel& nm, const TypeName& dom, const TypeName& cod,
                      std::vector<int>& tbl) {
    expect_sym("{");
    while (!peek_sym("}")) {
      Token from = expect_ident();
      int fi = elem_index(nm, dom, from);
      expect_sym("->");
      Token to = expect_ident();
      int ti = elem_index(nm, cod, to);
      tbl[static_cast<size_t>(fi)] = ti;
      if (peek_sym(",")) next();
    }
    expect_sym("}");
    expect_sym(";");
  }

  Conclusion parse_conclusion() {
    Term lhs = parse_term();
    if (peek_sym(":")) {
      next();
      Ty dom = parse_ty();
      expect_sym("->");
      Ty cod = parse_ty();
      return Formation{lhs, {dom, cod}};
    }
    if (peek_sym("::")) {
      next();
      Token d = expect_ident();
      Deco deco;
      if (d.text == "pure")
        deco = Deco::Pure;
      else if (d.text == "ppg")
        deco = Deco::Propagator;
      else if (d.text == "ctc")
        deco = Deco::Catcher;
      else
        fail_at(d.line, d.col, "expected 'pure', 'ppg' or 'ctc'");
      return DecorationClaim{lhs, deco};
    }
    if (peek_sym("==") || peek_sym("~~")) {
      EqMode mode = peek_sym("==") ? EqMode::Strong : EqMode::Weak;
      next();
      Term rhs = parse_term();
      return Equation{lhs, rhs, mode};
    }
    const Token& t = peek();
    fail_at(t.line, t.col, "expected ':', '::', '==' or '~~' in a conclusion");
  }

  void parse_proof_decl() {
    next();  // proof
    Token name = decl_name();
    NamedProof np;
    np.name = name.text;
    if (peek_kw("proves")) {
      next();
      Token eqname = expect_ident();
      bool found = false;
      for (const auto& ne : file_.equations) found = found || ne.name == eqname.text;
      if (!found)
        fail_at(eqname.line, eqname.col, "UnknownIdentifier: eq " + eqname.text);
      np.proves = eqname.text;
    }
    expect_sym("{");
    while (!peek_sym("}")) {
      ProofStep step;
      Token label = decl_name();
      step.label = label.text;
      step.line = label.line;
      for (const auto& s : np.steps)
        if (s.label == step.label)
          fail_at(label.line, label.col, "DuplicateName: step " + step.label);
      expect_sym(":");
      Token rn = expect_ident();
      auto rule = rule_from_name(rn.text);
      if (!rule) fail_at(rn.line, rn.col, "UnknownRule: " + rn.text);
      step.rule = *rule;
      if (peek_kw("from")) {
        next();
        while (true) {
          Token ref = expect_ident();
          bool found = false;
          for (const auto& s : np.steps) found = found || s.label == ref.text;
          if (!found)
            fail_at(ref.line, ref.col,
                    "UnknownIdentifier: step " + ref.text +
                        " (premises must reference earlier steps)");
          step.premise_labels.push_back(ref.text);
          if (peek_sym(","))
            next();
          else
            break;
        }
      }
      expect_sym("|-");
      step.conclusion = parse_conclusion();
      expect_sym(";");
      np.steps.push_back(std::move(step));
    }
    expect_sym("}");
    if (np.steps.empty())
      fail_at(name.line, name.col, "proof " + np.name + " has no steps");
    for (const auto& p : file_.proofs)
      if (p.name == np.name)
        fail_at(name.line, name.col, "DuplicateName: proof " + np.name);
    file_.proofs.push_back(std::move(np));
  }

  Lexer lex_;
  size_t pos_ = 0;
  SourceFile file_;
  bool frozen_ = false;
};

}  // namespace

SourceFile parse(const std::string& source) { return Parser(source).run(); }

namespace {

std::string elem(const NamedModel& m, const TypeName& type, int idx) {
  auto it = m.elem_names.find(type);
  if (it != m.elem_names.end() && idx < static_cast<int>(it->second.size()))
    return it->second[static_cast<size_t>(idx)];
  return type + std::to_string(idx);
}

}  // namespace

std::string print(const SourceFile& f) {
  std::ostringstream os;
  const Signature& sig = f.sig;
  for (const auto& t : sig.types())
    if (!sig.is_exceptional(t)) os << "type " << t << ";\n";
  for (const auto& t : sig.exceptional()) {
    os << "exception " << t;
    bool first = true;
    for (const auto& [sub, sup] : sig.subtype_decls())
      if (sub == t) {
        os << (first ? " extends " : ", ") << sup;
        first = false;
      }
    os << ";\n";
  }
  for (const auto& op : sig.ops())
    os << "op " << op.name << " : " << op.dom << " -> " << op.cod << ";\n";
  for (const auto& nt : f.terms)
    os << "term " << nt.name << " = " << to_string(nt.term) << ";\n";
  for (const auto& ne : f.equations)
    os << "eq " << ne.name << " : " << to_string(ne.eq.lhs)
       << (ne.eq.mode == EqMode::Strong ? " == " : " ~~ ")
       << to_string(ne.eq.rhs) << ";\n";
  for (const auto& nm : f.models) {
    os << "model " << nm.name << " {\n";
    for (const auto& t : sig.types()) {
      os << "  carrier " << t << " = {";
      int n = nm.model.carrier.count(t) ? nm.model.carrier.at(t) : 0;
      for (int i = 0; i < n; ++i) os << (i ? ", " : " ") << elem(nm, t, i);
      os << (n ? " }" : "}") << ";\n";
    }
    for (const auto& op : sig.ops()) {
      os << "  table " << op.name << " = {";
      const auto& tbl = nm.model.op_table.at(op.name);
      for (size_t i = 0; i < tbl.size(); ++i)
        os << (i ? ", " : " ") << elem(nm, op.dom, static_cast<int>(i)) << " -> "
           << elem(nm, op.cod, tbl[i]);
      os << (tbl.empty() ? "}" : " }") << ";\n";
    }
    for (const auto& [pair, tbl] : nm.model.cast_table) {
      os << "  cast " << pair.first << " " << pair.second << " = {";
      for (size_t i = 0; i < tbl.size(); ++i)
        os << (i ? ", " : " ") << elem(nm, pair.first, static_cast<int>(i))
           << " -> " << elem(nm, pair.second, tbl[i]);
      os << (tbl.empty() ? "}" : " }") << ";\n";
    }
    os << "}\n";
  }
  for (const auto& np : f.proofs) {
    os << "proof " << np.name;
    if (np.proves) os << " proves " << *np.proves;
    os << " {\n";
    for (const auto& s : np.steps) {
      os << "  " << s.label << ": " << rule_name(s.rule);
      for (size_t i = 0; i < s.premise_labels.size(); ++i)
        os << (i ? ", " : " from ") << s.premise_labels[i];
      os << " |- " << to_string(s.conclusion) << ";\n";
    }
    os << "}\n";
  }
  return os.str();
}

Verdict check_named_proof(const Signature& sig, const NamedProof& p) {
  Verdict v;
  v.accepted = true;
  std::map<std::string, Conclusion> concluded;
  for (const auto& step : p.steps) {
    std::vector<Conclusion> premises;
    for (const auto& label : step.premise_labels) {
      auto it = concluded.find(label);
      if (it == concluded.end()) {
        v.accepted = false;
        v.path = step.label;
        v.reason = "premise " + label + " not established";
        v.code = Errc::SchemaMismatch;
        return v;
      }
      premises.push_back(it->second);
    }
    if (auto err = check_node(sig, step.rule, premises, step.conclusion)) {
      v.accepted = false;
      v.path = step.label;
      v.reason = err->message;
      v.code = err->code;
      return v;
    }
    std::string note;
    if (step.rule == RuleName::ByTypecheck) note = "  [discharged by typecheck]";
    if (step.rule == RuleName::ByInference) note = "  [discharged by inference]";
    v.trace.push_back(step.label + ": " + rule_name(step.rule) + " |- " +
                      to_string(step.conclusion) + note);
    concluded[step.label] = step.conclusion;
  }
  return v;
}

Proof proof_tree(const NamedProof& p) {
  std::map<std::string, const ProofStep*> by_label;
  for (const auto& s : p.steps) by_label[s.label] = &s;
  std::function<Proof(const ProofStep&)> build = [&](const ProofStep& s) {
    Proof node;
    node.rule = s.rule;
    node.conclusion = s.conclusion;
    for (const auto& label : s.premise_labels) {
      auto it = by_label.find(label);
      if (it == by_label.end())
        throw Error(Errc::SchemaMismatch, "premise " + label + " not found");
      node.premises.push_back(build(*it->second));
    }
    return node;
  };
  if (p.steps.empty()) throw Error(Errc::SchemaMismatch, "proof has no steps");
  return build(p.steps.back());
}

}  // namespace surface
}  // namespace exdec
