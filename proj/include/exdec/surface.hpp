#ifndef EXDEC_SURFACE_HPP
#define EXDEC_SURFACE_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exdec/kernel.hpp"
#include "exdec/semantics.hpp"
#include "exdec/term.hpp"

namespace exdec {
namespace surface {

enum class Severity { Error, Warning, Note };

struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 0, col = 0;  // 1-based
  std::string message;

  std::string str() const;
};

struct NamedTerm {
  std::string name;
  Term term;
};

struct NamedEquation {
  std::string name;
  Equation eq;
};

struct NamedModel {
  std::string name;
  Model model;
  // element names per type, in listed order (indices are table values)
  std::map<TypeName, std::vector<std::string>> elem_names;
};

struct ProofStep {
  std::string label;
  RuleName rule;
  std::vector<std::string> premise_labels;
  Conclusion conclusion;
  int line = 0;
};

struct NamedProof {
  std::string name;
  std::optional<std::string> proves;  // named equation the root must conclude
  std::vector<ProofStep> steps;
};

// Parsed source: one signature plus named terms, equations, models, proofs,
// in declaration order. Non-error notes collected during parsing (duplicate
// try/catch handler types and the like) are kept for the CLI.
struct SourceFile {
  Signature sig;
  std::vector<NamedTerm> terms;
  std::vector<NamedEquation> equations;
  std::vector<NamedModel> models;
  std::vector<NamedProof> proofs;
  std::vector<Diagnostic> notes;
};

class ParseError : public std::exception {
 public:
  explicit ParseError(Diagnostic d) : diag_(std::move(d)) {
    what_ = diag_.str();
  }
  const Diagnostic& diagnostic() const { return diag_; }
  const char* what() const noexcept override { return what_.c_str(); }

 private:
  Diagnostic diag_;
  std::string what_;
};

// Parses a whole source file. Throws ParseError with a located diagnostic.
SourceFile parse(const std::string& source);

// Canonical rendering; parse(print(parse(s))) == parse(print(parse(print(parse(s))))).
std::string print(const SourceFile& f);

// Step checker over the parsed proof: premises refer to earlier steps by
// label. Returns the kernel verdict with step labels in paths.
Verdict check_named_proof(const Signature& sig, const NamedProof& p);

// Proof tree expansion of the step list (premise references duplicated).
Proof proof_tree(const NamedProof& p);

}  // namespace surface

// Batch CLI. Subcommands: check, infer, elaborate, eval, modelcheck, rank.
// Exit 0 on full success, 1 on any rejection/counterexample, 2 on usage or
// parse errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace exdec

#endif
