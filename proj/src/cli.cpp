#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "exdec/dynev.hpp"
#include "exdec/surface.hpp"

namespace exdec {

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

std::optional<surface::SourceFile> load(const std::string& path,
                                        std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << path << ": cannot open file\n";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return surface::parse(buf.str());
  } catch (const surface::ParseError& e) {
    err << path << ":" << e.diagnostic().str() << "\n";
    return std::nullopt;
  }
}

void print_notes(const std::string& path, const surface::SourceFile& f,
                 std::ostream& err) {
  for (const auto& d : f.notes) err << path << ":" << d.str() << "\n";
}

int cmd_check(const std::vector<std::string>& files, bool trace,
              std::ostream& out, std::ostream& err) {
  int status = kOk;
  for (const auto& path : files) {
    auto f = load(path, err);
    if (!f) return kUsage;
    print_notes(path, *f, err);
    for (const auto& np : f->proofs) {
      Verdict v = surface::check_named_proof(f->sig, np);
      if (v.accepted) {
        out << "proof " << np.name << ": accepted\n";
        if (trace)
          for (const auto& line : v.trace) out << "  " << line << "\n";
        if (np.proves) {
          const Equation* goal = nullptr;
          for (const auto& ne : f->equations)
            if (ne.name == *np.proves) goal = &ne.eq;
          const auto* concl = std::get_if<Equation>(&np.steps.back().conclusion);
          if (!goal || !concl || !(*concl == *goal)) {
            out << "proof " << np.name << ": rejected (final step does not conclude "
                << *np.proves << ")\n";
            status = kFailed;
          }
        }
      } else {
        out << "proof " << np.name << ": rejected at " << v.path << ": "
            << (v.code ? std::string(errc_name(*v.code)) + ": " : "")
            << v.reason << "\n";
        status = kFailed;
      }
    }
  }
  return status;
}

int cmd_infer(const std::vector<std::string>& files, std::ostream& out,
              std::ostream& err) {
  for (const auto& path : files) {
    auto f = load(path, err);
    if (!f) return kUsage;
    print_notes(path, *f, err);
    for (const auto& nt : f->terms) {
      Arity a = typecheck(f->sig, nt.term);
      Deco d = infer_decoration(f->sig, nt.term);
      out << nt.name << " : " << a.str() << ", " << deco_name(d) << "\n";
    }
  }
  return kOk;
}

int cmd_elaborate(const std::vector<std::string>& files, std::ostream& out,
                  std::ostream& err) {
  for (const auto& path : files) {
    auto f = load(path, err);
    if (!f) return kUsage;
    print_notes(path, *f, err);
    for (const auto& nt : f->terms)
      out << nt.name << " = " << to_string(elaborate(f->sig, nt.term)) << "\n";
  }
  return kOk;
}

int cmd_eval(const std::vector<std::string>& files, std::ostream& out,
             std::ostream& err) {
  int status = kOk;
  for (const auto& path : files) {
    auto f = load(path, err);
    if (!f) return kUsage;
    print_notes(path, *f, err);
    for (const auto& ne : f->equations)
      for (const auto& nm : f->models) {
        bool ok = eval_equation(f->sig, nm.model, ne.eq);
        out << "eq " << ne.name << " in " << nm.name << ": "
            << (ok ? "holds" : "fails") << "\n";
        if (!ok) status = kFailed;
      }
  }
  return status;
}

// first input where the interpretations differ, for counterexample reports
std::string first_difference(const Signature& sig, const Model& m,
                             const Equation& e) {
  EffFunction l = interpret(sig, m, e.lhs);
  EffFunction r = interpret(sig, m, e.rhs);
  int upto = e.mode == EqMode::Strong ? l.input_count() : l.ordinary_count();
  for (int i = 0; i < upto; ++i)
    if (!(l.at_index(i) == r.at_index(i))) {
      std::ostringstream os;
      os << "at input " << to_string(sig, m, l.input_at(i)) << ": lhs gives "
         << to_string(sig, m, l.at_index(i)) << ", rhs gives "
         << to_string(sig, m, r.at_index(i));
      return os.str();
    }
  return "tables agree";
}

int cmd_modelcheck(const std::vector<std::string>& files, int bound,
                   long long budget, std::ostream& out, std::ostream& err) {
  int status = kOk;
  for (const auto& path : files) {
    auto f = load(path, err);
    if (!f) return kUsage;
    print_notes(path, *f, err);
    for (const auto& ne : f->equations) {
      ModelEnumerator en(f->sig, bound, budget);
      long long n = 0;
      bool failed = false;
      while (auto m = en.next()) {
        ++n;
        if (!eval_equation(f->sig, *m, ne.eq)) {
          out << "eq " << ne.name << ": counterexample in model " << (n - 1)
              << " (bound " << bound << ", seed " << kDefaultModelSeed
              << "): " << first_difference(f->sig, *m, ne.eq) << "; "
              << m->str(f->sig) << "\n";
          failed = true;
          status = kFailed;
          break;
        }
      }
      if (!failed)
        out << "eq " << ne.name << ": pass (" << n << " models, bound " << bound
            << (en.exhaustive() ? ", exhaustive" : ", sampled") << ")\n";
    }
  }
  return status;
}

int cmd_rank(const std::string& matrix_file, long long modulus,
             const std::string& mode, std::ostream& out, std::ostream& err) {
  std::ifstream in(matrix_file);
  if (!in) {
    err << matrix_file << ": cannot open file\n";
    return kUsage;
  }
  try {
    dynev::Matrix m = dynev::read_matrix(in);
    dynev::SplitMode sm = mode == "continue" ? dynev::SplitMode::Continue
                                             : dynev::SplitMode::Restart;
    dynev::SplitRankResult res = dynev::dynamic_rank(m, modulus, sm);
    out << res.str();
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"decorated proof kernel and finite-model checker for exception effects"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  bool trace = false;
  auto* check = app.add_subcommand("check", "check the proofs of the files");
  check->add_option("files", files, "source files")->required();
  check->add_flag("--trace", trace, "print the accepted derivation steps");

  auto* infer = app.add_subcommand("infer", "print arity and decoration per term");
  infer->add_option("files", files, "source files")->required();

  auto* elaborate =
      app.add_subcommand("elaborate", "print the core form of each term");
  elaborate->add_option("files", files, "source files")->required();

  auto* eval =
      app.add_subcommand("eval", "evaluate named equations in named models");
  eval->add_option("files", files, "source files")->required();

  int bound = 2;
  long long budget = 20000;
  auto* modelcheck = app.add_subcommand(
      "modelcheck", "search models up to a carrier bound for counterexamples");
  modelcheck->add_option("files", files, "source files")->required();
  modelcheck->add_option("--bound", bound, "carrier size bound (default 2)");
  modelcheck->add_option("--budget", budget,
                         "model budget before sampling (default 20000)");

  std::string matrix_file, mode = "restart";
  long long modulus = 0;
  auto* rank = app.add_subcommand(
      "rank", "dynamic-evaluation rank of an integer matrix modulo m");
  rank->add_option("--matrix", matrix_file, "matrix file: 'rows cols' then entries")
      ->required();
  rank->add_option("--modulus", modulus, "modulus (>= 2)")->required();
  rank->add_option("--mode", mode, "restart | continue")
      ->check(CLI::IsMember({"restart", "continue"}));

  try {
    std::vector<std::string> argv(args.rbegin(), args.rend());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kOk;
    }
    err << e.what() << "\n";
    return kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(files, trace, out, err);
    if (infer->parsed()) return cmd_infer(files, out, err);
    if (elaborate->parsed()) return cmd_elaborate(files, out, err);
    if (eval->parsed()) return cmd_eval(files, out, err);
    if (modelcheck->parsed()) return cmd_modelcheck(files, bound, budget, out, err);
    if (rank->parsed()) {
      if (modulus < 2) {
        err << "modulus must be at least 2\n";
        return kUsage;
      }
      return cmd_rank(matrix_file, modulus, mode, out, err);
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace exdec
