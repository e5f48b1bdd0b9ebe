#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "exdec/dynev.hpp"
#include "exdec/surface.hpp"

namespace py = pybind11;
using namespace exdec;

namespace {

dynev::Matrix matrix_from_lists(const std::vector<std::vector<dynev::Int>>& rows) {
  return dynev::Matrix::from_rows(rows);
}

std::vector<std::pair<int, dynev::Int>> py_dynamic_rank(
    const std::vector<std::vector<dynev::Int>>& rows, dynev::Int modulus,
    const std::string& mode) {
  dynev::SplitMode sm = mode == "continue" ? dynev::SplitMode::Continue
                                           : dynev::SplitMode::Restart;
  return dynev::dynamic_rank(matrix_from_lists(rows), modulus, sm).parts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "decorated equational logic for exceptions: kernel, finite-model "
            "oracle and dynamic-evaluation rank";

  py::register_exception<Error>(m, "ExdecError");
  py::register_exception<surface::ParseError>(m, "ExdecParseError");
  py::register_exception<dynev::ZeroDivisorError>(m, "ZeroDivisor");
  py::register_exception<dynev::RankSplitError>(m, "RankSplit");

  py::enum_<Deco>(m, "Deco")
      .value("PURE", Deco::Pure)
      .value("PROPAGATOR", Deco::Propagator)
      .value("CATCHER", Deco::Catcher);

  py::enum_<EqMode>(m, "EqMode")
      .value("STRONG", EqMode::Strong)
      .value("WEAK", EqMode::Weak);

  py::class_<Ty>(m, "Ty")
      .def_static("empty", &Ty::empty)
      .def_static("named", &Ty::named)
      .def("is_empty", &Ty::is_empty)
      .def("__repr__", &Ty::str)
      .def("__eq__", [](const Ty& a, const Ty& b) { return a == b; });

  py::class_<Signature>(m, "Signature")
      .def(py::init<>())
      .def("add_type", &Signature::add_type, py::return_value_policy::reference)
      .def("add_exception", &Signature::add_exception,
           py::return_value_policy::reference)
      .def("add_op", &Signature::add_op, py::return_value_policy::reference)
      .def("add_subtype", &Signature::add_subtype,
           py::return_value_policy::reference)
      .def("validate", &Signature::validate, py::return_value_policy::reference)
      .def("cast_exists", &Signature::cast_exists)
      .def("types", &Signature::types)
      .def("exceptional", &Signature::exceptional)
      .def("hierarchy_enabled", &Signature::hierarchy_enabled);

  py::class_<Arity>(m, "Arity")
      .def_readonly("dom", &Arity::dom)
      .def_readonly("cod", &Arity::cod)
      .def("__repr__", &Arity::str);

  py::class_<Term>(m, "Term")
      .def_static("id", &Term::id)
      .def_static("base_op", &Term::base_op)
      .def_static("compose", &Term::compose)
      .def_static("empty", &Term::empty)
      .def_static("tag", &Term::tag)
      .def_static("untag", &Term::untag)
      .def_static("downcast", &Term::downcast)
      .def_static("copair", &Term::copair)
      .def_static("tag_case", &Term::tag_case)
      .def_static("cast", &Term::cast)
      .def_static("throw_", &Term::throw_)
      .def_static("try_catch", &Term::try_catch)
      .def("__repr__", [](const Term& t) { return to_string(t); })
      .def("__eq__", [](const Term& a, const Term& b) { return a == b; });

  m.def("typecheck", &typecheck);
  m.def("infer_decoration", &infer_decoration);
  m.def("elaborate", &elaborate);
  m.def("term_str", [](const Term& t) { return to_string(t); });

  py::class_<Equation>(m, "Equation")
      .def(py::init([](Term lhs, Term rhs, EqMode mode) {
             return Equation{std::move(lhs), std::move(rhs), mode};
           }),
           py::arg("lhs"), py::arg("rhs"), py::arg("mode"));

  py::class_<Model>(m, "Model")
      .def(py::init<>())
      .def_readwrite("carrier", &Model::carrier)
      .def_readwrite("op_table", &Model::op_table)
      .def("set_cast", [](Model& m, const TypeName& from, const TypeName& to,
                          std::vector<int> tbl) {
        m.cast_table[{from, to}] = std::move(tbl);
      })
      .def("str", &Model::str);

  m.def("validate_model", &validate_model);
  m.def("eval_equation",
        [](const Signature& sig, const Model& m, const Equation& e) {
          return eval_equation(sig, m, e);
        });
  m.def("enumerate_models",
        [](const Signature& sig, int bound, long long budget) {
          return enumerate_models(sig, bound, budget);
        },
        py::arg("sig"), py::arg("size_bound"), py::arg("budget"));
  m.def("modelcheck",
        [](const Signature& sig, const Equation& e, int bound, long long budget)
            -> std::optional<std::string> {
          ModelEnumerator en(sig, bound, budget);
          while (auto m = en.next())
            if (!eval_equation(sig, *m, e)) return m->str(sig);
          return std::nullopt;
        },
        py::arg("sig"), py::arg("eq"), py::arg("size_bound") = 2,
        py::arg("budget") = 20000,
        "first countermodel of the equation, or None");

  m.def("parse_source", [](const std::string& text) {
    surface::SourceFile f = surface::parse(text);
    py::dict out;
    py::dict terms;
    for (const auto& nt : f.terms) terms[py::str(nt.name)] = nt.term;
    out["terms"] = terms;
    py::dict eqs;
    for (const auto& ne : f.equations) eqs[py::str(ne.name)] = ne.eq;
    out["equations"] = eqs;
    out["printed"] = surface::print(f);
    return out;
  });
  m.def("check_source", [](const std::string& text) {
    surface::SourceFile f = surface::parse(text);
    py::list out;
    for (const auto& np : f.proofs) {
      Verdict v = surface::check_named_proof(f.sig, np);
      out.append(py::make_tuple(np.name, v.accepted,
                                v.accepted ? std::string() : v.path + ": " + v.reason));
    }
    return out;
  });

  m.def("inv_mod", [](dynev::Int a, dynev::Int mod) {
    dynev::ResidueElem r = dynev::inv_mod(a, mod);
    return r.value;
  });
  m.def("gauss_rank_mod",
        [](const std::vector<std::vector<dynev::Int>>& rows, dynev::Int mod) {
          return dynev::gauss_rank_mod(matrix_from_lists(rows), mod);
        });
  m.def("dynamic_rank", &py_dynamic_rank, py::arg("matrix"), py::arg("modulus"),
        py::arg("mode") = "restart");
  m.def("prime_field_rank",
        [](const std::vector<std::vector<dynev::Int>>& rows, dynev::Int p) {
          return dynev::prime_field_rank_oracle(matrix_from_lists(rows), p);
        });

  m.attr("__version__") = "0.1.0";
}
