#ifndef EXDEC_ERROR_HPP
#define EXDEC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace exdec {

// Error codes shared across the library. Each thrown Error carries one.
enum class Errc {
  DuplicateName,
  UnknownType,
  NonPartialOrder,
  NonExceptionalSubtype,
  ArityMismatch,
  UnknownOp,
  IllegalCast,
  EmptyHandlerList,
  HandlerNotPropagator,
  SchemaMismatch,
  DecorationViolation,
  UnknownRule,
  MissingBinding,
  SideConditionViolated,
  InvalidModel,
  NotPrime,
  SyntaxError,
  UnknownIdentifier,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace exdec

#endif
