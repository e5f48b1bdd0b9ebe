#ifndef EXDEC_DYNEV_HPP
#define EXDEC_DYNEV_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exdec/error.hpp"

namespace exdec {
namespace dynev {

// Arithmetic is plain int64; moduli up to about 3.03e9 keep every
// intermediate product below overflow.
using Int = std::int64_t;

// Dense integer matrix, row major. Entries are reduced on demand.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, Int fill = 0);
  static Matrix from_rows(const std::vector<std::vector<Int>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Int& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  Int at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  void swap_rows(int a, int b);
  void swap_cols(int a, int b);
  void reduce_mod(Int m);  // all entries into [0, m)

  std::string str() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Int> data_;
};

Int mod_reduce(Int a, Int m);
Int gcd(Int a, Int b);

struct ResidueElem {
  Int value;    // reduced into [0, m)
  Int modulus;  // >= 2
};

// Arithmetic-level signal: inverting a non-unit of Z/mZ. Found gcd strictly
// between 1 and m; it divides both the witness and the modulus.
struct ZeroDivisorSignal {
  Int witness;
  Int gcd_with_modulus;
};

class ZeroDivisorError : public std::exception {
 public:
  explicit ZeroDivisorError(ZeroDivisorSignal s) : signal_(s) {
    what_ = "non-unit " + std::to_string(s.witness) +
            " (gcd with modulus = " + std::to_string(s.gcd_with_modulus) + ")";
  }
  const ZeroDivisorSignal& signal() const { return signal_; }
  const char* what() const noexcept override { return what_.c_str(); }

 private:
  ZeroDivisorSignal signal_;
  std::string what_;
};

// Inverse of a modulo m when gcd(a, m) = 1, else throws ZeroDivisorError.
// a must not be 0 mod m (the pivot search never offers zeros).
ResidueElem inv_mod(Int a, Int m);

// Rank-level signal: the elimination state at the moment a pivot inversion
// failed, re-thrown so the wrapper can split the modulus.
struct RankIterationSignal {
  int rank_so_far;
  int iteration;
  ZeroDivisorSignal inner;
};

class RankSplitError : public std::exception {
 public:
  RankSplitError(RankIterationSignal s, Matrix state)
      : signal_(s), state_(std::move(state)) {
    what_ = "zero divisor at iteration " + std::to_string(s.iteration) +
            " (rank so far " + std::to_string(s.rank_so_far) + ")";
  }
  const RankIterationSignal& signal() const { return signal_; }
  // Working matrix at the throw point; valid modulo any divisor of m.
  const Matrix& state() const { return state_; }
  const char* what() const noexcept override { return what_.c_str(); }

 private:
  RankIterationSignal signal_;
  Matrix state_;
  std::string what_;
};

struct Resume {
  int rank = 0;
  int iteration = 0;
};

// Gaussian elimination over Z/mZ pretending m is prime. The pivot is the
// first entry nonzero mod m in the remaining block, row major; the block is
// re-anchored by row and column swaps. When a pivot is not invertible the
// arithmetic signal is re-thrown as a RankSplitError carrying rank, iteration
// and the working matrix.
int gauss_rank_mod(Matrix m_in, Int modulus, Resume start = {});

enum class SplitMode { Restart, Continue };

// (rank, modulus) pairs; the product of the moduli equals the input modulus.
struct SplitRankResult {
  std::vector<std::pair<int, Int>> parts;
  friend bool operator==(const SplitRankResult& a, const SplitRankResult& b) {
    return a.parts == b.parts;
  }
  std::string str() const;
};

// Dynamic-evaluation wrapper: runs the rank pretending the modulus is prime
// and splits the computation on both factors whenever a zero divisor is met.
// Restart recomputes each branch from the original matrix; Continue resumes
// each branch from the forwarded elimination state reduced modulo the factor.
// Both modes return identical results; branch order is gcd factor first.
SplitRankResult dynamic_rank(const Matrix& m, Int modulus,
                             SplitMode mode = SplitMode::Restart);

// Independent oracle: rank over the prime field Z/pZ by plain elimination.
// Throws Error(NotPrime) when p is not prime (trial division).
int prime_field_rank_oracle(const Matrix& m, Int p);

// Matrix file format of the rank subcommand: first line "rows cols", then
// rows x cols whitespace-separated integers.
Matrix read_matrix(std::istream& in);

}  // namespace dynev
}  // namespace exdec

#endif
