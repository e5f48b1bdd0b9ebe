#include "exdec/dynev.hpp"

#include <istream>
#include <sstream>
#include <utility>

namespace exdec {
namespace dynev {

Matrix::Matrix(int rows, int cols, Int fill)
    : rows_(rows), cols_(cols),
      data_(static_cast<size_t>(rows) * static_cast<size_t>(cols), fill) {}

Matrix Matrix::from_rows(const std::vector<std::vector<Int>>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != c)
      throw std::invalid_argument("ragged matrix rows");
    for (int j = 0; j < c; ++j) m.at(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return m;
}

void Matrix::swap_rows(int a, int b) {
  if (a == b) return;
  for (int j = 0; j < cols_; ++j) std::swap(at(a, j), at(b, j));
}

void Matrix::swap_cols(int a, int b) {
  if (a == b) return;
  for (int i = 0; i < rows_; ++i) std::swap(at(i, a), at(i, b));
}

void Matrix::reduce_mod(Int m) {
  for (auto& v : data_) v = mod_reduce(v, m);
}

std::string Matrix::str() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << at(i, j);
    os << "\n";
  }
  return os.str();
}

Int mod_reduce(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

Int gcd(Int a, Int b) {
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

ResidueElem inv_mod(Int a, Int m) {
  if (m < 2) throw std::invalid_argument("modulus must be at least 2");
  Int r = mod_reduce(a, m);
  if (r == 0) throw std::invalid_argument("cannot invert zero");
  // extended Euclid on (r, m)
  Int old_r = r, cur_r = m;
  Int old_s = 1, cur_s = 0;
  while (cur_r != 0) {
    Int q = old_r / cur_r;
    Int tmp = old_r - q * cur_r;
    old_r = cur_r;
    cur_r = tmp;
    tmp = old_s - q * cur_s;
    old_s = cur_s;
    cur_s = tmp;
  }
  if (old_r != 1)
    throw ZeroDivisorError(ZeroDivisorSignal{r, old_r});
  return ResidueElem{mod_reduce(old_s, m), m};
}

int gauss_rank_mod(Matrix a, Int modulus, Resume start) {
  a.reduce_mod(modulus);
  int rank = start.rank;
  int it = start.iteration;
  const int rows = a.rows(), cols = a.cols();
  while (rank < rows && it < cols) {
    // first nonzero entry of the remaining block, row major
    int pi = -1, pj = -1;
    for (int i = rank; i < rows && pi < 0; ++i)
      for (int j = it; j < cols; ++j)
        if (a.at(i, j) != 0) {
          pi = i;
          pj = j;
          break;
        }
    if (pi < 0) return rank;  // block is zero mod m
    // invert before swapping: on failure the carried state must not contain
    // a swap a from-scratch run modulo a factor would never perform
    Int pivot = a.at(pi, pj);
    ResidueElem inv{0, modulus};
    try {
      inv = inv_mod(pivot, modulus);
    } catch (const ZeroDivisorError& zde) {
      throw RankSplitError(RankIterationSignal{rank, it, zde.signal()}, a);
    }
    a.swap_rows(rank, pi);
    a.swap_cols(it, pj);
    for (int i = rank + 1; i < rows; ++i) {
      Int factor = mod_reduce(a.at(i, it) * inv.value, modulus);
      if (factor == 0) continue;
      for (int j = it; j < cols; ++j)
        a.at(i, j) = mod_reduce(a.at(i, j) - factor * a.at(rank, j), modulus);
    }
    ++rank;
    ++it;
  }
  return rank;
}

namespace {

void dynamic_rank_rec(const Matrix& original, const Matrix& state, Int modulus,
                      Resume resume, SplitMode mode, SplitRankResult& out) {
  if (modulus == 1) return;  // nothing lives mod 1
  try {
    int r = mode == SplitMode::Continue ? gauss_rank_mod(state, modulus, resume)
                                        : gauss_rank_mod(original, modulus);
    out.parts.emplace_back(r, modulus);
  } catch (const RankSplitError& e) {
    Int g = e.signal().inner.gcd_with_modulus;
    Resume next{e.signal().rank_so_far, e.signal().iteration};
    dynamic_rank_rec(original, e.state(), g, next, mode, out);
    dynamic_rank_rec(original, e.state(), modulus / g, next, mode, out);
  }
}

}  // namespace

SplitRankResult dynamic_rank(const Matrix& m, Int modulus, SplitMode mode) {
  if (modulus < 2) throw std::invalid_argument("modulus must be at least 2");
  SplitRankResult out;
  dynamic_rank_rec(m, m, modulus, Resume{}, mode, out);
  return out;
}

std::string SplitRankResult::str() const {
  std::ostringstream os;
  for (const auto& [r, m] : parts) os << r << " " << m << "\n";
  return os.str();
}

int prime_field_rank_oracle(const Matrix& m_in, Int p) {
  if (p < 2) throw Error(Errc::NotPrime, std::to_string(p));
  for (Int d = 2; d * d <= p; ++d)
    if (p % d == 0) throw Error(Errc::NotPrime, std::to_string(p));
  // plain row echelon over Z/pZ, no column swaps; kept separate from the
  // dynamic-evaluation elimination on purpose
  Matrix a = m_in;
  a.reduce_mod(p);
  const int rows = a.rows(), cols = a.cols();
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot_row = -1;
    for (int i = rank; i < rows; ++i)
      if (a.at(i, col) != 0) {
        pivot_row = i;
        break;
      }
    if (pivot_row < 0) continue;
    a.swap_rows(rank, pivot_row);
    // Fermat inverse: pivot^(p-2) mod p
    Int inv = 1, base = a.at(rank, col), e = p - 2;
    while (e > 0) {
      if (e & 1) inv = mod_reduce(inv * base, p);
      base = mod_reduce(base * base, p);
      e >>= 1;
    }
    for (int i = rank + 1; i < rows; ++i) {
      Int factor = mod_reduce(a.at(i, col) * inv, p);
      for (int j = col; j < cols; ++j)
        a.at(i, j) = mod_reduce(a.at(i, j) - factor * a.at(rank, j), p);
    }
    ++rank;
  }
  return rank;
}

Matrix read_matrix(std::istream& in) {
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw Error(Errc::SyntaxError, "matrix file must start with 'rows cols'");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!(in >> m.at(i, j)))
        throw Error(Errc::SyntaxError, "matrix file ended early");
  return m;
}

}  // namespace dynev
}  // namespace exdec
