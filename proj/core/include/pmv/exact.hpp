#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmv {

/// Exact rational number. GMP keeps values canonical (lowest terms,
/// positive denominator) as long as inputs are canonical; the helpers
/// below canonicalize anything built from raw strings.
using Rational = mpq_class;

/// Dense vector of rationals.
using Vec = std::vector<Rational>;

/// Thrown on contract violations anywhere in the library.
struct PmvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Builds num/den in canonical form. den must be nonzero.
Rational rat(long num, long den = 1);

/// Parses "p", "p/q", or a plain decimal like "-0.125" into an exact
/// rational. Throws PmvError on malformed input or zero denominator.
Rational parse_rational(const std::string& text);

/// Renders canonical "p" or "p/q".
std::string to_string(const Rational& r);

/// floor(r) as a rational integer.
Rational floor_rat(const Rational& r);

/// true iff r is an integer.
bool is_integer(const Rational& r);

/// Dense row-major matrix of rationals with a fixed shape.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, Rational(0)) {}

  static Matrix from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rational& at(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  Vec row(std::size_t i) const;

  /// Appends one row; fixes the column count on the first append.
  void append_row(const Vec& r);

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> a_;
};

Rational dot(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, const Rational& c);
Vec zeros(std::size_t n);

/// A * x  (x has size cols).
Vec mat_vec(const Matrix& m, const Vec& x);

/// xᵀ * A  (x has size rows; result has size cols).
Vec vec_mat(const Vec& x, const Matrix& m);

/// Exact rank via fraction-free (Bareiss) elimination on the
/// denominator-cleared integer matrix.
std::size_t rank(const Matrix& m);

/// Outcome of solving A x = b exactly.
struct LinearSolution {
  enum class Kind { Unique, Inconsistent, Underdetermined };
  Kind kind = Kind::Inconsistent;
  /// Valid for Unique and Underdetermined: one solution.
  Vec particular;
  /// Valid for Underdetermined: basis of the homogeneous solution space.
  std::vector<Vec> nullspace;
};

LinearSolution solve_linear(const Matrix& a, const Vec& b);

/// Basis of { w : v · w = 0 for every v in vs }, each vector of size q.
/// Empty vs yields the standard basis.
std::vector<Vec> orthogonal_complement(const std::vector<Vec>& vs,
                                       std::size_t q);

}  // namespace pmv
