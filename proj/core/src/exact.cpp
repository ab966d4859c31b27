#include "pmv/exact.hpp"

#include <algorithm>
#include <sstream>

namespace pmv {

Rational rat(long num, long den) {
  if (den == 0) throw PmvError("rat: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational parse_rational(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw PmvError("parse_rational: empty string");
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      std::string num = s.substr(0, slash), den = s.substr(slash + 1);
      if (num.empty() || den.empty())
        throw PmvError("parse_rational: malformed '" + text + "'");
      Rational r(num + "/" + den);
      if (r.get_den() == 0)
        throw PmvError("parse_rational: zero denominator in '" + text + "'");
      r.canonicalize();
      return r;
    }
    auto dotpos = s.find('.');
    if (dotpos != std::string::npos) {
      std::string head = s.substr(0, dotpos), tail = s.substr(dotpos + 1);
      if (tail.find_first_not_of("0123456789") != std::string::npos)
        throw PmvError("parse_rational: malformed decimal '" + text + "'");
      bool neg = !head.empty() && head[0] == '-';
      if (!head.empty() && (head[0] == '+' || head[0] == '-'))
        head = head.substr(1);
      if (head.empty()) head = "0";
      mpz_class ipart(head.empty() ? "0" : head);
      mpz_class frac = tail.empty() ? mpz_class(0) : mpz_class(tail);
      mpz_class den = 1;
      for (std::size_t i = 0; i < tail.size(); ++i) den *= 10;
      Rational r = Rational(ipart) + Rational(frac) / Rational(den);
      if (neg) r = -r;
      r.canonicalize();
      return r;
    }
    Rational r{mpz_class(s)};
    return r;
  } catch (const std::invalid_argument&) {
    throw PmvError("parse_rational: malformed '" + text + "'");
  }
}

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.get_num();
  if (r.get_den() != 1) os << "/" << r.get_den();
  return os.str();
}

Rational floor_rat(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  return Rational(q);
}

bool is_integer(const Rational& r) { return r.get_den() == 1; }

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

Vec Matrix::row(std::size_t i) const {
  Vec r(cols_);
  for (std::size_t j = 0; j < cols_; ++j) r[j] = at(i, j);
  return r;
}

void Matrix::append_row(const Vec& r) {
  if (rows_ == 0 && cols_ == 0) cols_ = r.size();
  if (r.size() != cols_)
    throw PmvError("Matrix::append_row: ragged row (got " +
                   std::to_string(r.size()) + ", want " +
                   std::to_string(cols_) + ")");
  a_.insert(a_.end(), r.begin(), r.end());
  ++rows_;
}

Rational dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw PmvError("dot: size mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw PmvError("add: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw PmvError("sub: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scale(const Vec& a, const Rational& c) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

Vec zeros(std::size_t n) { return Vec(n, Rational(0)); }

Vec mat_vec(const Matrix& m, const Vec& x) {
  if (x.size() != m.cols()) throw PmvError("mat_vec: size mismatch");
  Vec r(m.rows(), Rational(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m.at(i, j) * x[j];
  return r;
}

Vec vec_mat(const Vec& x, const Matrix& m) {
  if (x.size() != m.rows()) throw PmvError("vec_mat: size mismatch");
  Vec r(m.cols(), Rational(0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] += x[i] * m.at(i, j);
  }
  return r;
}

std::size_t rank(const Matrix& m) {
  const std::size_t nr = m.rows(), nc = m.cols();
  if (nr == 0 || nc == 0) return 0;
  // Clear denominators row by row; scaling rows preserves rank.
  std::vector<std::vector<mpz_class>> z(nr, std::vector<mpz_class>(nc));
  for (std::size_t i = 0; i < nr; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < nc; ++j)
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.at(i, j).get_den().get_mpz_t());
    for (std::size_t j = 0; j < nc; ++j) {
      const Rational& v = m.at(i, j);
      z[i][j] = v.get_num() * (l / v.get_den());
    }
  }
  // Bareiss fraction-free elimination with column pivot search.
  mpz_class prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < nc && r < nr; ++c) {
    std::size_t piv = r;
    while (piv < nr && z[piv][c] == 0) ++piv;
    if (piv == nr) continue;
    std::swap(z[piv], z[r]);
    for (std::size_t i = r + 1; i < nr; ++i) {
      for (std::size_t j = c + 1; j < nc; ++j) {
        mpz_class t = z[i][j] * z[r][c] - z[i][c] * z[r][j];
        mpz_divexact(z[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      z[i][c] = 0;
    }
    prev = z[r][c];
    ++r;
  }
  return r;
}

namespace {

// Reduced row echelon form of [A | b] (b optional). Returns pivot column
// per pivot row. Operates in place on `rows`.
std::vector<std::size_t> rref(std::vector<Vec>& rows, std::size_t width) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < width && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[r]);
    Rational inv = 1 / rows[r][c];
    for (auto& v : rows[r]) v *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        rows[i][j] -= f * rows[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

LinearSolution solve_linear(const Matrix& a, const Vec& b) {
  if (b.size() != a.rows()) throw PmvError("solve_linear: rhs size mismatch");
  const std::size_t n = a.cols();
  std::vector<Vec> rows(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    rows[i] = a.row(i);
    rows[i].push_back(b[i]);
  }
  auto pivots = rref(rows, n);
  // Inconsistent iff a zero row has nonzero rhs.
  for (std::size_t i = pivots.size(); i < rows.size(); ++i)
    if (rows[i][n] != 0) return {LinearSolution::Kind::Inconsistent, {}, {}};

  LinearSolution out;
  out.particular = zeros(n);
  std::vector<bool> is_pivot(n, false);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    is_pivot[pivots[i]] = true;
    out.particular[pivots[i]] = rows[i][n];
  }
  if (pivots.size() == n) {
    out.kind = LinearSolution::Kind::Unique;
    return out;
  }
  out.kind = LinearSolution::Kind::Underdetermined;
  for (std::size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    Vec v = zeros(n);
    v[c] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -rows[i][c];
    out.nullspace.push_back(std::move(v));
  }
  return out;
}

std::vector<Vec> orthogonal_complement(const std::vector<Vec>& vs,
                                       std::size_t q) {
  for (const auto& v : vs)
    if (v.size() != q) throw PmvError("orthogonal_complement: size mismatch");
  if (vs.empty()) {
    std::vector<Vec> basis;
    for (std::size_t i = 0; i < q; ++i) {
      Vec e = zeros(q);
      e[i] = 1;
      basis.push_back(std::move(e));
    }
    return basis;
  }
  LinearSolution s =
      solve_linear(Matrix::from_rows(vs), zeros(vs.size()));
  if (s.kind == LinearSolution::Kind::Unique) return {};
  return s.nullspace;
}

}  // namespace pmv
