#include "obstacle/sparse.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace obstacle
{

//-----------------------------------------------------------------------------
CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> entries)
{
  for (const auto& e : entries)
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw std::out_of_range("CsrMatrix: triplet index out of range");
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  CsrMatrix m(rows, cols);
  m.indices_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size();)
  {
    const int r = entries[k].row, c = entries[k].col;
    double v = 0.0;
    while (k < entries.size() && entries[k].row == r && entries[k].col == c)
      v += entries[k++].value;
    m.indices_.push_back(c);
    m.values_.push_back(v);
    ++m.offsets_[r + 1];
  }
  for (int r = 0; r < rows; ++r)
    m.offsets_[r + 1] += m.offsets_[r];
  return m;
}
//-----------------------------------------------------------------------------
CsrMatrix CsrMatrix::identity(int n)
{
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i)
    t.push_back({i, i, 1.0});
  CsrMatrix m = from_triplets(n, n, std::move(t));
  m.set_symmetric(true);
  return m;
}
//-----------------------------------------------------------------------------
CsrMatrix CsrMatrix::from_dense(const Eigen::MatrixXd& a)
{
  std::vector<Triplet> t;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0)
        t.push_back({i, j, a(i, j)});
  return from_triplets(static_cast<int>(a.rows()), static_cast<int>(a.cols()),
                       std::move(t));
}
//-----------------------------------------------------------------------------
double CsrMatrix::at(int i, int j) const
{
  auto b = indices_.begin() + offsets_[i], e = indices_.begin() + offsets_[i + 1];
  auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? values_[it - indices_.begin()] : 0.0;
}
//-----------------------------------------------------------------------------
Vector CsrMatrix::multiply(const Vector& x) const
{
  if (x.size() != cols_)
    throw std::invalid_argument("CsrMatrix::multiply: size mismatch");
  Vector y = Vector::Zero(rows_);
  for (int i = 0; i < rows_; ++i)
  {
    double s = 0.0;
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      s += values_[k] * x[indices_[k]];
    y[i] = s;
  }
  return y;
}
//-----------------------------------------------------------------------------
Vector CsrMatrix::multiply_transpose(const Vector& x) const
{
  if (x.size() != rows_)
    throw std::invalid_argument("CsrMatrix::multiply_transpose: size mismatch");
  Vector y = Vector::Zero(cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      y[indices_[k]] += values_[k] * x[i];
  return y;
}
//-----------------------------------------------------------------------------
CsrMatrix CsrMatrix::transpose() const
{
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      t.push_back({indices_[k], i, values_[k]});
  CsrMatrix m = from_triplets(cols_, rows_, std::move(t));
  m.set_symmetric(symmetric_);
  return m;
}
//-----------------------------------------------------------------------------
CsrMatrix CsrMatrix::select_rows(const std::vector<int>& keep) const
{
  CsrMatrix m(static_cast<int>(keep.size()), cols_);
  for (std::size_t r = 0; r < keep.size(); ++r)
  {
    const int i = keep[r];
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
    {
      m.indices_.push_back(indices_[k]);
      m.values_.push_back(values_[k]);
    }
    m.offsets_[r + 1] = static_cast<int>(m.indices_.size());
  }
  return m;
}
//-----------------------------------------------------------------------------
double CsrMatrix::max_asymmetry() const
{
  if (rows_ != cols_)
    throw std::invalid_argument("max_asymmetry: matrix not square");
  double m = 0.0;
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      m = std::max(m, std::abs(values_[k] - at(indices_[k], i)));
  return m;
}
//-----------------------------------------------------------------------------
Eigen::MatrixXd CsrMatrix::to_dense() const
{
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
      a(i, indices_[k]) = values_[k];
  return a;
}
//-----------------------------------------------------------------------------
Eigen::SparseMatrix<double> CsrMatrix::to_eigen() const
{
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor>> map(
      rows_, cols_, nnz(), offsets_.data(), indices_.data(), values_.data());
  return Eigen::SparseMatrix<double>(map);
}

namespace
{
double relative_residual(const CsrMatrix& a, const Vector& x, const Vector& b)
{
  const double nb = b.norm();
  const double nr = (a.multiply(x) - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}
} // namespace

//-----------------------------------------------------------------------------
Vector solve_spd(const CsrMatrix& a, const Vector& b, SolveReport& report,
                 const SpdOptions& opts)
{
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("solve_spd: size mismatch");
  report = SolveReport{};
  const int n = a.rows();
  if (n == 0)
  {
    report.method = "direct";
    report.success = true;
    return Vector();
  }

  const Eigen::SparseMatrix<double> m = a.to_eigen();
  Vector x;
  if (n <= opts.direct_limit)
  {
    report.method = "direct";
    Eigen::CholmodDecomposition<Eigen::SparseMatrix<double>, Eigen::Lower> chol;
    chol.setMode(Eigen::CholmodSupernodalLLt);
    chol.compute(m);
    if (chol.info() != Eigen::Success)
    {
      report.message = "Cholesky factorization failed (matrix not positive definite)";
      return Vector::Zero(n);
    }
    x = chol.solve(b);
    report.iterations = 1;
    report.residual = relative_residual(a, x, b);
    // One step of iterative refinement keeps the residual at round-off level.
    if (report.residual > opts.tol)
    {
      const Vector res = b - a.multiply(x);
      x += chol.solve(res);
      report.iterations = 2;
      report.residual = relative_residual(a, x, b);
    }
  }
  else
  {
    report.method = "cg";
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(opts.tol);
    cg.setMaxIterations(opts.max_iterations > 0 ? opts.max_iterations : 10 * n);
    cg.compute(m);
    x = cg.solve(b);
    report.iterations = static_cast<int>(cg.iterations());
    report.residual = relative_residual(a, x, b);
  }
  // Round-off floor for badly scaled systems.
  const double floor = 1e3 * std::numeric_limits<double>::epsilon();
  report.success = x.allFinite() && report.residual <= std::max(opts.tol, floor);
  if (!report.success && report.message.empty())
  {
    std::ostringstream os;
    os << "residual " << report.residual << " above tolerance " << opts.tol;
    report.message = os.str();
  }
  return x;
}
//-----------------------------------------------------------------------------
std::vector<int> dependent_rows(const CsrMatrix& b)
{
  std::vector<int> bad;
  const int m = b.rows();
  // Structural scan: empty rows and exact duplicates.
  std::map<std::vector<std::pair<int, double>>, int> seen;
  for (int i = 0; i < m; ++i)
  {
    std::vector<std::pair<int, double>> row;
    for (int k = b.offsets()[i]; k < b.offsets()[i + 1]; ++k)
      if (b.values()[k] != 0.0)
        row.emplace_back(b.indices()[k], b.values()[k]);
    if (row.empty() || !seen.emplace(row, i).second)
      bad.push_back(i);
  }
  if (!bad.empty() || m > 1500)
    return bad;

  // Numerical scan: column-pivoted QR of the Gram matrix B B^T.
  const Eigen::SparseMatrix<double> s = b.to_eigen();
  const Eigen::MatrixXd gram = Eigen::MatrixXd(s * s.transpose());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  qr.setThreshold(1e-10);
  const auto perm = qr.colsPermutation().indices();
  for (int k = static_cast<int>(qr.rank()); k < m; ++k)
    bad.push_back(perm[k]);
  std::sort(bad.begin(), bad.end());
  return bad;
}
//-----------------------------------------------------------------------------
KktSolution solve_kkt(const CsrMatrix& a, const CsrMatrix& b, const Vector& f,
                      const Vector& g, double tol)
{
  const int n = a.rows(), m = b.rows();
  if (a.cols() != n || b.cols() != n || f.size() != n || g.size() != m)
    throw std::invalid_argument("solve_kkt: size mismatch");

  KktSolution sol;
  if (m == 0)
  {
    sol.u = solve_spd(a, f, sol.report, SpdOptions{tol});
    sol.lam = Vector();
    return sol;
  }

  std::vector<Triplet> t;
  t.reserve(a.nnz() + 2 * b.nnz());
  for (int i = 0; i < n; ++i)
    for (int k = a.offsets()[i]; k < a.offsets()[i + 1]; ++k)
      t.push_back({i, a.indices()[k], a.values()[k]});
  for (int i = 0; i < m; ++i)
    for (int k = b.offsets()[i]; k < b.offsets()[i + 1]; ++k)
    {
      t.push_back({n + i, b.indices()[k], b.values()[k]});
      t.push_back({b.indices()[k], n + i, b.values()[k]});
    }
  const CsrMatrix kkt = CsrMatrix::from_triplets(n + m, n + m, std::move(t));
  Vector rhs(n + m);
  rhs << f, g;

  sol.report.method = "direct";
  const Eigen::SparseMatrix<double> k = kkt.to_eigen();
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(k);
  Vector x;
  bool ok = lu.info() == Eigen::Success;
  if (ok)
  {
    x = lu.solve(rhs);
    ok = lu.info() == Eigen::Success && x.allFinite();
  }
  if (ok)
  {
    sol.report.iterations = 1;
    sol.report.residual = relative_residual(kkt, x, rhs);
    if (sol.report.residual > tol)
    {
      const Vector res = rhs - kkt.multiply(x);
      x += lu.solve(res);
      sol.report.iterations = 2;
      sol.report.residual = relative_residual(kkt, x, rhs);
    }
    // LU on a singular system can still return finite garbage.
    ok = sol.report.residual <= std::max(tol, 1e-9);
  }
  if (!ok)
  {
    const std::vector<int> rows = dependent_rows(b);
    std::ostringstream os;
    os << "solve_kkt: singular saddle-point system";
    if (!rows.empty())
    {
      os << "; dependent constraint rows:";
      for (std::size_t i = 0; i < rows.size() && i < 20; ++i)
        os << ' ' << rows[i];
      if (rows.size() > 20)
        os << " ...";
    }
    throw SingularSystemError(os.str(), rows);
  }
  sol.u = x.head(n);
  sol.lam = x.tail(m);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon();
  sol.report.success = sol.report.residual <= std::max(tol, floor);
  if (!sol.report.success)
  {
    std::ostringstream os;
    os << "residual " << sol.report.residual << " above tolerance " << tol;
    sol.report.message = os.str();
  }
  return sol;
}
//-----------------------------------------------------------------------------
void write_matrix_market(const CsrMatrix& a, std::ostream& os)
{
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  os << std::setprecision(17);
  for (int i = 0; i < a.rows(); ++i)
    for (int k = a.offsets()[i]; k < a.offsets()[i + 1]; ++k)
      os << i + 1 << ' ' << a.indices()[k] + 1 << ' ' << a.values()[k] << '\n';
}

} // namespace obstacle
