#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace obstacle
{

using Vector = Eigen::VectorXd;

struct Triplet
{
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix with sorted, unique column indices.
class CsrMatrix
{
public:
  CsrMatrix() = default;
  CsrMatrix(int rows, int cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

  /// Duplicates are summed; explicit zeros are kept.
  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries);
  static CsrMatrix identity(int n);
  static CsrMatrix from_dense(const Eigen::MatrixXd& a);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& offsets() const { return offsets_; }
  const std::vector<int>& indices() const { return indices_; }
  const std::vector<double>& values() const { return values_; }

  bool symmetric() const { return symmetric_; }
  void set_symmetric(bool s) { symmetric_ = s; }

  double at(int i, int j) const;
  Vector multiply(const Vector& x) const;
  Vector multiply_transpose(const Vector& x) const;
  CsrMatrix transpose() const;
  /// Rows listed in `keep`, in that order.
  CsrMatrix select_rows(const std::vector<int>& keep) const;
  /// max |a_ij - a_ji|.
  double max_asymmetry() const;
  Eigen::MatrixXd to_dense() const;
  Eigen::SparseMatrix<double> to_eigen() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> offsets_{0};
  std::vector<int> indices_;
  std::vector<double> values_;
  bool symmetric_ = false;
};

struct SolveReport
{
  std::string method; // "direct" or "cg"
  int iterations = 0;
  double residual = 0.0; // relative residual
  bool success = false;
  std::string message;
};

struct SpdOptions
{
  double tol = 1e-12;
  int direct_limit = 200000;
  int max_iterations = 0; // 0 means 10 n
};

/// Solve A x = b for symmetric positive definite A.
Vector solve_spd(const CsrMatrix& a, const Vector& b, SolveReport& report,
                 const SpdOptions& opts = {});

/// Raised when the constraint block of a saddle-point system is rank
/// deficient.
class SingularSystemError : public std::runtime_error
{
public:
  SingularSystemError(const std::string& what, std::vector<int> rows)
      : std::runtime_error(what), rows_(std::move(rows))
  {
  }
  const std::vector<int>& rows() const { return rows_; }

private:
  std::vector<int> rows_;
};

struct KktSolution
{
  Vector u;
  Vector lam;
  SolveReport report;
};

/// Solve [A B^T; B 0] (u, lam) = (f, g) with A SPD and B of full row rank.
KktSolution solve_kkt(const CsrMatrix& a, const CsrMatrix& b, const Vector& f,
                      const Vector& g, double tol = 1e-12);

/// Rows of B that are linearly dependent on earlier rows.
std::vector<int> dependent_rows(const CsrMatrix& b);

void write_matrix_market(const CsrMatrix& a, std::ostream& os);

} // namespace obstacle
