#include "obstacle/assembly.hpp"
#include "obstacle/sparse.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <Eigen/Dense>

#include <random>
#include <sstream>

using namespace obstacle;

namespace
{

void check_csr_invariants(const CsrMatrix& a)
{
  REQUIRE(a.offsets().size() == static_cast<std::size_t>(a.rows() + 1));
  CHECK(a.offsets().front() == 0);
  CHECK(a.offsets().back() == a.nnz());
  for (int i = 0; i < a.rows(); ++i)
  {
    CHECK(a.offsets()[i] <= a.offsets()[i + 1]);
    for (int k = a.offsets()[i] + 1; k < a.offsets()[i + 1]; ++k)
      CHECK(a.indices()[k - 1] < a.indices()[k]);
  }
}

Eigen::MatrixXd random_spd(int n, std::mt19937& rng)
{
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = d(rng);
  return m * m.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_eigen(int n, std::mt19937& rng)
{
  const auto v = testing::random_vector(n, rng);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

// Dense saddle-point oracle.
std::pair<Eigen::VectorXd, Eigen::VectorXd> dense_kkt(const Eigen::MatrixXd& a,
                                                      const Eigen::MatrixXd& b,
                                                      const Eigen::VectorXd& f,
                                                      const Eigen::VectorXd& g)
{
  const auto n = a.rows(), m = b.rows();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = a;
  k.topRightCorner(n, m) = b.transpose();
  k.bottomLeftCorner(m, n) = b;
  Eigen::VectorXd r(n + m);
  r << f, g;
  const Eigen::VectorXd x = k.fullPivLu().solve(r);
  return {x.head(n), x.tail(m)};
}

} // namespace

TEST_CASE("CSR construction sums duplicates and sorts columns")
{
  const CsrMatrix a =
      CsrMatrix::from_triplets(3, 4, {{2, 3, 1.0}, {0, 2, 2.0}, {0, 0, 1.0}, {0, 2, 3.0},
                                      {1, 1, 0.0}, {2, 0, -4.0}});
  check_csr_invariants(a);
  CHECK(a.nnz() == 5);
  CHECK(a.at(0, 2) == 5.0);
  CHECK(a.at(0, 0) == 1.0);
  CHECK(a.at(1, 1) == 0.0);
  CHECK(a.at(2, 0) == -4.0);
  CHECK(a.at(1, 3) == 0.0);
  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
  CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{0, -1, 1.0}}), std::out_of_range);
}

TEST_CASE("CSR products, transpose and row selection agree with dense algebra")
{
  std::mt19937 rng(1);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(7, 5);
  std::uniform_int_distribution<int> row(0, 6), col(0, 4);
  for (int k = 0; k < 15; ++k)
    d(row(rng), col(rng)) = testing::random_vector(1, rng)[0];
  const CsrMatrix a = CsrMatrix::from_dense(d);
  check_csr_invariants(a);
  CHECK((a.to_dense() - d).norm() == 0.0);
  CHECK((Eigen::MatrixXd(a.to_eigen()) - d).norm() == 0.0);

  const Eigen::VectorXd x = random_eigen(5, rng), y = random_eigen(7, rng);
  CHECK((a.multiply(x) - d * x).norm() < 1e-14);
  CHECK((a.multiply_transpose(y) - d.transpose() * y).norm() < 1e-14);
  CHECK((a.transpose().to_dense() - d.transpose()).norm() == 0.0);
  CHECK_THROWS(a.multiply(y));
  CHECK_THROWS(a.multiply_transpose(x));

  const CsrMatrix r = a.select_rows({4, 0, 4});
  check_csr_invariants(r);
  CHECK(r.rows() == 3);
  CHECK((r.to_dense().row(0) - d.row(4)).norm() == 0.0);
  CHECK((r.to_dense().row(1) - d.row(0)).norm() == 0.0);
  CHECK((r.to_dense().row(2) - d.row(4)).norm() == 0.0);

  const Eigen::MatrixXd s = random_spd(6, rng);
  CHECK(CsrMatrix::from_dense(s).max_asymmetry() < 1e-15);
  Eigen::MatrixXd u = s;
  u(1, 4) += 0.25;
  CHECK(CsrMatrix::from_dense(u).max_asymmetry() == doctest::Approx(0.25));
  CHECK_THROWS(a.max_asymmetry());
}

TEST_CASE("SPD solve: trivial examples")
{
  SolveReport rep;
  std::mt19937 rng(2);
  const Eigen::VectorXd b = random_eigen(9, rng);
  const Vector x = solve_spd(CsrMatrix::identity(9), b, rep);
  CHECK(rep.success);
  CHECK(rep.method == "direct");
  CHECK((x - b).norm() < 1e-15);

  const CsrMatrix t = CsrMatrix::from_dense((Eigen::MatrixXd(2, 2) << 2, -1, -1, 2).finished());
  const Vector y = solve_spd(t, Eigen::Vector2d(1.0, 1.0), rep);
  CHECK(rep.success);
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.0));

  const Vector e = solve_spd(CsrMatrix(0, 0), Vector(), rep);
  CHECK(rep.success);
  CHECK(e.size() == 0);
  CHECK_THROWS(solve_spd(t, Vector::Ones(3), rep));
}

TEST_CASE("SPD solve on the CR stiffness matches a dense oracle")
{
  const Mesh m = testing::unit_square(2);
  REQUIRE(m.num_elements() == 8);
  ProblemData data;
  data.f = [](const Vec2&) { return 1.0; };
  data.chi = [](const Vec2&) { return -1.0; };
  const DiscreteProblem p = assemble(m, data);
  const Eigen::MatrixXd dense = p.stiffness.to_dense();
  const Eigen::VectorXd oracle = dense.lu().solve(p.rhs);

  for (int limit : {200000, 0})
  {
    SolveReport rep;
    const Vector x = solve_spd(p.stiffness, p.rhs, rep, SpdOptions{1e-12, limit, 0});
    CHECK(rep.success);
    CHECK(rep.method == (limit > 0 ? "direct" : "cg"));
    CHECK(rep.residual <= 1e-12);
    CHECK((x - oracle).norm() <= 1e-10 * oracle.norm());
  }
}

TEST_CASE("SPD solve reports failure instead of returning silently")
{
  const CsrMatrix singular =
      CsrMatrix::from_dense((Eigen::MatrixXd(2, 2) << 1, 1, 1, 1).finished());
  SolveReport rep;
  solve_spd(singular, Eigen::Vector2d(1.0, -1.0), rep);
  CHECK_FALSE(rep.success);
  CHECK_FALSE(rep.message.empty());

  const CsrMatrix indefinite =
      CsrMatrix::from_dense((Eigen::MatrixXd(2, 2) << 1, 0, 0, -1).finished());
  solve_spd(indefinite, Eigen::Vector2d(1.0, 1.0), rep);
  CHECK_FALSE(rep.success);

  // CG with too few iterations.
  std::mt19937 rng(3);
  const CsrMatrix a = CsrMatrix::from_dense(random_spd(30, rng));
  solve_spd(a, random_eigen(30, rng), rep, SpdOptions{1e-14, 0, 1});
  CHECK(rep.method == "cg");
  CHECK_FALSE(rep.success);
}

TEST_CASE("Stiffness with a Dirichlet side is positive definite")
{
  for (int n : {1, 2, 4})
  {
    const Mesh m = testing::unit_square(n, [](const Vec2& x) {
      return x.y < 1e-12 ? BoundaryLabel::Dirichlet : BoundaryLabel::Neumann;
    });
    const CsrMatrix s = assemble_stiffness(m, make_dofmap(m));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.to_dense());
    CHECK(eig.eigenvalues().minCoeff() > 1e-8);
  }
}

TEST_CASE("KKT solve: empty active set reduces to the SPD solve")
{
  const Mesh m = testing::unit_square(2);
  ProblemData data;
  data.f = [](const Vec2&) { return -10.0; };
  data.chi = [](const Vec2&) { return 0.0; };
  const DiscreteProblem p = assemble(m, data);
  const CsrMatrix b(0, p.stiffness.rows());
  const KktSolution k = solve_kkt(p.stiffness, b, p.rhs, Vector());
  SolveReport rep;
  const Vector x = solve_spd(p.stiffness, p.rhs, rep);
  CHECK(k.lam.size() == 0);
  CHECK((k.u - x).norm() < 1e-14);
  CHECK(k.report.success);
}

TEST_CASE("KKT solve: single mean constraint on the 8-element mesh")
{
  const Mesh m = testing::unit_square(2);
  ProblemData data;
  data.f = [](const Vec2&) { return -10.0; };
  data.chi = [](const Vec2&) { return 0.0; };
  const DiscreteProblem p = assemble(m, data);
  const int t = 3;
  std::vector<Triplet> rows;
  for (int s : m.element(t).sides)
    if (p.dofs.side_to_dof[s] >= 0)
      rows.push_back({0, p.dofs.side_to_dof[s], 1.0 / 3.0});
  REQUIRE(!rows.empty());
  const CsrMatrix b = CsrMatrix::from_triplets(1, p.dofs.num_dofs(), rows);
  const KktSolution k = solve_kkt(p.stiffness, b, p.rhs, Vector::Constant(1, -0.125));
  CHECK(k.report.success);
  double mean = 0.0;
  for (int s : m.element(t).sides)
    if (p.dofs.side_to_dof[s] >= 0)
      mean += k.u[p.dofs.side_to_dof[s]] / 3.0;
  CHECK(std::abs(mean + 0.125) <= 1e-12);
  CHECK((p.stiffness.multiply(k.u) + b.multiply_transpose(k.lam) - p.rhs).norm()
        <= 1e-12 * p.rhs.norm());
}

TEST_CASE("KKT solve reproduces a dense oracle on random feasible systems")
{
  std::mt19937 rng(4);
  for (int trial = 0; trial < 25; ++trial)
  {
    const int n = 5 + trial % 7, m = 1 + trial % 4;
    const Eigen::MatrixXd a = random_spd(n, rng);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, n);
    std::uniform_int_distribution<int> col(0, n - 1);
    for (int i = 0; i < m; ++i)
    {
      b(i, i) = 1.0 + 0.5 * i; // full row rank
      b(i, col(rng)) += testing::random_vector(1, rng)[0];
    }
    const Eigen::VectorXd f = random_eigen(n, rng), g = random_eigen(m, rng);
    const auto [u, lam] = dense_kkt(a, b, f, g);
    const KktSolution k = solve_kkt(CsrMatrix::from_dense(a), CsrMatrix::from_dense(b), f, g);
    CHECK(k.report.success);
    CHECK((k.u - u).norm() <= 1e-10 * (1.0 + u.norm()));
    CHECK((k.lam - lam).norm() <= 1e-10 * (1.0 + lam.norm()));
  }
}

TEST_CASE("KKT solve: full constraint set on a small mesh")
{
  // Fan of five triangles: the dual graph is an odd cycle, so the five
  // mean constraints on the five spokes are independent.
  std::vector<Vec2> v{{0.0, 0.0}};
  for (int k = 0; k < 5; ++k)
    v.push_back({std::cos(2 * M_PI * k / 5), std::sin(2 * M_PI * k / 5)});
  const Mesh m(v, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1}});
  ProblemData data;
  data.f = [](const Vec2&) { return -10.0; };
  data.chi = [](const Vec2&) { return 0.0; };
  const DiscreteProblem p = assemble(m, data);
  const Eigen::MatrixXd b = p.coupling.to_dense().transpose();
  Eigen::MatrixXd bm = b;
  for (int j = 0; j < bm.rows(); ++j)
    bm.row(j) /= m.element(p.dofs.mult_to_elem[j]).area;
  REQUIRE(p.dofs.num_dofs() == 5);
  REQUIRE(Eigen::FullPivLU<Eigen::MatrixXd>(bm).rank() == bm.rows());
  const Eigen::VectorXd g = Eigen::VectorXd::Zero(bm.rows());
  const auto [u, lam] = dense_kkt(p.stiffness.to_dense(), bm, p.rhs, g);
  const KktSolution k =
      solve_kkt(p.stiffness, CsrMatrix::from_dense(bm), p.rhs, g);
  CHECK((k.u - u).norm() <= 1e-10 * (1.0 + u.norm()));
  CHECK((k.lam - lam).norm() <= 1e-10 * (1.0 + lam.norm()));
  // Square invertible constraint block: u is fixed by the constraints alone.
  CHECK(k.u.norm() <= 1e-12);
}

TEST_CASE("Rank-deficient constraints are reported with their rows")
{
  Eigen::MatrixXd b(3, 4);
  b << 1, 1, 0, 0, //
      0, 1, 1, 0,  //
      1, 2, 1, 0;  // sum of the first two
  auto rows = dependent_rows(CsrMatrix::from_dense(b));
  CHECK(rows.size() == 1);

  Eigen::MatrixXd dup(3, 3);
  dup << 1, 0, 0, 0, 1, 0, 1, 0, 0;
  rows = dependent_rows(CsrMatrix::from_dense(dup));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == 2);

  CHECK(dependent_rows(CsrMatrix::identity(4)).empty());
  CHECK(dependent_rows(CsrMatrix::from_triplets(2, 3, {{0, 1, 1.0}})) == std::vector<int>{1});

  std::mt19937 rng(5);
  const CsrMatrix a = CsrMatrix::from_dense(random_spd(4, rng));
  CHECK_THROWS_AS(solve_kkt(a, CsrMatrix::from_dense(dup), Vector::Ones(4), Vector::Zero(3)),
                  std::invalid_argument);
  Eigen::MatrixXd dup4 = Eigen::MatrixXd::Zero(2, 4);
  dup4(0, 1) = dup4(1, 1) = 1.0;
  try
  {
    solve_kkt(a, CsrMatrix::from_dense(dup4), Vector::Ones(4), Vector::Zero(2));
    FAIL("singular system expected");
  }
  catch (const SingularSystemError& e)
  {
    CHECK(e.rows() == std::vector<int>{1});
    CHECK(std::string(e.what()).find("dependent constraint rows: 1") != std::string::npos);
  }
}

TEST_CASE("Matrix Market export")
{
  const CsrMatrix a = CsrMatrix::from_triplets(2, 3, {{0, 0, 1.5}, {1, 2, -2.0}});
  std::ostringstream os;
  write_matrix_market(a, os);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("%%MatrixMarket matrix coordinate real general", 0) == 0);
  int r = 0, c = 0, nnz = 0;
  in >> r >> c >> nnz;
  CHECK(r == 2);
  CHECK(c == 3);
  CHECK(nnz == 2);
  int i = 0, j = 0;
  double v = 0.0;
  in >> i >> j >> v;
  CHECK(i == 1);
  CHECK(j == 1);
  CHECK(v == 1.5);
}
