#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/IterativeLinearSolvers>

#include <memory>
#include <mutex>
#include <span>

#include "gglab/lattice.hpp"

namespace gglab {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kDirectSolveLimit = 5000;

// Conductance-weighted Dirichlet Laplacian over the free sites of `dom`:
// A_yy = sum of kappa over edges at y, A_xy = -kappa_xy for free x ~ y.
// Each undirected edge enters once. kappa is indexed by box edge.
SparseMatrix assemble_precision(const Domain& dom, std::span<const double> kappa);

// b(y) = sum over frozen x ~ y of kappa_xy * psi(x); psi indexed by box site.
Vector boundary_flux(const Domain& dom, std::span<const double> kappa, std::span<const double> psi);

class SpdSolver {
 public:
  enum class Method { Auto, Direct, Iterative };

  explicit SpdSolver(SparseMatrix a, Method m = Method::Auto, double tol = 1e-10);

  Vector solve(const Vector& b) const;
  // N(0, A^{-1}) draw from a standard normal vector; factorizes on demand
  Vector correlate(const Vector& z) const;

  bool is_direct() const { return direct_; }
  std::size_t size() const { return static_cast<std::size_t>(a_.rows()); }
  const SparseMatrix& matrix() const { return a_; }
  int last_iterations() const { return last_iterations_; }

 private:
  void factorize() const;

  SparseMatrix a_;
  bool direct_;
  double tol_;
  mutable std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> llt_;
  mutable std::unique_ptr<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper>> cg_;
  mutable std::mutex mu_;
  mutable int last_iterations_ = 0;
};

}  // namespace gglab
