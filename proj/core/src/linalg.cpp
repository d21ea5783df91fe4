#include "gglab/linalg.hpp"

#include "gglab/error.hpp"

namespace gglab {

SparseMatrix assemble_precision(const Domain& dom, std::span<const double> kappa) {
  const LatticeBox& box = dom.box();
  if (kappa.size() != box.edges().size()) throw DomainError("conductance vector does not match the box edges");
  const auto n = static_cast<Eigen::Index>(dom.free_count());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(2 * box.dim() + 1));
  for (std::size_t e = 0; e < box.edges().size(); ++e) {
    const Edge& ed = box.edges()[e];
    const int a = dom.free_index(ed.lo), b = dom.free_index(ed.hi);
    const double k = kappa[e];
    if (a >= 0) trip.emplace_back(a, a, k);
    if (b >= 0) trip.emplace_back(b, b, k);
    if (a >= 0 && b >= 0) {
      trip.emplace_back(a, b, -k);
      trip.emplace_back(b, a, -k);
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

Vector boundary_flux(const Domain& dom, std::span<const double> kappa, std::span<const double> psi) {
  const LatticeBox& box = dom.box();
  Vector b = Vector::Zero(static_cast<Eigen::Index>(dom.free_count()));
  for (std::size_t e = 0; e < box.edges().size(); ++e) {
    const Edge& ed = box.edges()[e];
    const int a = dom.free_index(ed.lo), c = dom.free_index(ed.hi);
    if (a >= 0 && c < 0) b[a] += kappa[e] * psi[ed.hi];
    if (c >= 0 && a < 0) b[c] += kappa[e] * psi[ed.lo];
  }
  return b;
}

SpdSolver::SpdSolver(SparseMatrix a, Method m, double tol) : a_(std::move(a)), tol_(tol) {
  direct_ = m == Method::Direct || (m == Method::Auto && static_cast<std::size_t>(a_.rows()) <= kDirectSolveLimit);
  if (direct_) {
    factorize();
  } else {
    cg_ = std::make_unique<Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper>>();
    cg_->setTolerance(tol_);
    cg_->setMaxIterations(static_cast<Eigen::Index>(std::max<Eigen::Index>(1000, 4 * a_.rows())));
    cg_->compute(a_);
  }
}

void SpdSolver::factorize() const {
  if (llt_) return;
  llt_ = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>();
  llt_->compute(a_);
  if (llt_->info() != Eigen::Success) throw NumericalError("precision matrix is not positive definite");
}

Vector SpdSolver::solve(const Vector& b) const {
  if (direct_) {
    Vector x = llt_->solve(b);
    return x;
  }
  // Eigen's iterative solvers keep iteration stats in the object
  std::lock_guard<std::mutex> lock(mu_);
  Vector x = cg_->solve(b);
  if (cg_->info() != Eigen::Success) throw NumericalError("conjugate gradient did not converge");
  last_iterations_ = static_cast<int>(cg_->iterations());
  return x;
}

Vector SpdSolver::correlate(const Vector& z) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    factorize();
  }
  Vector y = llt_->matrixU().solve(z);
  return llt_->permutationPinv() * y;
}

}  // namespace gglab
