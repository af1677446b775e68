#pragma once

// Finite-dimensional constructions: dense symmetric eigensolver, orthogonal
// realization of a majorized diagonal, T-transform chains, Birkhoff
// decomposition of doubly stochastic matrices, pinching, and the contraction
// carrying one nonnegative vector onto an eps-neighborhood of another.

#include <vector>

#include "opmaj/majorize.hpp"
#include "opmaj/rational.hpp"

namespace opmaj {

using Mat = std::vector<std::vector<double>>;
using RatMat = std::vector<std::vector<Rat>>;

Mat mat_id(std::size_t n);
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_transpose(const Mat& a);
std::vector<double> mat_vec(const Mat& a, const std::vector<double>& v);
std::vector<double> mat_diag(const Mat& a);
// U diag(d) U^T.
Mat sym_conj(const Mat& u, const std::vector<double>& d);

// Cyclic Jacobi sweeps. Eigenvalues descending; columns of V are the
// matching eigenvectors, A = V diag(eigvals) V^T. Input must be symmetric.
struct EigOut {
  std::vector<double> eigvals;
  Mat V;
};
EigOut jacobi_eig(const Mat& A);

// Floating-point majorization with additive slack on every prefix and on the
// total.
bool vec_majorizes_f(const std::vector<double>& x, const std::vector<double>& y,
                     double tol);

// diag(A) majorized by the spectrum of A.
bool schur_check(const Mat& A, double tol = 1e-8);

// Sum of the k largest eigenvalues.
double kyfan_U(const Mat& A, long long k);

// Zeroes every entry whose row and column indices fall in different blocks.
// blocks must partition 0..n-1.
Mat pinch(const Mat& A, const std::vector<std::vector<int>>& blocks);

// One two-dimensional rotation: rows pi and pj were mixed with parameter t,
// cos^2 of the angle, kept exact. Row pi froze at its target value.
struct RotStep {
  int pi = 0, pj = 0;
  Rat t;
};

// Orthogonal U with (U diag(y) U^T)_ii = x_i, built by straddle-and-rotate
// on the exactly majorized pair x of y (caller order on both sides).
struct HornOut {
  Mat U;
  std::vector<RotStep> rots;
};
HornOut horn_construct(const std::vector<Rat>& x, const std::vector<Rat>& y);

// Doubly stochastic D with D y = x, exact, built from at most n-1 averaging
// steps on adjacent straddles.
RatMat ttransform_chain(const std::vector<Rat>& x, const std::vector<Rat>& y);

bool is_doubly_stochastic(const RatMat& D);
bool is_doubly_stochastic_f(const Mat& D, double tol);

// Convex combination of permutation matrices recovering D exactly; at most
// (n-1)^2 + 1 terms after affine reduction. perm[i] is the column selected
// in row i.
struct BirkTerm {
  Rat coeff;
  std::vector<int> perm;
};
std::vector<BirkTerm> birkhoff_decompose(const RatMat& D);

struct BirkTermF {
  double coeff;
  std::vector<int> perm;
};
std::vector<BirkTermF> birkhoff_decompose_f(const Mat& D, double tol = 1e-9);

// Largest singular value via the symmetric eigenproblem on C^T C.
double sigma_max(const Mat& C);

// Contraction C (rows: entries of f, columns: entries of g) moving g onto f
// within eps: realized_i = sum_j C_ij^2 g_j lies in [f_i, f_i + eps].
// Requires nonnegative entries and weak majorization of f by g (zero-padded).
struct ContractOut {
  Mat C;
  std::vector<double> realized;
  HornOut horn;
  TruncOut pad;
  std::vector<long long> fslots, gslots;  // caller index -> padded slot
};
ContractOut contractive_construct(const std::vector<Rat>& f,
                                  const std::vector<Rat>& g, const Rat& eps);

}  // namespace opmaj
