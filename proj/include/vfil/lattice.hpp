#ifndef VFIL_LATTICE_HPP
#define VFIL_LATTICE_HPP

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace vfil {

// Symmetry-reduced mode lattice: (j,k,l) with j >= 1, k >= 0, l = +-1,
// together with the single-branch row (0,k,+1).
struct LatticeSite {
  int j = 0;
  int k = 0;
  int l = +1;

  friend bool operator==(const LatticeSite& x, const LatticeSite& y) {
    return x.j == y.j && x.k == y.k && x.l == y.l;
  }
};

bool site_in_lattice(const LatticeSite& x);

// Canonical total order: lexicographic by (j+k, j, k, l), l=+1 first.
bool site_less(const LatticeSite& x, const LatticeSite& y);

// Euclidean distance on the (j,k) plane; the branch label carries no distance.
double site_distance(const LatticeSite& x, const LatticeSite& y);

// All lattice sites with j+k < L in canonical order.
std::vector<LatticeSite> build_lattice(int L);

struct NormParams {
  double sigma = 0.1;     // analytic width
  double s_weight = 2.0;  // polynomial weight exponent, must be > 1
};

// Truncated Fourier series
//   u = sum_k a(0,k) cos ks + sum_{j>=1,k} (a(j,k) cos jt + i b(j,k) sin jt) cos ks
// with real coefficients, all pairs with j+k >= radius identically zero.
// This parametrization encodes u(t,s)=u(t,-s)=conj(u)(-t,s) by construction.
class SymmetricField {
 public:
  SymmetricField() = default;
  explicit SymmetricField(int radius);

  static SymmetricField constant(double value, int radius = 1);

  int radius() const { return radius_; }
  bool empty() const { return radius_ == 0; }

  double a(int j, int k) const;
  double b(int j, int k) const;
  void set(int j, int k, double a_val, double b_val = 0.0);
  void add(int j, int k, double a_val, double b_val = 0.0);

  double max_abs() const;

  SymmetricField& operator+=(const SymmetricField& o);
  SymmetricField& operator-=(const SymmetricField& o);
  SymmetricField& operator*=(double c);

 private:
  int radius_ = 0;
  Eigen::MatrixXd a_, b_;  // (radius x radius), entries with j+k >= radius are zero
};

SymmetricField operator+(SymmetricField u, const SymmetricField& v);
SymmetricField operator-(SymmetricField u, const SymmetricField& v);
SymmetricField operator*(double c, SymmetricField u);

// Complex conjugate of the represented function: (a,b) -> (a,-b).
SymmetricField conj(const SymmetricField& u);

SymmetricField truncate(const SymmetricField& u, int radius);

// Pointwise product by exact discrete convolution of the exponential
// expansions. exact=true keeps the full support (radius Lu+Lv-1), otherwise
// the result is truncated to max(Lu, Lv).
SymmetricField multiply(const SymmetricField& u, const SymmetricField& v, bool exact = false);

// L2_sym inner product (1/4pi^2) int u conj(v); real for fields in the class.
double inner_product(const SymmetricField& u, const SymmetricField& v);

// Analytic norm: sum over sites of <u,e_x>^2 e^{2|(j,k)|sigma} <(j,k)>^{2s}.
// Independent of the frequency parameter because the per-(j,k) basis change
// is orthogonal.
double sigma_norm(const SymmetricField& u, const NormParams& p);

// Same weight applied to the complex-exponential expansion on Z^2. Agrees
// with sigma_norm exactly on the symmetric class; kept as a cross-check.
double sigma_norm_exponential(const SymmetricField& u, const NormParams& p);

std::complex<double> evaluate(const SymmetricField& u, double t, double s);

// Dense grid of real exponential coefficients c(j,k), j,k in [-R, R], with
// c(j,k) = c(j,-k). Products and Toeplitz lookups work on this form.
struct ExpansionGrid {
  int R = 0;
  Eigen::MatrixXd c;  // (2R+1) x (2R+1), index (j+R, k+R)

  explicit ExpansionGrid(int R_ = 0) : R(R_), c(Eigen::MatrixXd::Zero(2 * R_ + 1, 2 * R_ + 1)) {}
  double at(int j, int k) const {
    if (std::abs(j) > R || std::abs(k) > R) return 0.0;
    return c(j + R, k + R);
  }
  double& ref(int j, int k) { return c(j + R, k + R); }
};

ExpansionGrid to_expansion(const SymmetricField& u);
SymmetricField from_expansion(const ExpansionGrid& g, int radius);
ExpansionGrid convolve(const ExpansionGrid& u, const ExpansionGrid& v, int out_radius);

}  // namespace vfil

#endif
