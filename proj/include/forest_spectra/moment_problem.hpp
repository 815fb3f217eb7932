#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace forest_spectra {

// Raised when roots/weights of a representation cannot be pinned down at
// working precision (clustered atoms, negative weights beyond tolerance).
class NumericalDegeneracy : public std::runtime_error {
 public:
  explicit NumericalDegeneracy(const std::string& what)
      : std::runtime_error(what) {}
};

// Moments m_0..m_l of a nonnegative measure on [a,b] (m_0 = 1 in pipeline
// use). All computations internally rescale [a,b] to [0,1].
struct MomentSequence {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> moments;  // m_0..m_l

  int order() const { return static_cast<int>(moments.size()) - 1; }
};

// Dense polynomial, coefficients low degree first, original coordinates.
using Poly = std::vector<double>;

double poly_eval(const Poly& p, double x);

struct OrthoPolys {
  std::vector<Poly> unitary;     // U_0..U_p (monic)
  std::vector<Poly> normalized;  // V_0..V_p'
  // First index k with <U_k, U_k> below tolerance; -1 when regular through
  // the depth the moments allow.
  int singular_at = -1;

  bool regular() const { return singular_at < 0; }
};

// Three-term recurrence from moments. For l = 2r returns U,V up to degree
// r; for l = 2r+1, U up to r+1 and V up to r. A vanishing denominator stops
// the recursion and is reported in singular_at, not thrown.
OrthoPolys orthogonal_polynomials(const MomentSequence& ms);

struct AtomicMeasure {
  std::vector<double> atoms;    // ascending, in [a,b]
  std::vector<double> weights;  // nonnegative

  double moment(int k) const;
  // Mass strictly above xi, or including xi.
  double mass_above(double xi, bool include_xi) const;
  // ind(nu) = #endpoint atoms + 2 * #interior atoms.
  int index_in(double a, double b) const;
};

struct PrincipalPair {
  AtomicMeasure lower;  // Gauss (odd l) / Gauss-Radau at a (even l)
  AtomicMeasure upper;  // Gauss-Lobatto (odd l) / Gauss-Radau at b (even l)
};

// Extremal atomic representations of a regular sequence. Throws
// NumericalDegeneracy on singular input or on construction breakdown.
PrincipalPair principal_representations(const MomentSequence& ms);

// [m^-_{l+1}, m^+_{l+1}]: the range the next moment can take.
std::pair<double, double> admissible_interval(const MomentSequence& ms);

// Largest k such that, recursively, [m_hat_k - r_k, m_hat_k + r_k] fits in
// the admissible interval computed from the accepted prefix (the interval
// is [a,b] for k = 1). m_hat holds m_1..m_l; radii the same length.
int validate_sequence(double a, double b, std::span<const double> m_hat,
                      std::span<const double> radii);

struct CanonicalRep {
  AtomicMeasure measure;  // includes the atom at xi
  double xi_weight = 0.0;
};

// Unique atomic representation with an atom at xi in (a,b).
CanonicalRep canonical_representation(const MomentSequence& ms, double xi);

// Both construction branches, for diagnostics/tests. A branch is nullopt
// when its kernel polynomial is not computable.
struct CanonicalBranches {
  std::optional<AtomicMeasure> interiorish;  // (lina)/(veronique) branch
  std::optional<AtomicMeasure> endpointish;  // (marc-alain)/(blandine) branch
  double denom_first = 0.0;
  double denom_second = 0.0;
};
CanonicalBranches canonical_branches(const MomentSequence& ms, double xi);

struct MarkovBounds {
  double lower = 0.0;        // best lower bound on mu(]xi, b])
  double upper = 0.0;        // best upper bound on mu([xi, b])
  double atom_weight = 0.0;  // weight t of the canonical atom at xi
};

// Sharp tail bounds at xi. Out-of-range xi returns the forced bounds
// ([m0, m0] for xi <= a, [0, 0] for xi >= b); singular sequences are
// evaluated through their unique representation.
MarkovBounds markov_bounds(const MomentSequence& ms, double xi);

// Unique atomic representation of a singular sequence, when the sequence is
// detected as singular; nullopt for regular sequences.
std::optional<AtomicMeasure> singular_representation(const MomentSequence& ms);

}  // namespace forest_spectra
