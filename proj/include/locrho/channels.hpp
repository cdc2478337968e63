#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "locrho/matrix.hpp"
#include "locrho/report.hpp"

namespace locrho {

/// Linear map X -> sum_k w_k K_k X K_k^dagger from dim_in x dim_in to
/// dim_out x dim_out operators.
///
/// Channels built through make()/from_choi() are validated CPTP and carry unit
/// weights. unchecked() admits arbitrary (possibly negative) weights so that
/// non-CP or non-TP counterexamples such as the transpose map can be
/// represented; such channels report checked() == false.
class KrausChannel {
 public:
  /// Throws DomainError if the family is not CPTP within tol.
  static KrausChannel make(std::vector<ComplexMatrix> kraus, double tol = kDefaultTol);
  static KrausChannel unchecked(std::vector<ComplexMatrix> kraus, std::vector<double> weights = {});
  /// Converts a Choi matrix C = sum_ij |i><j| (x) E(|i><j|) to Kraus form,
  /// keeping eigenpairs with |lambda| > 1e-9. With checked = true the result
  /// must be CPTP; otherwise negative eigenvalues become negative weights.
  static KrausChannel from_choi(const ComplexMatrix& choi, std::size_t dim_in, std::size_t dim_out,
                                bool checked = true, double tol = kDefaultTol);

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  const std::vector<double>& weights() const { return weights_; }
  bool checked() const { return checked_; }

 private:
  KrausChannel(std::vector<ComplexMatrix> kraus, std::vector<double> weights, bool checked);

  std::size_t dim_in_;
  std::size_t dim_out_;
  std::vector<ComplexMatrix> kraus_;
  std::vector<double> weights_;
  bool checked_;
};

ComplexMatrix apply(const KrausChannel& channel, const ComplexMatrix& x);

/// J[E] = (id (x) E)(S) = sum_ij |i><j| (x) E(|j><i|).
ComplexMatrix jamiolkowski(const KrausChannel& channel);

/// Choi matrix, obtained as the computational-basis partial transpose of
/// J[E] on the input factor.
ComplexMatrix choi(const KrausChannel& channel);

/// TP residual max|sum_k w_k K_k^dagger K_k - I| and CP witness (minimum Choi
/// eigenvalue). Passes iff residual <= tol and witness >= -tol.
VerificationReport validate_cptp(const KrausChannel& channel, double tol = kDefaultTol);

/// True iff E(X) = Tr[X] sigma for a fixed sigma, i.e. J[E] = I (x) sigma.
bool is_discard_and_prepare(const KrausChannel& channel, double tol = kDefaultTol);

namespace standard {

struct Identity {
  std::size_t dim;
};
struct Unitary {
  ComplexMatrix u;
};
/// X -> (1-p) X + p Tr[X] I/d.
struct Depolarizing {
  std::size_t dim;
  double p;
};
struct DiscardAndPrepare {
  std::size_t dim_in;
  ComplexMatrix sigma;
};

}  // namespace standard

using ChannelKind =
    std::variant<standard::Identity, standard::Unitary, standard::Depolarizing, standard::DiscardAndPrepare>;

/// Throws DomainError on invalid parameters (non-unitary U, p outside [0,1],
/// sigma not a density operator).
KrausChannel standard_channel(const ChannelKind& kind, double tol = kDefaultTol);

/// Kraus family of a random CPTP map with `num_kraus` operators (Stinespring
/// isometry cut from a Haar unitary).
class Rng;
KrausChannel random_channel(std::size_t dim_in, std::size_t dim_out, std::size_t num_kraus, Rng& rng);

}  // namespace locrho
