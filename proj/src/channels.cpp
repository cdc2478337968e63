#include "locrho/channels.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "locrho/error.hpp"
#include "locrho/linalg.hpp"
#include "locrho/random.hpp"
#include "locrho/tensor.hpp"

namespace locrho {

double VerificationReport::metric(const std::string& name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

constexpr double kChoiCutoff = 1e-9;

ComplexMatrix tp_defect(const KrausChannel& channel) {
  ComplexMatrix sum(channel.dim_in(), channel.dim_in());
  for (std::size_t k = 0; k < channel.kraus().size(); ++k) {
    const ComplexMatrix& kk = channel.kraus()[k];
    sum += (kk.adjoint() * kk) * Complex(channel.weights()[k]);
  }
  return sum - ComplexMatrix::identity(channel.dim_in());
}

}  // namespace

KrausChannel::KrausChannel(std::vector<ComplexMatrix> kraus, std::vector<double> weights, bool checked)
    : kraus_(std::move(kraus)), weights_(std::move(weights)), checked_(checked) {
  if (kraus_.empty()) throw InputError("KrausChannel: Kraus family must be nonempty");
  dim_out_ = kraus_.front().rows();
  dim_in_ = kraus_.front().cols();
  for (const auto& k : kraus_) {
    if (k.rows() != dim_out_ || k.cols() != dim_in_) {
      throw DimensionError("KrausChannel: all Kraus operators must share one shape");
    }
  }
  if (weights_.empty()) weights_.assign(kraus_.size(), 1.0);
  if (weights_.size() != kraus_.size()) throw InputError("KrausChannel: one weight per Kraus operator");
}

KrausChannel KrausChannel::make(std::vector<ComplexMatrix> kraus, double tol) {
  KrausChannel channel(std::move(kraus), {}, true);
  const VerificationReport report = validate_cptp(channel, tol);
  if (!report.pass) {
    throw DomainError("KrausChannel: Kraus family is not trace preserving (residual " +
                      std::to_string(report.metric("tp_residual")) + ")");
  }
  return channel;
}

KrausChannel KrausChannel::unchecked(std::vector<ComplexMatrix> kraus, std::vector<double> weights) {
  return KrausChannel(std::move(kraus), std::move(weights), false);
}

KrausChannel KrausChannel::from_choi(const ComplexMatrix& choi_matrix, std::size_t dim_in, std::size_t dim_out,
                                     bool checked, double tol) {
  require_bipartite(choi_matrix, {dim_in, dim_out}, "KrausChannel::from_choi");
  const HermEigDecomposition eig = herm_eig(choi_matrix, tol);
  std::vector<ComplexMatrix> kraus;
  std::vector<double> weights;
  for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
    const double lambda = eig.eigenvalues[k];
    if (std::abs(lambda) <= kChoiCutoff) continue;
    if (lambda < 0.0 && checked) {
      throw DomainError("KrausChannel::from_choi: Choi matrix has negative eigenvalue " + std::to_string(lambda));
    }
    const double scale = std::sqrt(std::abs(lambda));
    ComplexMatrix op(dim_out, dim_in);
    for (std::size_t i = 0; i < dim_in; ++i) {
      for (std::size_t o = 0; o < dim_out; ++o) op(o, i) = scale * eig.eigenvectors(i * dim_out + o, k);
    }
    kraus.push_back(std::move(op));
    weights.push_back(lambda < 0.0 ? -1.0 : 1.0);
  }
  if (kraus.empty()) throw DomainError("KrausChannel::from_choi: Choi matrix is zero");
  if (checked) return make(std::move(kraus), tol);
  return unchecked(std::move(kraus), std::move(weights));
}

ComplexMatrix apply(const KrausChannel& channel, const ComplexMatrix& x) {
  if (!x.is_square() || x.rows() != channel.dim_in()) {
    throw DimensionError("apply: operator side " + std::to_string(x.rows()) + " does not match channel input " +
                         std::to_string(channel.dim_in()));
  }
  ComplexMatrix out(channel.dim_out(), channel.dim_out());
  for (std::size_t k = 0; k < channel.kraus().size(); ++k) {
    const ComplexMatrix& kk = channel.kraus()[k];
    out += (kk * x * kk.adjoint()) * Complex(channel.weights()[k]);
  }
  return out;
}

ComplexMatrix jamiolkowski(const KrausChannel& channel) {
  const std::size_t din = channel.dim_in();
  ComplexMatrix j(din * channel.dim_out(), din * channel.dim_out());
  for (std::size_t a = 0; a < din; ++a) {
    for (std::size_t b = 0; b < din; ++b) {
      j += tensor(ComplexMatrix::ket_bra(din, a, b), apply(channel, ComplexMatrix::ket_bra(din, b, a)));
    }
  }
  return j;
}

ComplexMatrix choi(const KrausChannel& channel) {
  return partial_transpose(jamiolkowski(channel), {channel.dim_in(), channel.dim_out()}, Factor::A);
}

VerificationReport validate_cptp(const KrausChannel& channel, double tol) {
  VerificationReport report;
  report.check = "cptp";
  const double tp = tp_defect(channel).max_abs();
  // Choi matrices of Hermiticity-preserving maps are Hermitian; a loose
  // Hermiticity gate here keeps the witness defined for any weighted family.
  const double cp = min_eigenvalue(choi(channel), 1e-6);
  report.add_metric("tp_residual", tp);
  report.add_metric("choi_min_eigenvalue", cp);
  report.pass = tp <= tol && cp >= -tol;
  if (tp > tol) report.notes.push_back("not trace preserving");
  if (cp < -tol) report.notes.push_back("not completely positive");
  return report;
}

bool is_discard_and_prepare(const KrausChannel& channel, double tol) {
  const std::size_t din = channel.dim_in();
  const ComplexMatrix sigma = apply(channel, ComplexMatrix::ket_bra(din, 0, 0));
  for (std::size_t a = 0; a < din; ++a) {
    for (std::size_t b = 0; b < din; ++b) {
      const ComplexMatrix out = apply(channel, ComplexMatrix::ket_bra(din, a, b));
      const double dev = a == b ? max_abs_diff(out, sigma) : out.max_abs();
      if (dev > tol) return false;
    }
  }
  return true;
}

namespace {

struct StandardBuilder {
  double tol;

  KrausChannel operator()(const standard::Identity& id) const {
    if (id.dim == 0) throw DomainError("identity channel: dimension must be positive");
    return KrausChannel::make({ComplexMatrix::identity(id.dim)}, tol);
  }

  KrausChannel operator()(const standard::Unitary& u) const {
    if (!is_unitary(u.u, tol)) throw DomainError("unitary channel: matrix is not unitary");
    return KrausChannel::make({u.u}, tol);
  }

  KrausChannel operator()(const standard::Depolarizing& dep) const {
    if (dep.dim == 0) throw DomainError("depolarizing channel: dimension must be positive");
    if (!(dep.p >= 0.0 && dep.p <= 1.0)) {
      throw DomainError("depolarizing channel: p = " + std::to_string(dep.p) + " is outside [0, 1]");
    }
    std::vector<ComplexMatrix> kraus;
    if (dep.p < 1.0) kraus.push_back(ComplexMatrix::identity(dep.dim) * Complex(std::sqrt(1.0 - dep.p)));
    if (dep.p > 0.0) {
      const double w = std::sqrt(dep.p / static_cast<double>(dep.dim));
      for (std::size_t i = 0; i < dep.dim; ++i) {
        for (std::size_t j = 0; j < dep.dim; ++j) kraus.push_back(ComplexMatrix::ket_bra(dep.dim, i, j) * Complex(w));
      }
    }
    return KrausChannel::make(std::move(kraus), tol);
  }

  KrausChannel operator()(const standard::DiscardAndPrepare& dp) const {
    if (dp.dim_in == 0) throw DomainError("discard-and-prepare channel: input dimension must be positive");
    if (!is_density(dp.sigma, tol)) throw DomainError("discard-and-prepare channel: sigma is not a density operator");
    const HermEigDecomposition eig = herm_eig(dp.sigma, tol);
    const std::size_t dout = dp.sigma.rows();
    std::vector<ComplexMatrix> kraus;
    for (std::size_t k = 0; k < dout; ++k) {
      if (eig.eigenvalues[k] <= 1e-12) continue;
      const double w = std::sqrt(eig.eigenvalues[k]);
      for (std::size_t j = 0; j < dp.dim_in; ++j) {
        ComplexMatrix op(dout, dp.dim_in);
        for (std::size_t o = 0; o < dout; ++o) op(o, j) = w * eig.eigenvectors(o, k);
        kraus.push_back(std::move(op));
      }
    }
    return KrausChannel::make(std::move(kraus), tol);
  }
};

}  // namespace

KrausChannel standard_channel(const ChannelKind& kind, double tol) { return std::visit(StandardBuilder{tol}, kind); }

KrausChannel random_channel(std::size_t dim_in, std::size_t dim_out, std::size_t num_kraus, Rng& rng) {
  if (num_kraus == 0 || dim_out * num_kraus < dim_in) {
    throw InputError("random_channel: need dim_out * num_kraus >= dim_in");
  }
  const ComplexMatrix u = random_unitary(dim_out * num_kraus, rng);
  std::vector<ComplexMatrix> kraus;
  for (std::size_t m = 0; m < num_kraus; ++m) {
    ComplexMatrix op(dim_out, dim_in);
    for (std::size_t o = 0; o < dim_out; ++o) {
      for (std::size_t i = 0; i < dim_in; ++i) op(o, i) = u(m * dim_out + o, i);
    }
    kraus.push_back(std::move(op));
  }
  return KrausChannel::make(std::move(kraus), 1e-9);
}

}  // namespace locrho
