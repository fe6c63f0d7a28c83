#include "lacuna/regular_rep.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "lacuna/errors.hpp"
#include "lacuna/rng.hpp"

namespace lacuna {
namespace {

using cplx = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

void check_map(const CoefficientMap& f) {
  if (f.dim < 1) fail(ErrorCode::InvalidInput, "coefficient blocks need dimension >= 1");
  for (const auto& [x, a] : f.terms) {
    if (!is_valid(f.group, x)) fail(ErrorCode::InvalidInput, "coefficient support element outside the group");
    if (a.rows() != f.dim || a.cols() != f.dim)
      fail(ErrorCode::InvalidInput, "coefficient block has the wrong shape",
           {{"element", format_element(f.group, x)}, {"dim", f.dim}});
  }
}

SparseOp assemble(Index n, Index d, const std::vector<std::pair<std::pair<Index, Index>, const MatrixXcd*>>& blocks) {
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(blocks.size() * static_cast<std::size_t>(d * d));
  for (const auto& [pos, a] : blocks)
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if ((*a)(i, j) != cplx(0)) trip.emplace_back(pos.first * d + i, pos.second * d + j, (*a)(i, j));
  SparseOp m(n * d, n * d);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

bool nonnegative_numeric(const CoefficientMap& a) {
  if (!a.group.is_numeric()) return false;
  return std::all_of(a.terms.begin(), a.terms.end(), [](const auto& t) { return t.first.value >= 0; });
}

// Letter classes: in L only, inverse in L only, both, neither.
enum Cls { kA = 0, kB = 1, kAB = 2, kN = 3 };
constexpr std::array<int, 4> kDual = {kB, kA, kAB, kN};

}  // namespace

CoefficientMap CoefficientMap::scalar(const FiniteSet& support, cplx value) {
  CoefficientMap f;
  f.group = support.group();
  for (const auto& x : support.elements()) f.terms.emplace_back(x, MatrixXcd::Constant(1, 1, value));
  return f;
}

CoefficientMap CoefficientMap::blocks(const FiniteSet& support, std::vector<MatrixXcd> values) {
  if (values.size() != support.size()) fail(ErrorCode::InvalidInput, "one block per support element is required");
  CoefficientMap f;
  f.group = support.group();
  f.dim = values.empty() ? 1 : values.front().rows();
  for (std::size_t i = 0; i < values.size(); ++i) f.terms.emplace_back(support[i], std::move(values[i]));
  check_map(f);
  return f;
}

std::size_t CoefficientMap::max_length() const {
  std::size_t m = 0;
  for (const auto& [x, a] : terms) m = std::max(m, length(group, x));
  return m;
}

TruncatedOperator build_operator(const CoefficientMap& f, int radius, const Limits& limits) {
  check_map(f);
  if (radius < 0) fail(ErrorCode::InvalidInput, "radius must be nonnegative");
  if (f.group.kind == GroupKind::Natural)
    fail(ErrorCode::Unsupported, "the regular representation needs a group; embed N in Z");
  TruncatedOperator op;
  op.group = f.group;
  op.radius = radius;
  op.dim = f.dim;
  op.basis = f.group.is_free() ? ball(f.group, radius, limits) : interval(f.group, -radius, radius, limits);
  const std::size_t n = op.basis.size();
  if (n * static_cast<std::size_t>(f.dim) > limits.max_elements)
    fail(ErrorCode::LimitExceeded, "truncated basis too large", {{"basis", n}, {"dim", f.dim}});
  std::vector<std::pair<std::pair<Index, Index>, const MatrixXcd*>> blocks;
  for (const auto& [x, a] : f.terms) {
    for (std::size_t t = 0; t < n; ++t) {
      std::ptrdiff_t s = op.basis.find(mul(f.group, x, op.basis[t]));
      if (s >= 0) blocks.push_back({{static_cast<Index>(s), static_cast<Index>(t)}, &a});
    }
  }
  op.matrix = assemble(static_cast<Index>(n), f.dim, blocks);
  return op;
}

NormReport op_norm(const SparseOp& t, const NormSettings& settings) {
  if (!(settings.tolerance > 0)) fail(ErrorCode::InvalidInput, "norm tolerance must be positive");
  NormReport rep;
  if (t.nonZeros() == 0 || t.cols() == 0) return rep;
  Rng rng(settings.seed);
  VectorXcd v(t.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  v.normalize();
  SparseOp adj = t.adjoint();
  double prev = -1, rho = 0;
  for (int it = 1; it <= settings.max_iterations; ++it) {
    VectorXcd w = t * v;
    VectorXcd u = adj * w;
    rho = w.squaredNorm();
    rep.iterations = it;
    rep.residual = (u - rho * v).norm();
    double un = u.norm();
    if (un == 0) {
      rep.norm = 0;
      return rep;
    }
    if (prev >= 0 && std::abs(rho - prev) <= settings.tolerance * rho) {
      rep.norm = std::sqrt(rho);
      return rep;
    }
    prev = rho;
    v = u / un;
  }
  fail(ErrorCode::NonConvergence, "power iteration did not converge",
       {{"iterations", settings.max_iterations}, {"last_gap", std::abs(rho - prev)}, {"last_estimate", std::sqrt(rho)}});
}

SparseOp letter_orbit_operator(const GroupSpec& g, const FiniteSet& letters, int radius, const Limits& limits) {
  if (!g.is_free()) fail(ErrorCode::Unsupported, "orbit reduction applies to free groups");
  std::array<double, 4> count{};
  for (int i = 1; i <= g.rank; ++i) {
    for (int sgn : {1, -1}) {
      bool in = letters.contains(Element{{sgn * i}, 0});
      bool inv_in = letters.contains(Element{{-sgn * i}, 0});
      count[in && inv_in ? kAB : in ? kA : inv_in ? kB : kN] += 1;
    }
  }
  for (const auto& x : letters.elements())
    if (x.word.size() != 1) fail(ErrorCode::InvalidInput, "orbit reduction needs a set of letters");

  struct State {
    Index parent;
    int last;
    double mult;
  };
  std::vector<State> states{{-1, -1, 1.0}};
  std::size_t begin = 0;
  for (int len = 1; len <= radius; ++len) {
    std::size_t end = states.size();
    for (std::size_t p = begin; p < end; ++p) {
      for (int c = 0; c < 4; ++c) {
        double k = count[c] - (states[p].last >= 0 && c == kDual[states[p].last] ? 1 : 0);
        if (k <= 0) continue;
        states.push_back({static_cast<Index>(p), c, states[p].mult * k});
        if (states.size() > limits.max_elements)
          fail(ErrorCode::LimitExceeded, "orbit state space too large", {{"radius", radius}});
      }
    }
    begin = end;
  }
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t c = 1; c < states.size(); ++c) {
    const State& s = states[c];
    double v = std::sqrt(s.mult / states[static_cast<std::size_t>(s.parent)].mult);
    if (s.last == kA || s.last == kAB) trip.emplace_back(static_cast<Index>(c), s.parent, v);
    if (s.last == kB || s.last == kAB) trip.emplace_back(s.parent, static_cast<Index>(c), v);
  }
  Index n = static_cast<Index>(states.size());
  SparseOp m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

double column_row_bound(const CoefficientMap& a) {
  MatrixXcd col = MatrixXcd::Zero(a.dim, a.dim), row = col;
  for (const auto& [x, b] : a.terms) {
    col += b.adjoint() * b;
    row += b * b.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> ec(col, Eigen::EigenvaluesOnly), er(row, Eigen::EigenvaluesOnly);
  double v = std::max(ec.eigenvalues().maxCoeff(), er.eigenvalues().maxCoeff());
  return std::sqrt(std::max(v, 0.0));
}

LSetRatio lset_ratio(const CoefficientMap& a, int radius, const RatioSettings& settings) {
  check_map(a);
  LSetRatio r;
  r.radius = radius;
  r.rhs = column_row_bound(a);
  if (!(r.rhs > 0)) fail(ErrorCode::InvalidInput, "all coefficients are zero");

  bool letters = a.group.is_free() && a.dim == 1 && !a.terms.empty() &&
                 std::all_of(a.terms.begin(), a.terms.end(), [&](const auto& t) {
                   return t.first.word.size() == 1 && t.second(0, 0) == a.terms.front().second(0, 0);
                 });
  if (settings.allow_orbit && letters) {
    std::vector<Element> el;
    for (const auto& t : a.terms) el.push_back(t.first);
    SparseOp k = letter_orbit_operator(a.group, FiniteSet(a.group, el), radius, settings.limits);
    r.norm = op_norm(k, settings.norm);
    r.truncated_norm = std::abs(a.terms.front().second(0, 0)) * r.norm.norm;
    r.basis_size = static_cast<std::size_t>(k.rows());
    r.method = "orbit-reduced";
    r.supported = radius >= 1;
  } else if (nonnegative_numeric(a)) {
    const Index n = radius + 1;
    if (static_cast<std::size_t>(n * a.dim) > settings.limits.max_elements)
      fail(ErrorCode::LimitExceeded, "window too large", {{"radius", radius}});
    std::vector<std::pair<std::pair<Index, Index>, const MatrixXcd*>> blocks;
    for (const auto& [x, b] : a.terms)
      for (Index s = 0; s < n && s <= x.value; ++s)
        if (x.value - s < n) blocks.push_back({{s, x.value - s}, &b});
    SparseOp m = assemble(n, a.dim, blocks);
    r.norm = op_norm(m, settings.norm);
    r.truncated_norm = r.norm.norm;
    r.basis_size = static_cast<std::size_t>(n);
    r.method = "hankel-window";
    r.supported = std::all_of(a.terms.begin(), a.terms.end(), [&](const auto& t) { return t.first.value <= radius; });
  } else {
    TruncatedOperator op = build_operator(a, radius, settings.limits);
    r.norm = op_norm(op, settings.norm);
    r.truncated_norm = r.norm.norm;
    r.basis_size = op.basis.size();
    r.method = "explicit";
    r.supported = a.group.is_free()
                      ? a.max_length() <= static_cast<std::size_t>(radius)
                      : std::all_of(a.terms.begin(), a.terms.end(),
                                    [&](const auto& t) { return std::abs(t.first.value) <= radius; });
  }
  r.ratio = r.truncated_norm / r.rhs;
  if (r.supported && r.ratio < 1 - settings.tolerance)
    fail(ErrorCode::VerificationFailed, "truncated norm fell below the column/row bound",
         {{"ratio", r.ratio}, {"radius", radius}, {"method", r.method}});
  return r;
}

json to_json(const LSetRatio& r) {
  return {{"ratio", r.ratio},
          {"truncated_norm", r.truncated_norm},
          {"rhs", r.rhs},
          {"radius", r.radius},
          {"basis_size", r.basis_size},
          {"method", r.method},
          {"supported", r.supported},
          {"iterations", r.norm.iterations},
          {"residual", r.norm.residual},
          {"label", "truncated at R"}};
}

}  // namespace lacuna
