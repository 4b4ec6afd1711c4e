#include "vnpair/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "vnpair/error.hpp"
#include "vnpair/multiplier.hpp"
#include "vnpair/pairing.hpp"

namespace vnpair {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CaseOutcome outcome(double residual, double tol, bool structural = true, std::string note = {}) {
  return {residual, structural && residual <= tol, std::move(note)};
}

VnAlgebra full_algebra(std::size_t n) {
  std::vector<CMatrix> g;
  for (std::size_t i = 0; i + 1 < n; ++i) g.push_back(CMatrix::unit(n, i, i + 1));
  if (n == 1) return from_generators(1, {});
  return from_generators(n, g);
}

VnAlgebra diagonal2() { return from_generators(2, {CMatrix::unit(2, 0, 0)}); }

struct InnerInstance {
  VnAlgebra b, bc;
  CMatrix u;
  Endomorphism theta, theta_prime;
};

// theta = Ad(u^dagger) on B and theta' = Ad(u) on B' for u normalizing a random algebra
InnerInstance inner_instance(Rng& rng, std::size_t max_n) {
  const BlockList blocks = random_block_list(rng, max_n);
  const std::uint64_t as = rng.next();
  const std::uint64_t us = rng.next();
  VnAlgebra b = random_algebra(layout_dim(blocks), blocks, as);
  VnAlgebra bc = commutant(b);
  CMatrix u = random_normalizing_unitary(blocks, as, us);
  Endomorphism th = from_unitary(b, u, Conjugation::ByAdjoint);
  Endomorphism thp = from_unitary(bc, u, Conjugation::Direct);
  return {b, bc, u, th, thp};
}

CMatrix random_unitary_in(const VnAlgebra& b, Rng& rng) {
  CMatrix w(b.ambient_dim(), b.ambient_dim());
  for (const auto& x : b.basis()) w.add_scaled(rng.cnormal(), x);
  return polar_unitary(w);
}

// 1. double commutant and dimension laws
CaseOutcome double_commutant(std::uint64_t seed) {
  Rng rng(seed);
  const BlockList blocks = random_block_list(rng, 12);
  const VnAlgebra a = random_algebra(layout_dim(blocks), blocks, rng.next());
  const VnAlgebra c = commutant(a);
  const VnAlgebra cc = commutant(c);
  const auto eq = equals(a, cc);
  std::size_t expect = 0;
  BlockList transposed;
  for (const auto& [dim, mult] : blocks) {
    expect += mult * mult;
    transposed.emplace_back(mult, dim);
  }
  std::sort(transposed.rbegin(), transposed.rend());
  const BlockSignature sig = block_decompose(c);
  std::string note;
  if (c.dim() != expect) note += "commutant dimension " + std::to_string(c.dim()) + " != " + std::to_string(expect) + "; ";
  if (sig.blocks != transposed) note += "commutant signature is not the transposed multiset; ";
  return outcome(eq.residual, 1e-8, eq.equal && note.empty(), note);
}

FramedAlgebra random_framed(Rng& rng, std::size_t max_ambient) {
  const BlockList blocks = random_block_list(rng, max_ambient);
  return FramedAlgebra::random(blocks, rng.next());
}

// 2. commutant involution, exact
CaseOutcome involution(std::uint64_t seed) {
  Rng rng(seed);
  const auto fa = random_framed(rng, 6);
  const auto fb = random_framed(rng, 6);
  const Correspondence e = random_correspondence(fa, fb, 12, rng.next());
  const bool same = commutant(commutant(e)) == e;
  return {same ? 0.0 : 1.0, same, same ? "" : "commutant(commutant(e)) differs from e"};
}

// 3. tensor anti-multiplicativity on a composable pair with a nonzero tensor product
CaseOutcome anti_multiplicativity(std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 32; ++attempt) {
    const auto fa = random_framed(rng, 4);
    const auto fb = random_framed(rng, 4);
    const auto fc = random_framed(rng, 4);
    const Correspondence e = random_correspondence(fa, fb, 12, rng.next());
    const Correspondence f = random_correspondence(fb, fc, 12, rng.next());
    if (tensor_product(e, f).result.carrier_dim() == 0) continue;
    const CommutantSwap s = tensor_commutant_iso(e, f);
    return outcome(std::max(s.isometry, s.intertwining), 1e-8);
  }
  return {kInf, false, "no composable pair with a nonzero tensor product"};
}

// 4. can_pair round trip on random inner instances
CaseOutcome round_trip(std::uint64_t seed) {
  Rng rng(seed);
  const InnerInstance in = inner_instance(rng, 8);
  const PairingCertificate p = can_pair(in.theta, in.theta_prime, rng.next());
  if (!p.paired) return {kInf, false, "can_pair returned NotPaired"};
  const PairingCertificate chk = check_pairing(p.unitary, in.theta, in.theta_prime);
  const PairingIsomorphism iso = isomorphism_from_pairing(p.unitary, in.theta, in.theta_prime);
  const PairingFromIsomorphism back = pairing_from_isomorphism(iso.unitary, in.theta, in.theta_prime);
  const PairingIsomorphism again = isomorphism_from_pairing(back.certificate.unitary, in.theta, in.theta_prime);
  const double r = std::max({chk.relation_b, chk.relation_b_prime, iso.worst(), back.certificate.relation_b,
                             back.certificate.relation_b_prime, back.dilation_consistency, again.worst()});
  return outcome(r, 1e-8, back.certificate.paired);
}

// 5. (swap, identity) on D_2 is not paired
CaseOutcome negative_instance(std::uint64_t) {
  const VnAlgebra b = diagonal2();
  const VnAlgebra bc = commutant(b);
  const CMatrix x{{0, 1}, {1, 0}};
  const Endomorphism swap = from_unitary(b, x, Conjugation::ByAdjoint);
  const PairingCertificate p = can_pair(swap, Endomorphism::identity(bc));
  if (p.paired) return {kInf, false, "swap and identity were paired"};
  if (p.table_e.m == p.table_f.m) return {kInf, false, "multiplicity tables agree"};
  // a pairing unitary commutes with D_2, hence is diagonal; scan the diagonal torus
  double best = kInf;
  const int steps = 96;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const double two_pi = 6.283185307179586;
      const CMatrix u = CMatrix::diag({std::polar(1.0, two_pi * i / steps), std::polar(1.0, two_pi * j / steps)});
      double r = 0.0;
      for (const auto& e : b.basis()) r = std::max(r, scaled_residual(u.adjoint() * e * u, swap.apply(e)));
      best = std::min(best, r);
    }
  const bool oracle_agrees = best > 0.5;
  return {0.0, oracle_agrees, oracle_agrees ? "" : "a diagonal unitary nearly implements the swap"};
}

// 6. every multiplier on N = 64 is trivial
CaseOutcome trivial_multipliers(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 64;
  auto phase = [&] { return std::polar(1.0, 6.283185307179586 * rng.uniform()); };
  Multiplier m;
  if (seed % 2 == 0) {
    // c exp(i theta s t) f(s) f(t) / f(s+t)
    const cd c = phase();
    const double theta = 6.283185307179586 * rng.uniform();
    std::vector<cd> f;
    for (std::size_t k = 0; k <= 2 * n; ++k) f.push_back(phase());
    std::vector<cd> v((n + 1) * (n + 1));
    for (std::size_t s = 0; s <= n; ++s)
      for (std::size_t t = 0; t <= n; ++t)
        v[s * (n + 1) + t] = c * std::polar(1.0, theta * double(s * t)) * f[s] * f[t] / f[s + t];
    m = Multiplier::validate(n, GridShape::Square, std::move(v));
  } else {
    const std::size_t dim = 1 + rng.below(3);
    const CMatrix v = random_unitary(dim, rng.next());
    std::vector<CMatrix> fam{phase() * CMatrix::identity(dim)};
    CMatrix vt = CMatrix::identity(dim);
    for (std::size_t t = 1; t <= n; ++t) {
      vt = vt * v;
      fam.push_back(phase() * vt);
    }
    m = extract(fam);
  }
  const Trivialization tr = trivialize(m);
  return outcome(trivialization_residual(m, tr.f), 1e-10);
}

// 7. the dilation map equals left multiplication by u(1); powers have trivial multiplier
CaseOutcome dilation_consistency(std::uint64_t seed) {
  Rng rng(seed);
  const InnerInstance in = inner_instance(rng, 6);
  const PairingCertificate p = can_pair(in.theta, in.theta_prime, rng.next());
  if (!p.paired) return {kInf, false, "can_pair returned NotPaired"};
  const PairingIsomorphism iso = isomorphism_from_pairing(p.unitary, in.theta, in.theta_prime);
  const PairingFromIsomorphism back = pairing_from_isomorphism(iso.unitary, in.theta, in.theta_prime);
  const CMatrix& u = back.certificate.unitary;
  double r = back.dilation_consistency;
  std::vector<CMatrix> pw{CMatrix::identity(u.rows())};
  for (int t = 1; t <= 6; ++t) pw.push_back(pw.back() * u);
  for (std::size_t s = 0; s <= 6; ++s)
    for (std::size_t t = 0; s + t <= 6; ++t) r = std::max(r, scaled_residual(pw[s + t], pw[s] * pw[t]));
  const Multiplier m = extract(pw);
  for (std::size_t s = 0; s <= 6; ++s)
    for (std::size_t t = 0; s + t <= 6; ++t) r = std::max(r, std::abs(m(s, t) - 1.0));
  return outcome(r, 1e-8);
}

// 8. the dilation-based commutant pipeline
CaseOutcome dilation_pipeline(std::uint64_t seed) {
  Rng rng(seed);
  const InnerInstance in = inner_instance(rng, 8);
  const EndomorphismSystem p = from_endomorphism(in.theta, 4);
  const DilationFamily w = right_dilation_from_unitary(p, in.u);
  const DilationCommutant dc = commutant_via_dilation(p, w, std::nullopt, rng.next());
  return outcome(dc.worst(), 1e-8);
}

// 9. cocycle link between theta and Ad(W) theta
CaseOutcome cocycle_equivalence(std::uint64_t seed) {
  Rng rng(seed);
  const InnerInstance in = inner_instance(rng, 6);
  const CMatrix w = random_unitary_in(in.b, rng);
  std::vector<CMatrix> im;
  for (const auto& x : in.b.basis()) im.push_back(w * in.theta.apply(x) * w.adjoint());
  const Endomorphism theta2 = Endomorphism::make(in.b, im);
  const std::size_t horizon = 6;
  const CocycleFamily link = cocycle_link(in.theta, theta2, in.theta_prime, horizon);
  double r = link.residual;
  std::vector<Endomorphism> pw{Endomorphism::identity(in.b)};
  for (std::size_t t = 1; t <= horizon; ++t) pw.push_back(compose(in.theta, pw.back()));
  for (std::size_t s = 0; s <= horizon; ++s) {
    r = std::max(r, in.b.span_residual(link.c[s]));
    for (std::size_t t = 0; s + t <= horizon; ++t)
      r = std::max(r, scaled_residual(link.c[s + t], link.c[s] * pw[s].apply(link.c[t])));
  }
  return outcome(r, 1e-8);
}

// 10. Bhat systems of automorphisms of full matrix algebras are one-dimensional
CaseOutcome bhat_trivial(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 1 + rng.below(6);
  const VnAlgebra b = full_algebra(n);
  const CMatrix u = random_unitary(n, rng.next());
  const Endomorphism theta = from_unitary(b, u, Conjugation::Direct);
  const CMatrix gamma = rng.unit_vector(n);
  const BhatSystem bs = bhat_system(theta, gamma, 4);
  bool one_dim = true;
  for (const auto& q : bs.spaces) one_dim = one_dim && q.cols() == 1;
  return outcome(bs.worst(), 1e-10, one_dim, one_dim ? "" : "a space of the Bhat system is not one-dimensional");
}

// 11. the two restriction verdicts agree
CaseOutcome restriction(std::uint64_t seed) {
  Rng rng(seed);
  const BlockList blocks = random_block_list(rng, 8);
  const std::uint64_t as = rng.next();
  const std::uint64_t us = rng.next();
  const VnAlgebra b = random_algebra(layout_dim(blocks), blocks, as);
  const bool normalizing = seed % 2 == 1;
  const CMatrix u = normalizing ? random_normalizing_unitary(blocks, as, us) : random_unitary(b.ambient_dim(), us);
  const RestrictionVerdict v = restriction_symmetry(u, b);
  const bool ok = v.algebra == v.commutant && (!normalizing || v.algebra);
  return {0.0, ok, ok ? "" : "verdicts disagree or a normalizing unitary was rejected"};
}

// 12. multiplier group laws on N = 32
CaseOutcome group_laws(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 32;
  const GridShape shape = seed % 2 ? GridShape::Square : GridShape::Triangle;
  auto random_m = [&] {
    std::vector<cd> f;
    for (std::size_t k = 0; k <= 2 * n; ++k) f.push_back(std::polar(1.0, 6.283185307179586 * rng.uniform()));
    const double theta = rng.uniform();
    std::vector<cd> v((n + 1) * (n + 1));
    for (std::size_t s = 0; s <= n; ++s)
      for (std::size_t t = 0; t <= n; ++t) v[s * (n + 1) + t] = std::polar(1.0, theta * double(s * t)) * f[s] * f[t] / f[s + t];
    return Multiplier::validate(n, shape, std::move(v));
  };
  const Multiplier a = random_m(), b = random_m(), c = random_m();
  const Multiplier one = Multiplier::constant(n, shape, 1.0);
  auto dist = [&](const Multiplier& x, const Multiplier& y) {
    double r = 0.0;
    for (std::size_t s = 0; s <= n; ++s)
      for (std::size_t t = 0; t <= n; ++t)
        if (x.contains(s, t)) r = std::max(r, std::abs(x(s, t) - y(s, t)));
    return r;
  };
  const double r = std::max({dist(pointwise_product(pointwise_product(a, b), c), pointwise_product(a, pointwise_product(b, c))),
                             dist(pointwise_product(a, b), pointwise_product(b, a)), dist(pointwise_product(a, one), a),
                             dist(pointwise_product(a, inverse(a)), one),
                             dist(transpose(pointwise_product(a, b)), pointwise_product(transpose(a), transpose(b))),
                             dist(transpose(transpose(a)), a), dist(transpose(one), one)});
  return outcome(r, 1e-12);
}

std::vector<Criterion> make_criteria() {
  return {
      {1, "double commutant and dimension laws", 200, 1e-8, 10.0, double_commutant},
      {2, "commutant functor involution", 100, 0.0, 0.0, involution},
      {3, "tensor anti-multiplicativity", 100, 1e-8, 30.0, anti_multiplicativity},
      {4, "pairing round trip", 100, 1e-8, 0.0, round_trip},
      {5, "negative pairing instance", 1, 0.0, 1.0, negative_instance},
      {6, "every multiplier is trivial", 100, 1e-10, 5.0, trivial_multipliers},
      {7, "dilation map consistency", 50, 1e-8, 0.0, dilation_consistency},
      {8, "commutant via dilation", 50, 1e-8, 30.0, dilation_pipeline},
      {9, "cocycle link", 50, 1e-8, 0.0, cocycle_equivalence},
      {10, "Bhat system of automorphisms", 50, 1e-10, 0.0, bhat_trivial},
      {11, "restriction symmetry", 200, 0.0, 0.0, restriction},
      {12, "multiplier group laws", 20, 1e-12, 0.0, group_laws},
  };
}

CaseOutcome guarded(const Criterion& c, std::uint64_t seed) {
  try {
    return c.run(seed);
  } catch (const Error& e) {
    return {e.residual() > 0 ? e.residual() : kInf, false, e.what()};
  } catch (const std::exception& e) {
    return {kInf, false, e.what()};
  }
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> all = make_criteria();
  return all;
}

std::uint64_t case_seed(std::uint64_t seed, int criterion, std::size_t index) {
  // splitmix64 over the triple
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(criterion) * 1000003ULL + index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<CriterionReport> run_selftest(const SelftestOptions& opt) {
  std::vector<CriterionReport> out;
  for (const Criterion& c : acceptance_criteria()) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end()) continue;
    CriterionReport r;
    r.id = c.id;
    r.name = c.name;
    r.tolerance = c.tolerance;
    r.time_limit = c.time_limit;
    r.cases = static_cast<std::size_t>(std::llround(double(c.cases) * std::max(0.0, opt.scale)));
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < r.cases; ++i) {
      const std::uint64_t s = case_seed(opt.seed, c.id, i);
      const CaseOutcome o = guarded(c, s);
      r.worst = std::max(r.worst, o.residual);
      if (!o.ok && !r.failure) r.failure = FailedCase{c.id, i, s, o.residual, o.note};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = !r.failure && (c.time_limit == 0.0 || r.seconds <= c.time_limit);
    out.push_back(std::move(r));
  }
  return out;
}

CaseOutcome replay_case(int criterion, std::uint64_t seed) {
  for (const Criterion& c : acceptance_criteria())
    if (c.id == criterion) return guarded(c, seed);
  fail(ErrorKind::ParseError, "no criterion " + std::to_string(criterion));
}

}  // namespace vnpair
