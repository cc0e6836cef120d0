#ifndef QLH_PF_HPP
#define QLH_PF_HPP

#include <qlh/diffop.hpp>

namespace qlh {

// Directional derivative z d_v for a divisor v = h, xi, or a combination
// with pullback classes, expanded over the coordinate directions.
inline DiffOp zd_a(const Scenario& sc, int i) {
    DiffOp op = DiffOp::d_t1();
    for (int g = 0; g < sc.base.ngens; ++g)
        if (sc.degF[i][g])
            op = op + Rational(sc.degF[i][g]) *
                          DiffOp::d_base(sc.base.divisor_gens[g], sc.base.rank);
    return op;
}

inline DiffOp zd_b(const Scenario& sc, int i) {
    DiffOp op = DiffOp::d_t2() - DiffOp::d_t1();
    for (int g = 0; g < sc.base.ngens; ++g)
        if (sc.degFp[i][g])
            op = op + Rational(sc.degFp[i][g]) *
                          DiffOp::d_base(sc.base.divisor_gens[g], sc.base.rank);
    return op;
}

struct PFSystem {
    DiffOp box_ell;
    DiffOp box_gamma;  // empty for a single projective bundle
};

inline DiffOp pf_product_A(const Scenario& sc) {
    DiffOp p = DiffOp::identity();
    for (int i = 0; i <= sc.r; ++i) p = p.compose(zd_a(sc, i));
    return p;
}
inline DiffOp pf_product_B(const Scenario& sc) {
    DiffOp p = DiffOp::identity();
    for (int i = 0; i <= sc.r; ++i) p = p.compose(zd_b(sc, i));
    return p;
}

inline PFSystem build_pf(const Scenario& sc) {
    PFSystem pf;
    DiffOp PA = pf_product_A(sc);
    if (sc.kind == BundleKind::SingleBundle) {
        pf.box_ell = PA - DiffOp(Coeff::q1());
        return pf;
    }
    DiffOp PB = pf_product_B(sc);
    pf.box_ell = PA - Coeff::q1() * PB;
    pf.box_gamma = DiffOp::d_t2().compose(PB) - DiffOp(Coeff::q2());
    return pf;
}

// D_beta(z) = D^A D^B D^C for an admissible one-cycle beta.
inline DiffOp lift_operator(const Scenario& sc, const CurveClass& beta) {
    CurveOps ops = sc.curves();
    if (!ops.admissible(beta)) throw std::invalid_argument("lift operator needs an admissible class");
    LengthData L = ops.lengths(beta);
    DiffOp D = DiffOp::identity();
    for (int i = 0; i <= sc.r; ++i)
        for (int m = 0; m < L.n[i]; ++m)
            D = D.compose(zd_a(sc, i) - Rational(m) * DiffOp(Coeff::z(1)));
    if (sc.kind == BundleKind::DoubleBundle) {
        for (int i = 0; i <= sc.r; ++i)
            for (int m = 0; m < L.np[i]; ++m)
                D = D.compose(zd_b(sc, i) - Rational(m) * DiffOp(Coeff::z(1)));
        for (int m = 0; m < L.np_last; ++m)
            D = D.compose(DiffOp::d_t2() - Rational(m) * DiffOp(Coeff::z(1)));
    }
    return D;
}

// Lifted base QDE relation for the pair of base directions (i, j):
// z d_i z d_j I = sum_k Cbar^k_{ij,0} z d_k I
//              + sum_{beta != 0} q^{beta*} e^{D.beta*} Cbar^k_{ij,beta} z d_k D_{beta*}(z) I.
inline DiffOp lifted_qde_relation(const Scenario& sc, int i, int j) {
    const BaseAlgebra& B = sc.base;
    CurveOps ops = sc.curves();
    DiffOp R;
    const CohClass& cup = B.mult[i][j];
    for (int k = 0; k < B.rank; ++k)
        if (!is_zero(cup[k])) R = R + cup[k] * DiffOp::d_base(k, B.rank);
    for (const auto& e : B.qde) {
        if (!((e.i == i && e.j == j) || (e.i == j && e.j == i))) continue;
        CurveClass lift = sc.flags.twisted_lift ? ops.twisted_lift(e.beta_bar)
                                                : ops.i_minimal_lift(e.beta_bar);
        DiffOp D = lift_operator(sc, lift);
        CoeffMono mono;
        mono.q2exp = lift.d2;
        mono.qbar = e.beta_bar;
        RatFunc q1pow = lift.d >= 0 ? RatFunc(Poly::x(lift.d))
                                    : RatFunc(Poly(Rational(1)), Poly::x(-lift.d));
        Coeff nov = Coeff::term(mono, RatFunc(e.value) * q1pow);
        R = R + nov * DiffOp::d_base(e.k, B.rank).compose(D);
    }
    return R;
}

// Rewrites operators into the canonical frame: h-power <= r, xi-power
// <= r+1, at most one base derivative. Implements the boundary reductions
// of the Picard-Fuchs system plus the lifted QDE, truncated in the base
// Novikov order.
class Reducer {
  public:
    explicit Reducer(const Scenario& sc) : sc_(&sc) {
        sigma_ = (sc.r % 2 == 0) ? -1 : 1;
        DiffOp PA = pf_product_A(sc);
        EA_ = PA - DiffOp::mono(DerivMono{sc.r + 1, 0, {}});
        if (sc.kind == BundleKind::DoubleBundle) {
            DiffOp PB = pf_product_B(sc);
            EB_ = PB - Rational(sigma_) * DiffOp::mono(DerivMono{sc.r + 1, 0, {}});
            EC_ = DiffOp::d_t2().compose(PB) - DiffOp::mono(DerivMono{0, sc.r + 2, {}});
            // Dh^{r+1} = f E_B - (1 + sigma f) E_A
            RatFunc f = RatFunc::f_basic(sc.r);
            rule_h_ = Coeff(f) * EB_ - Coeff(RatFunc(Rational(1)) + RatFunc(Rational(sigma_)) * f) * EA_;
            rule_xi_ = DiffOp(Coeff::q2()) - EC_;
        } else {
            rule_h_ = DiffOp(Coeff::q1()) - EA_;
        }
    }

    bool canonical(const DerivMono& m) const {
        if (m.base_degree() > 1 || m.l > sc_->r) return false;
        int mmax = sc_->kind == BundleKind::DoubleBundle ? sc_->r + 1 : 0;
        return m.m <= mmax;
    }

    DiffOp canonicalize(const DiffOp& op) const {
        std::map<DerivMono, Coeff> work(op.terms().begin(), op.terms().end());
        DiffOp done;
        long guard = 0;
        while (!work.empty()) {
            if (++guard > 2000000)
                throw std::logic_error("rewrite watchdog tripped; termination argument violated");
            auto it = std::prev(work.end());
            DerivMono m = it->first;
            Coeff c = it->second.truncate_qbar(sc_->flags.weight_bound);
            work.erase(it);
            if (c.is_zero()) continue;
            DiffOp replaced;
            if (sc_->kind == BundleKind::DoubleBundle && m.m >= sc_->r + 2) {
                DerivMono w{m.l, m.m - (sc_->r + 2), m.base};
                replaced = DiffOp::mono(w).compose(rule_xi_);
            } else if (m.l >= sc_->r + 1 && m.m >= 1) {
                DerivMono w{m.l - (sc_->r + 1), 0, m.base};
                replaced = DiffOp::mono(w).compose(closeup(m.m));
            } else if (m.l >= sc_->r + 1) {
                DerivMono w{m.l - (sc_->r + 1), 0, m.base};
                replaced = DiffOp::mono(w).compose(rule_h_);
            } else if (m.base_degree() >= 2) {
                int g1 = -1, g2 = -1;
                for (size_t g = 0; g < m.base.size(); ++g) {
                    if (m.base[g] >= 2 && g1 < 0) {
                        g1 = g2 = static_cast<int>(g);
                        break;
                    }
                    if (m.base[g] >= 1) {
                        if (g1 < 0)
                            g1 = static_cast<int>(g);
                        else if (g2 < 0) {
                            g2 = static_cast<int>(g);
                            break;
                        }
                    }
                }
                DerivMono w = m;
                w.base[g1] -= 1;
                w.base[g2] -= 1;
                replaced = DiffOp::mono(w).compose(lifted_qde_relation(*sc_, g1 + 1, g2 + 1));
            } else {
                done.add(m, c);
                continue;
            }
            DiffOp expanded = DiffOp(c).compose(replaced);
            for (auto& [nm, nc] : expanded.terms()) {
                Coeff t = nc.truncate_qbar(sc_->flags.weight_bound);
                if (t.is_zero()) continue;
                auto jt = work.find(nm);
                if (jt == work.end())
                    work[nm] = t;
                else {
                    jt->second += t;
                    if (jt->second.is_zero()) work.erase(jt);
                }
            }
        }
        return done;
    }

    // (z d_{t1})^a (z d_{t2})^b reduced modulo the Picard-Fuchs ideal.
    // Monomials already in the canonical range are returned unchanged.
    DiffOp reduce_power(int a, int b) const {
        return canonicalize(DiffOp::mono(DerivMono{a, b, {}}));
    }

  private:
    DiffOp closeup(int j) const {
        // Dh^{r+1} Dxi^j = q1 q2 (Dxi + z)^{j-1} - Dxi^j E_A
        DiffOp shifted = DiffOp::identity();
        for (int t = 0; t < j - 1; ++t)
            shifted = shifted.compose(DiffOp::d_t2() + DiffOp(Coeff::z(1)));
        DiffOp out = (Coeff::q1() * Coeff::q2()) * shifted;
        out = out - DiffOp::mono(DerivMono{0, j, {}}).compose(EA_);
        return out;
    }

    const Scenario* sc_;
    int sigma_ = 1;
    DiffOp EA_, EB_, EC_;
    DiffOp rule_h_, rule_xi_;
};

struct PFCheckReport {
    bool pass = true;
    std::vector<CurveClass> failing;
    std::vector<CurveClass> boundary;  // classes whose check is inconclusive
    int checked = 0;
};

// Verifies box_ell I = 0 (and box_gamma I = 0) exactly on the truncation.
inline PFCheckReport pf_check_operator(const DiffOp& op, const SeriesI& I) {
    PFCheckReport rep;
    ApplyResult res = apply_diffop(op, I);
    for (const CurveClass& b : I.box_classes()) {
        if (res.masked.count(b)) {
            rep.boundary.push_back(b);
            continue;
        }
        ++rep.checked;
        if (!res.at(b).is_zero()) {
            rep.pass = false;
            rep.failing.push_back(b);
        }
    }
    return rep;
}

struct FlopPFReport {
    bool ell_identity = false;
    bool gamma_identity = false;
    std::string detail;
};

// T box_ell = -q^{-ell'} e^{t1} box_ell' and
// T box_gamma = z d_xi' box_ell' + q^{ell'} e^{-t1} box_gamma', as exact
// normal-ordered operator identities.
inline FlopPFReport flop_pf_identities(const Scenario& sc) {
    if (sc.kind != BundleKind::DoubleBundle)
        throw std::domain_error("flop identities need double bundle data");
    Scenario scp = sc.flop_partner();
    PFSystem pf = build_pf(sc);
    PFSystem pfp = build_pf(scp);
    FlopPFReport rep;

    DiffOp lhs_ell = pf.box_ell.flop_substitute();
    DiffOp rhs_ell = Coeff::q1(-1) * pfp.box_ell;
    rep.ell_identity = (lhs_ell == -rhs_ell);

    DiffOp lhs_gamma = pf.box_gamma.flop_substitute();
    DiffOp rhs_gamma = DiffOp::d_t2().compose(pfp.box_ell) + Coeff::q1(1) * pfp.box_gamma;
    rep.gamma_identity = (lhs_gamma == rhs_gamma);

    if (!rep.ell_identity) rep.detail += "ell identity failed; ";
    if (!rep.gamma_identity) rep.detail += "gamma identity failed; ";
    return rep;
}

}  // namespace qlh

#endif
