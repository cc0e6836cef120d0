#ifndef QLH_BIRKHOFF_HPP
#define QLH_BIRKHOFF_HPP

#include <qlh/connection.hpp>

#include <functional>

namespace qlh {

inline Weight weight_of_mono(const CoeffMono& m, int ngens) {
    Weight w;
    w.beta_s = m.qbar;
    w.beta_s.resize(ngens, 0);
    w.d2 = m.q2exp;
    return w;
}

inline Coeff coeff_weight_part(const Coeff& c, const Weight& w, int ngens) {
    std::vector<int> qb = w.beta_s;
    trim_exponents(qb);
    Coeff out;
    for (auto& [m, f] : c.terms())
        if (m.qbar == qb && m.q2exp == w.d2) out.add(m, f);
    return out;
}

// Topological enumerations of the weight cone inside the box. Two
// different tie-breaking disciplines exercise the uniqueness statement.
inline std::vector<Weight> weight_enumeration(const CurveOps& ops, int bs_bound, int d2_bound,
                                              bool reversed_ties) {
    std::vector<Weight> box = ops.weight_box(bs_bound, d2_bound);
    std::vector<Weight> out;
    std::vector<bool> used(box.size(), false);
    while (out.size() < box.size()) {
        int pick = -1;
        for (size_t i = 0; i < box.size(); ++i) {
            if (used[i]) continue;
            bool ready = true;
            for (size_t j = 0; j < box.size(); ++j)
                if (!used[j] && j != i && ops.weight_leq(box[j], box[i]) && box[j] != box[i]) {
                    ready = false;
                    break;
                }
            if (!ready) continue;
            if (pick < 0)
                pick = static_cast<int>(i);
            else if (reversed_ties)
                pick = static_cast<int>(i);  // keep scanning: take the last ready weight
        }
        if (pick < 0) throw std::logic_error("weight enumeration stalled");
        used[pick] = true;
        out.push_back(box[pick]);
    }
    return out;
}

// ---- Birkhoff factorization / generalized mirror transform (route a) ----

struct BFResult {
    const Scenario* sc = nullptr;
    std::map<Weight, DiffOp> P;            // q^w P_w, a degree-Lambda+ operator per weight
    std::map<CurveClass, CohClass> tau;    // mirror map corrections tau - t-hat per class
    SeriesI J;                             // P(z) I on the box
    std::set<Weight> resolved;
    std::set<Weight> unresolved;

    DiffOp full_P() const {
        DiffOp out = DiffOp::identity();
        for (auto& [w, op] : P)
            for (auto& [m, c] : op.terms()) out.add(m, c);
        return out;
    }
};

// Removes non-negative z powers weight by weight, subtracting the naive
// quantization of each top term (the BF/GMT recursion). Weights whose
// removal would need data outside the box are reported as unresolved.
inline BFResult bf_gmt(const SeriesI& I, bool reversed_ties = false) {
    const Scenario& sc = *I.sc;
    const TotalAlgebra& A = sc.alg();
    CurveOps ops = sc.curves();
    BFResult out;
    out.sc = &sc;

    SeriesI cur = I;
    std::set<CurveClass> invalid;

    std::vector<Weight> order =
        weight_enumeration(ops, sc.box.bs, sc.box.d2, reversed_ties);

    auto weight_classes = [&](const Weight& w) {
        std::vector<CurveClass> cls;
        for (const CurveClass& b : I.box_classes())
            if (b.beta_s == w.beta_s && b.d2 == w.d2) cls.push_back(b);
        return cls;
    };

    for (const Weight& w : order) {
        bool contaminated = false;
        for (const Weight& u : out.unresolved)
            if (ops.weight_leq(u, w)) contaminated = true;
        auto cls = weight_classes(w);
        for (const CurveClass& b : cls)
            if (invalid.count(b)) contaminated = true;

        if (w.is_origin()) {
            // I_{[0]} = e^{t-hat/z}(1 + O(1/z^{r+1})): nothing to remove
            for (const CurveClass& b : cls) {
                ZLaurent t = cur.at(b);
                if (b.d == 0) {
                    if (!(t == ZLaurent::unit(A))) contaminated = true;
                } else if (t.max_z() >= 0 && !t.is_zero()) {
                    contaminated = true;
                }
            }
            if (contaminated)
                out.unresolved.insert(w);
            else
                out.resolved.insert(w);
            continue;
        }

        DiffOp Pw;
        int rounds = 0;
        while (!contaminated) {
            int topz = INT_MIN;
            for (const CurveClass& b : cls) topz = std::max(topz, cur.at(b).max_z());
            if (topz < 0) break;
            if (++rounds > 64) throw std::logic_error("BF removal did not terminate");
            // subtract the naive quantization of the whole top-z layer
            DiffOp Ahat;
            for (const CurveClass& b : cls) {
                CohClass v = cur.at(b).at(topz, A);
                if (coh_is_zero(v)) continue;
                for (int eps = 0; eps < A.rank(); ++eps) {
                    if (is_zero(v[eps])) continue;
                    CoeffMono cm;
                    cm.zexp = topz;
                    cm.q2exp = b.d2;
                    cm.qbar = b.beta_s;
                    RatFunc q1pow = b.d >= 0 ? RatFunc(Poly::x(b.d))
                                             : RatFunc(Poly(Rational(1)), Poly::x(-b.d));
                    Ahat.add(quantization_mono(A, eps), Coeff::term(cm, RatFunc(v[eps]) * q1pow));
                }
            }
            Pw = Pw - Ahat;
            ApplyResult delta = apply_diffop(Ahat, cur);
            for (const CurveClass& b : delta.masked) invalid.insert(b);
            for (auto& [b, t] : delta.terms) {
                auto it = cur.terms.find(b);
                ZLaurent nv = (it == cur.terms.end() ? ZLaurent{} : it->second) - t;
                if (nv.is_zero())
                    cur.terms.erase(b);
                else
                    cur.terms[b] = nv;
            }
            for (const CurveClass& b : cls)
                if (invalid.count(b)) contaminated = true;
        }

        if (contaminated) {
            out.unresolved.insert(w);
            continue;
        }
        out.resolved.insert(w);
        if (!Pw.is_zero()) out.P[w] = Pw;
        // mirror map: the z^{-1} coefficient of the cleaned weight
        for (const CurveClass& b : cls) {
            CohClass t = cur.at(b).at(-1, A);
            if (!coh_is_zero(t)) out.tau[b] = t;
        }
    }

    out.J = cur;
    return out;
}

// ---- gauge transformation from the connection matrices (route b) ----

struct GaugeResult {
    const Scenario* sc = nullptr;
    std::vector<Weight> weights;         // weights solved, cone-sorted (includes scaffolding)
    std::vector<Weight> trusted;         // weights where every ancestor was available
    CoeffMatrix B, Binv;
    std::vector<CoeffMatrix> Ctilde;     // per direction of the connection
};

// Cone predecessors of a weight can exceed it in d2 by nu per unit of base
// order, so the recursion runs on a window extended by this slack.
inline int gauge_d2_slack(const Scenario& sc) {
    CurveOps ops = sc.curves();
    int numax = 0;
    for (int g = 0; g < std::max(sc.base.ngens, 0); ++g) numax = std::max(numax, ops.gen_nu(g));
    return numax * (sc.flags.weight_bound + sc.box.bs);
}

namespace detail {

inline CoeffMatrix identity_matrix(int n) {
    CoeffMatrix M = zero_matrix(n);
    for (int i = 0; i < n; ++i) M[i][i] = Coeff::one();
    return M;
}

inline CoeffMatrix weight_part(const CoeffMatrix& M, const Weight& w, int ngens) {
    int n = static_cast<int>(M.size());
    CoeffMatrix r = zero_matrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i][j] = coeff_weight_part(M[i][j], w, ngens);
    return r;
}

inline CoeffMatrix z0_part(const CoeffMatrix& M) {
    int n = static_cast<int>(M.size());
    CoeffMatrix r = zero_matrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i][j] = M[i][j].z_coefficient(0);
    return r;
}

}  // namespace detail

// Solves the cancellation equation z d_a B = B C_a - Ctilde_a B weight by
// weight and z-degree by z-degree. Each entry at weight w carries the
// single monomial qbar^{beta} q2^{d2}, so the base and t2 directions give
// the value by scalar division; every remaining direction equation,
// including the q1 Euler equation in t1, is then verified exactly.
inline GaugeResult gauge_from_connection(const Connection& conn) {
    const Scenario& sc = *conn.sc;
    const TotalAlgebra& A = sc.alg();
    CurveOps ops = sc.curves();
    int n = A.rank();
    int ngens = std::max(sc.base.ngens, 0);
    int ndir = static_cast<int>(conn.dirs.size());

    GaugeResult out;
    out.sc = &sc;
    int slack = gauge_d2_slack(sc);
    int numax = 0;
    for (int g = 0; g < ngens; ++g) numax = std::max(numax, ops.gen_nu(g));
    int trusted_d2 = sc.box.d2 + numax * sc.box.bs;
    out.weights = ops.weight_box(sc.flags.weight_bound, sc.box.d2 + slack);
    for (const Weight& w : out.weights)
        if (w.d2 <= trusted_d2) out.trusted.push_back(w);

    CoeffMatrix B = detail::identity_matrix(n);

    // z0 parts of C_a at weight origin must be the whole story there
    for (int a = 0; a < ndir; ++a) {
        CoeffMatrix w0 = detail::weight_part(conn.C[a], Weight{std::vector<int>(ngens, 0), 0}, ngens);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!w0[i][j].z_free())
                    throw std::logic_error("weight-origin connection block carries z terms");
    }

    auto theta_dir = [&](const Coeff& c, const Dir& d) {
        switch (d.kind) {
            case Dir::T1: return c.theta_t1();
            case Dir::T2: return c.theta_t2();
            default: {
                int gen = -1;
                for (size_t q = 0; q < sc.base.divisor_gens.size(); ++q)
                    if (sc.base.divisor_gens[q] == d.base_index) gen = static_cast<int>(q);
                if (gen < 0) throw std::domain_error("gauge needs divisor base directions");
                return c.theta_base(gen);
            }
        }
    };

    int wb = sc.flags.weight_bound;
    auto rhs_weight = [&](int a, const CoeffMatrix& Bcur, const std::vector<CoeffMatrix>& Ct,
                          const Weight& w) {
        // [B C_a - Ctilde_a B] at weight w
        CoeffMatrix R = zero_matrix(n);
        CoeffMatrix bc = mat_mul(Bcur, conn.C[a], wb);
        CoeffMatrix cb = mat_mul(Ct[a], Bcur, wb);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                R[i][j] = coeff_weight_part(bc[i][j] - cb[i][j], w, ngens);
        return R;
    };

    std::vector<CoeffMatrix> Ct(ndir, detail::identity_matrix(n));
    auto refresh_ct = [&](const CoeffMatrix& Bcur) {
        CoeffMatrix B0 = detail::z0_part(Bcur);
        // invert B0 weight-recursively: B0 = Id + N with N cone-positive
        CoeffMatrix B0inv = detail::identity_matrix(n);
        CoeffMatrix N = B0;
        for (int i = 0; i < n; ++i) N[i][i] -= Coeff::one();
        CoeffMatrix term = detail::identity_matrix(n);
        for (int k = 0; k < (wb + 1) * (sc.box.d2 + 2 + 2); ++k) {
            term = mat_mul(term, N, wb);
            bool all_zero = true;
            for (int i = 0; i < n && all_zero; ++i)
                for (int j = 0; j < n && all_zero; ++j)
                    if (!term[i][j].is_zero()) all_zero = false;
            if (all_zero) break;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    B0inv[i][j] += (k % 2 == 0 ? -term[i][j] : term[i][j]);
        }
        // Ctilde_a = B0 C_{a;0} B0^{-1}
        for (int a = 0; a < ndir; ++a) {
            CoeffMatrix c0 = zero_matrix(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) c0[i][j] = conn.C[a][i][j].z_coefficient(0);
            Ct[a] = mat_mul(mat_mul(B0, c0, wb), B0inv, wb);
        }
        return B0inv;
    };
    refresh_ct(B);

    for (const Weight& w : out.weights) {
        if (w.is_origin()) continue;
        // choose the solving direction: a base generator with weight, else t2
        int solve_dir = -1;
        Rational divisor;
        for (int a = 0; a < ndir && solve_dir < 0; ++a) {
            const Dir& d = conn.dirs[a];
            if (d.kind == Dir::Base) {
                int gen = -1;
                for (size_t q = 0; q < sc.base.divisor_gens.size(); ++q)
                    if (sc.base.divisor_gens[q] == d.base_index) gen = static_cast<int>(q);
                if (gen >= 0 && w.beta_s[gen] != 0) {
                    solve_dir = a;
                    divisor = Rational(w.beta_s[gen]);
                }
            }
        }
        if (solve_dir < 0 && w.d2 != 0) {
            solve_dir = static_cast<int>(conn.dirs.size());
            for (int a = 0; a < ndir; ++a)
                if (conn.dirs[a].kind == Dir::T2) solve_dir = a;
            divisor = Rational(w.d2);
        }
        if (solve_dir < 0 || solve_dir >= ndir)
            throw std::logic_error("no usable direction to integrate the gauge at this weight");

        // descending z-degrees
        CoeffMatrix R = rhs_weight(solve_dir, B, Ct, w);
        int topz = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!R[i][j].is_zero()) topz = std::max(topz, R[i][j].max_zexp());
        for (int j = topz - 1; j >= 0; --j) {
            R = rhs_weight(solve_dir, B, Ct, w);
            for (int r_ = 0; r_ < n; ++r_)
                for (int c_ = 0; c_ < n; ++c_) {
                    Coeff rc = R[r_][c_].z_coefficient(j + 1);
                    if (rc.is_zero()) continue;
                    // value = rc / divisor at z^j
                    Coeff val;
                    for (auto& [m, f] : rc.terms()) {
                        CoeffMono mm = m;
                        mm.zexp = j;
                        val += Coeff::term(mm, f / RatFunc(divisor));
                    }
                    B[r_][c_] += val;
                }
            refresh_ct(B);
        }
        refresh_ct(B);

        // all direction equations must hold exactly on trusted weights
        if (w.d2 <= trusted_d2) {
            for (int a = 0; a < ndir; ++a) {
                CoeffMatrix Ra = rhs_weight(a, B, Ct, w);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        Coeff lhs =
                            theta_dir(coeff_weight_part(B[i][j], w, ngens), conn.dirs[a]).mul_z(1);
                        if (!(lhs == Ra[i][j]))
                            throw std::logic_error(
                                "gauge integration inconsistent at weight; direction " +
                                conn.dirs[a].name(sc.base));
                    }
            }
        }
    }

    // inverse of B weight by weight: B^{-1}_w = -sum_{0<w'<=w} B_{w'} B^{-1}_{w-w'}
    CoeffMatrix Binv = detail::identity_matrix(n);
    {
        CoeffMatrix N = B;
        for (int i = 0; i < n; ++i) N[i][i] -= Coeff::one();
        CoeffMatrix term = detail::identity_matrix(n);
        for (int k = 0; k < (wb + 1) * (sc.box.d2 + 4); ++k) {
            term = mat_mul(term, N, wb);
            bool all_zero = true;
            for (int i = 0; i < n && all_zero; ++i)
                for (int j = 0; j < n && all_zero; ++j)
                    if (!term[i][j].is_zero()) all_zero = false;
            if (all_zero) break;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    Binv[i][j] += (k % 2 == 0 ? -term[i][j] : term[i][j]);
        }
    }

    out.B = B;
    out.Binv = Binv;
    refresh_ct(B);
    out.Ctilde = Ct;
    return out;
}

// Residual of the full gauge equation -z d_a B + B C_a - Ctilde_a B,
// entrywise; zero on the covered weight window when the gauge is correct.
inline bool gauge_residual_zero(const Connection& conn, const GaugeResult& g,
                                std::string* detail = nullptr) {
    const Scenario& sc = *conn.sc;
    int n = sc.alg().rank();
    int ngens = std::max(sc.base.ngens, 0);
    int wb = sc.flags.weight_bound;
    for (size_t a = 0; a < conn.dirs.size(); ++a) {
        CoeffMatrix bc = mat_mul(g.B, conn.C[a], wb);
        CoeffMatrix cb = mat_mul(g.Ctilde[a], g.B, wb);
        for (const Weight& w : g.trusted) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Coeff zd;
                    switch (conn.dirs[a].kind) {
                        case Dir::T1: zd = g.B[i][j].theta_t1(); break;
                        case Dir::T2: zd = g.B[i][j].theta_t2(); break;
                        default: {
                            int gen = -1;
                            for (size_t q = 0; q < sc.base.divisor_gens.size(); ++q)
                                if (sc.base.divisor_gens[q] == conn.dirs[a].base_index)
                                    gen = static_cast<int>(q);
                            zd = g.B[i][j].theta_base(gen);
                        }
                    }
                    Coeff res = coeff_weight_part(-zd.mul_z(1) + bc[i][j] - cb[i][j], w, ngens);
                    if (!res.is_zero()) {
                        if (detail)
                            *detail = conn.dirs[a].name(sc.base) + " (" + std::to_string(i) + "," +
                                      std::to_string(j) + "): " + res.str();
                        return false;
                    }
                }
        }
    }
    return true;
}

inline bool ctilde_z_free(const GaugeResult& g) {
    for (auto& M : g.Ctilde)
        for (auto& row : M)
            for (auto& e : row)
                if (!e.z_free()) return false;
    return true;
}

// Route agreement: the gauge computed from the connection must clean the
// actual frame of I-columns. For each eps the combination
// sum_kappa Binv[kappa][eps] d^{z kappa} I is T_eps + O(1/z) at the origin
// slot and has strictly negative z powers everywhere else.
struct RouteAgreementReport {
    bool pass = true;
    int checked = 0;
    std::string detail;
};

inline RouteAgreementReport check_route_agreement(const Connection& conn, const GaugeResult& g,
                                                  const SeriesI& I) {
    RouteAgreementReport rep;
    const Scenario& sc = *conn.sc;
    const TotalAlgebra& A = sc.alg();
    int d2hi = g.trusted.empty() ? sc.box.d2 : g.trusted.back().d2;
    for (const Weight& w : g.trusted) d2hi = std::max(d2hi, w.d2);
    auto window = [&](const Coeff& c) {
        Coeff out;
        for (auto& [m, f] : c.terms())
            if (m.q2exp <= d2hi && m.qbar_order() <= sc.flags.weight_bound) out.add(m, f);
        return out;
    };
    for (int eps = 0; eps < A.rank(); ++eps) {
        DiffOp col;
        for (int kappa = 0; kappa < A.rank(); ++kappa)
            col = col + DiffOp::mono(quantization_mono(A, kappa), window(g.Binv[kappa][eps]));
        ApplyResult V = apply_diffop(col, I);
        for (const CurveClass& b : I.box_classes()) {
            if (V.masked.count(b)) continue;
            ++rep.checked;
            ZLaurent t = V.at(b);
            if (t.is_zero()) continue;
            bool origin = b.d == 0 && b.d2 == 0 && b.base_zero();
            if (origin) {
                // exactly T_eps at z^0 plus strictly negative powers
                if (!(t.at(0, A) == A.basis_class(eps)) || t.max_z() > 0) {
                    rep.pass = false;
                    if (rep.detail.empty())
                        rep.detail = "origin slot of column " + std::to_string(eps);
                }
            } else if (t.max_z() >= 0) {
                rep.pass = false;
                if (rep.detail.empty())
                    rep.detail = "column " + std::to_string(eps) + " slot d=" +
                                 std::to_string(b.d) + ",d2=" + std::to_string(b.d2) +
                                 " keeps z^" + std::to_string(t.max_z());
            }
        }
    }
    return rep;
}

// ---- three-point invariants ---------------------------------------------

struct InvariantEntry {
    int dir;        // direction index in the connection
    int kappa, nu;  // upper and lower basis indices
    Coeff value;    // Novikov polynomial, t-hat = 0
    bool clean;     // no mirror-map correction can touch this order
};

// At t-hat = 0 the reduced connection entry Ctilde_a[kappa][nu] reads off
// sum_beta q^beta <T_a, T_nu, T^kappa>_beta at orders where the mirror map
// has no corrections below the entry weight.
inline std::vector<InvariantEntry> extract_invariants(const Connection& conn,
                                                      const GaugeResult& g,
                                                      const BFResult& bf) {
    const Scenario& sc = *conn.sc;
    CurveOps ops = sc.curves();
    int ngens = std::max(sc.base.ngens, 0);
    std::vector<Weight> tau_support;
    for (auto& [b, cls] : bf.tau) tau_support.push_back(Weight{b.beta_s, b.d2});
    auto clean_weight = [&](const Weight& w) {
        for (const Weight& t : tau_support)
            if (ops.weight_leq(t, w)) return false;
        return true;
    };
    std::vector<InvariantEntry> out;
    int n = sc.alg().rank();
    for (size_t a = 0; a < conn.dirs.size(); ++a)
        for (int k = 0; k < n; ++k)
            for (int nu = 0; nu < n; ++nu) {
                const Coeff& e = g.Ctilde[a][k][nu];
                if (e.is_zero()) continue;
                bool clean = true;
                for (auto& [m, f] : e.terms())
                    if (!clean_weight(weight_of_mono(m, ngens))) clean = false;
                out.push_back({static_cast<int>(a), k, nu, e, clean});
            }
    return out;
}

// ---- flop invariance of gauge data ---------------------------------------

struct FlopInvarianceReport {
    bool bf_pass = true;       // T tau = tau'
    bool gauge_pass = true;    // N T(B) = B' M
    std::string detail;
};

inline FlopInvarianceReport check_flop_invariance(const Scenario& sc, int compare_bound) {
    if (sc.kind != BundleKind::DoubleBundle)
        throw std::domain_error("flop invariance requires double bundle data");
    Scenario scp = sc.flop_partner();
    const TotalAlgebra& A = sc.alg();
    const TotalAlgebra& Ap = scp.alg();
    CurveOps ops = sc.curves();
    int n = A.rank();
    int wb = sc.flags.weight_bound;
    FlopInvarianceReport rep;

    // tau comparison through the correspondence
    SeriesI Ix = assemble_I(sc), Ixp = assemble_I(scp);
    BFResult bx = bf_gmt(Ix), bxp = bf_gmt(Ixp);
    for (auto& [b, cls] : bx.tau) {
        if (b.base_total() > compare_bound) continue;
        CurveClass pb = ops.flop_push(b);
        CohClass want = flop_map(A, Ap, cls);
        CohClass got = Ap.zero();
        auto it = bxp.tau.find(pb);
        if (it != bxp.tau.end()) got = it->second;
        if (!Ixp.in_box(pb)) continue;  // outside the partner window
        if (!(want == got)) {
            rep.bf_pass = false;
            if (rep.detail.empty())
                rep.detail = "tau mismatch at class (" + std::to_string(b.d) + "," +
                             std::to_string(b.d2) + ")";
        }
    }
    for (auto& [b, cls] : bxp.tau) {
        if (b.base_total() > compare_bound) continue;
        CurveClass pb = scp.curves().flop_push(b);
        if (Ix.in_box(pb) && !bx.tau.count(pb)) {
            rep.bf_pass = false;
            if (rep.detail.empty()) rep.detail = "tau' supported off the image of tau";
        }
    }

    // gauge comparison: N T(B) = B' M with N the cohomology basis change
    // and M the transported-frame reduction
    Connection cx = assemble_connection(sc);
    Connection cu = assemble_connection(scp);
    GaugeResult gx = gauge_from_connection(cx);
    GaugeResult gu = gauge_from_connection(cu);

    Reducer redp(scp);
    CoeffMatrix M = zero_matrix(n);
    for (int eps = 0; eps < n; ++eps) {
        DiffOp canon = redp.canonicalize(DiffOp::mono(quantization_mono(A, eps)).flop_substitute());
        for (auto& [mono, coeff] : canon.terms()) {
            int base_i = 0;
            for (size_t g = 0; g < mono.base.size(); ++g)
                if (mono.base[g]) base_i = static_cast<int>(g) + 1;
            M[Ap.index_of(base_i, mono.l, mono.m)][eps] += coeff;
        }
    }
    CoeffMatrix N = zero_matrix(n);
    for (int eps = 0; eps < n; ++eps) {
        CohClass img = flop_map(A, Ap, A.basis_class(eps));
        for (int k = 0; k < n; ++k)
            if (!is_zero(img[k])) N[k][eps] = Coeff(img[k]);
    }
    CoeffMatrix tb = zero_matrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tb[i][j] = gx.B[i][j].flop_substitute();
    CoeffMatrix lhs = mat_mul(N, tb, wb);
    CoeffMatrix rhs = mat_mul(gu.B, M, wb);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Coeff d = (lhs[i][j] - rhs[i][j]).truncate_qbar(compare_bound);
            if (!d.is_zero()) {
                rep.gauge_pass = false;
                if (rep.detail.empty())
                    rep.detail = "gauge mismatch at (" + std::to_string(i) + "," +
                                 std::to_string(j) + "): " + d.str();
            }
        }
    return rep;
}

}  // namespace qlh

#endif
