#ifndef QLH_CONNECTION_HPP
#define QLH_CONNECTION_HPP

#include <qlh/pf.hpp>

namespace qlh {

// Coordinate directions of the system: t^1 (dual to h), t^2 (dual to xi),
// and one direction per non-identity base class.
struct Dir {
    enum Kind { T1, T2, Base } kind;
    int base_index = 0;  // base basis index for Kind::Base

    std::string name(const BaseAlgebra& B) const {
        switch (kind) {
            case T1: return "t1";
            case T2: return "t2";
            default: return "t[" + B.names[base_index] + "]";
        }
    }
};

inline std::vector<Dir> system_directions(const Scenario& sc) {
    std::vector<Dir> out;
    out.push_back({Dir::T1, 0});
    if (sc.kind == BundleKind::DoubleBundle) out.push_back({Dir::T2, 0});
    for (int i = 1; i < sc.base.rank; ++i) out.push_back({Dir::Base, i});
    return out;
}

inline DiffOp zd_dir(const Scenario& sc, const Dir& d) {
    switch (d.kind) {
        case Dir::T1: return DiffOp::d_t1();
        case Dir::T2: return DiffOp::d_t2();
        default: return DiffOp::d_base(d.base_index, sc.base.rank);
    }
}

// Naive quantization of T_eps = Tbar_i h^l xi^m.
inline DerivMono quantization_mono(const TotalAlgebra& A, int eps) {
    const auto& b = A.basis()[eps];
    DerivMono m;
    m.l = b.l;
    m.m = b.m;
    if (b.base_i != 0) {
        m.base.assign(A.base().rank - 1, 0);
        m.base[b.base_i - 1] = 1;
    }
    return m.normalized();
}

inline DiffOp naive_quantization(const TotalAlgebra& A, int eps) {
    return DiffOp::mono(quantization_mono(A, eps));
}

using CoeffMatrix = std::vector<std::vector<Coeff>>;

inline CoeffMatrix zero_matrix(int n) { return CoeffMatrix(n, std::vector<Coeff>(n)); }

inline CoeffMatrix mat_mul(const CoeffMatrix& a, const CoeffMatrix& b, int qbar_bound) {
    int n = static_cast<int>(a.size());
    CoeffMatrix r = zero_matrix(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (a[i][k].is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                if (b[k][j].is_zero()) continue;
                r[i][j] += (a[i][k] * b[k][j]).truncate_qbar(qbar_bound);
            }
        }
    return r;
}

// First order system z d_a (d^{z eps} I) = sum_kappa C_a[kappa][eps] d^{z kappa} I,
// assembled by Picard-Fuchs reduction plus the lifted base QDE. Entries per
// base order are exact; orders above the configured bound are dropped.
struct Connection {
    const Scenario* sc = nullptr;
    std::vector<Dir> dirs;
    std::vector<CoeffMatrix> C;  // one matrix per direction

    int index_of_dir(Dir::Kind k, int base_index = 0) const {
        for (size_t i = 0; i < dirs.size(); ++i)
            if (dirs[i].kind == k && (k != Dir::Base || dirs[i].base_index == base_index))
                return static_cast<int>(i);
        throw std::out_of_range("no such direction");
    }
};

inline Connection assemble_connection(const Scenario& sc) {
    Connection conn;
    conn.sc = &sc;
    conn.dirs = system_directions(sc);
    const TotalAlgebra& A = sc.alg();
    Reducer red(sc);
    int n = A.rank();
    for (const Dir& d : conn.dirs) {
        CoeffMatrix M = zero_matrix(n);
        DiffOp zd = zd_dir(sc, d);
        for (int eps = 0; eps < n; ++eps) {
            DiffOp canon = red.canonicalize(zd.compose(naive_quantization(A, eps)));
            for (auto& [mono, coeff] : canon.terms()) {
                int base_i = 0;
                for (size_t g = 0; g < mono.base.size(); ++g)
                    if (mono.base[g]) base_i = static_cast<int>(g) + 1;
                int kappa = A.index_of(base_i, mono.l, mono.m);
                M[kappa][eps] += coeff;
            }
        }
        conn.C.push_back(std::move(M));
    }
    return conn;
}

struct SoundnessReport {
    bool pass = true;
    int checked = 0;
    std::vector<std::string> failures;
};

// Criterion: z d_a (d^{z eps} I) equals the C_a-combination of the frame,
// exactly on every box class that does not touch the boundary.
inline SoundnessReport check_system_soundness(const Connection& conn, const SeriesI& I) {
    SoundnessReport rep;
    const Scenario& sc = *conn.sc;
    const TotalAlgebra& A = sc.alg();
    for (size_t di = 0; di < conn.dirs.size(); ++di) {
        DiffOp zd = zd_dir(sc, conn.dirs[di]);
        for (int eps = 0; eps < A.rank(); ++eps) {
            DiffOp residual = zd.compose(naive_quantization(A, eps));
            for (int kappa = 0; kappa < A.rank(); ++kappa)
                residual = residual - DiffOp::mono(quantization_mono(A, kappa),
                                                   conn.C[di][kappa][eps]);
            ApplyResult res = apply_diffop(residual, I);
            for (const CurveClass& b : I.box_classes()) {
                if (res.masked.count(b)) continue;
                ++rep.checked;
                if (!res.at(b).is_zero()) {
                    rep.pass = false;
                    rep.failures.push_back(conn.dirs[di].name(sc.base) + " eps=" +
                                           std::to_string(eps) + " class d=" + std::to_string(b.d) +
                                           ",d2=" + std::to_string(b.d2));
                }
            }
        }
    }
    return rep;
}

// Modulo all Novikov variables the system must reduce to classical cup
// product by the direction class.
inline bool check_classical_limit(const Connection& conn, std::string* detail = nullptr) {
    const Scenario& sc = *conn.sc;
    const TotalAlgebra& A = sc.alg();
    for (size_t di = 0; di < conn.dirs.size(); ++di) {
        CohClass dir_class;
        switch (conn.dirs[di].kind) {
            case Dir::T1: dir_class = A.h_class(); break;
            case Dir::T2: dir_class = A.xi_class(); break;
            default: dir_class = A.base_embed(A.base().basis_class(conn.dirs[di].base_index));
        }
        for (int eps = 0; eps < A.rank(); ++eps) {
            CohClass prod = A.mul(dir_class, A.basis_class(eps));
            for (int kappa = 0; kappa < A.rank(); ++kappa) {
                if (conn.C[di][kappa][eps].constant_term() != prod[kappa]) {
                    if (detail)
                        *detail = conn.dirs[di].name(sc.base) + " entry (" + std::to_string(kappa) +
                                  "," + std::to_string(eps) + ")";
                    return false;
                }
            }
        }
    }
    return true;
}

// Theorem q-LH(3) membership, with the I-minimal-lift offset on the base
// Novikov monomials made explicit: for a monomial qbar^m q2^n the exponent
// n is bounded below by minus the lift offset of m.
inline bool entry_in_connection_ring(const Scenario& sc, const Coeff& c,
                                     std::string* detail = nullptr) {
    CurveOps ops = sc.curves();
    for (auto& [m, f] : c.terms()) {
        int floor = 0;
        for (size_t g = 0; g < m.qbar.size(); ++g) {
            if (m.qbar[g] < 0) return false;
            floor -= m.qbar[g] * ops.gen_nu(static_cast<int>(g));
        }
        if (m.zexp < 0 || m.q2exp < floor || !f.in_poly_ring_with_f(sc.r)) {
            if (detail) *detail = m.key() + " : " + f.str("q1");
            return false;
        }
    }
    return true;
}

inline bool connection_in_ring(const Connection& conn, std::string* detail = nullptr) {
    for (auto& M : conn.C)
        for (auto& row : M)
            for (auto& e : row)
                if (!entry_in_connection_ring(*conn.sc, e, detail)) return false;
    return true;
}

struct NaturalityReport {
    bool pass = true;
    std::string first_mismatch;
};

// T-invariance of the system (Theorem level): with M the frame change
// expressing the transported quantization basis in the partner's canonical
// frame, the check is
//   C'_{(a)} M + z theta_a(M) = M . (T C_a)
// entrywise over the exact coefficient ring, where C'_{(a)} applies the
// chain rule for (t1, t2) -> (-t1, t2 + t1). Multiplying through by M
// avoids inverting it and is equivalent since M = Id modulo Novikov.
inline NaturalityReport check_naturality(const Scenario& sc, int compare_bound) {
    if (sc.kind != BundleKind::DoubleBundle)
        throw std::domain_error("naturality requires double bundle data");
    Scenario scp = sc.flop_partner();
    Connection cx = assemble_connection(sc);
    Connection cu = assemble_connection(scp);
    const TotalAlgebra& A = sc.alg();
    int n = A.rank();
    int wb = sc.flags.weight_bound;

    // frame change M[kappa][eps]: transported quantization of T_eps reduced
    // in the partner engine
    Reducer redp(scp);
    CoeffMatrix M = zero_matrix(n);
    for (int eps = 0; eps < n; ++eps) {
        DiffOp top = DiffOp::mono(quantization_mono(A, eps)).flop_substitute();
        DiffOp canon = redp.canonicalize(top);
        for (auto& [mono, coeff] : canon.terms()) {
            int base_i = 0;
            for (size_t g = 0; g < mono.base.size(); ++g)
                if (mono.base[g]) base_i = static_cast<int>(g) + 1;
            M[scp.alg().index_of(base_i, mono.l, mono.m)][eps] += coeff;
        }
    }

    auto theta_entrywise = [&](const Dir& d) {
        CoeffMatrix T = zero_matrix(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                switch (d.kind) {
                    case Dir::T1: T[i][j] = M[i][j].theta_t2() - M[i][j].theta_t1(); break;
                    case Dir::T2: T[i][j] = M[i][j].theta_t2(); break;
                    default: {
                        int gen = -1;
                        for (size_t q = 0; q < sc.base.divisor_gens.size(); ++q)
                            if (sc.base.divisor_gens[q] == d.base_index) gen = static_cast<int>(q);
                        T[i][j] = gen >= 0 ? M[i][j].theta_base(gen) : Coeff();
                    }
                }
                T[i][j] = T[i][j].mul_z(1);
            }
        return T;
    };

    NaturalityReport rep;
    for (size_t di = 0; di < cx.dirs.size(); ++di) {
        const Dir& d = cx.dirs[di];
        // chain rule: d_{t1} = -d_{u1} + d_{u2}; d_{t2} = d_{u2}; base fixed
        CoeffMatrix Ca_prime = zero_matrix(n);
        auto add_scaled = [&](const CoeffMatrix& S, const Rational& s) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) Ca_prime[i][j] += s * S[i][j];
        };
        switch (d.kind) {
            case Dir::T1:
                add_scaled(cu.C[cu.index_of_dir(Dir::T1)], rat(-1));
                add_scaled(cu.C[cu.index_of_dir(Dir::T2)], rat(1));
                break;
            case Dir::T2:
                add_scaled(cu.C[cu.index_of_dir(Dir::T2)], rat(1));
                break;
            default:
                add_scaled(cu.C[cu.index_of_dir(Dir::Base, d.base_index)], rat(1));
        }
        CoeffMatrix lhs = mat_mul(Ca_prime, M, wb);
        CoeffMatrix th = theta_entrywise(d);
        CoeffMatrix tc = zero_matrix(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                lhs[i][j] += th[i][j];
                tc[i][j] = cx.C[di][i][j].flop_substitute();
            }
        CoeffMatrix rhs = mat_mul(M, tc, wb);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Coeff dd = (lhs[i][j] - rhs[i][j]).truncate_qbar(compare_bound);
                if (!dd.is_zero()) {
                    rep.pass = false;
                    if (rep.first_mismatch.empty())
                        rep.first_mismatch = d.name(sc.base) + " entry (" + std::to_string(i) +
                                             "," + std::to_string(j) + "): " + dd.str();
                }
            }
    }
    return rep;
}

}  // namespace qlh

#endif
