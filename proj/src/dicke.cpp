#include "srl/dicke.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "detail/pool.hpp"
#include "srl/meanfield.hpp"

namespace srl::dicke {

namespace {

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / i;
    return std::round(v);
}

// Clebsch-Gordan amplitudes for |j'', mu> built from an (N-1)-spin block j1
// and one spin-1/2:  |j'', mu> = a |j1, mu-1/2>|up> + b |j1, mu+1/2>|down>.
double cg_a(int jpp2, int j12, int mu2) {
    const double j1 = 0.5 * j12, mu = 0.5 * mu2;
    if (jpp2 == j12 + 1) return std::sqrt(std::max(0.0, (j1 + mu + 0.5) / (2.0 * j1 + 1.0)));
    return -std::sqrt(std::max(0.0, (j1 - mu + 0.5) / (2.0 * j1 + 1.0)));
}

double cg_b(int jpp2, int j12, int mu2) {
    const double j1 = 0.5 * j12, mu = 0.5 * mu2;
    if (jpp2 == j12 + 1) return std::sqrt(std::max(0.0, (j1 - mu + 0.5) / (2.0 * j1 + 1.0)));
    return std::sqrt(std::max(0.0, (j1 + mu + 0.5) / (2.0 * j1 + 1.0)));
}

double jm_lower(int j2, int m2) {  // <j,m-1| J- |j,m> = sqrt((j+m)(j-m+1))
    const double j = 0.5 * j2, m = 0.5 * m2;
    return std::sqrt(std::max(0.0, (j + m) * (j - m + 1.0)));
}

double jm_raise(int j2, int m2) {  // <j,m+1| J+ |j,m> = sqrt((j-m)(j+m+1))
    const double j = 0.5 * j2, m = 0.5 * m2;
    return std::sqrt(std::max(0.0, (j - m) * (j + m + 1.0)));
}

}  // namespace

DickeSpace DickeSpace::make(int n_tls) {
    if (n_tls < 1) throw ConfigError("DickeSpace: need at least one two-level system");
    DickeSpace sp;
    sp.n_ = n_tls;
    for (int j2 = n_tls; j2 >= (n_tls % 2 == 0 ? 0 : 1); j2 -= 2) {
        sp.j2s_.push_back(j2);
        for (int m2 = j2; m2 >= -j2; m2 -= 2) {
            sp.states_.push_back({j2, m2});
        }
    }
    return sp;
}

int DickeSpace::index_of(int j2, int m2) const {
    // blocks stored j descending, m descending within a block
    if (j2 > n_ || j2 < 0 || (n_ - j2) % 2 != 0) return -1;
    if (m2 > j2 || m2 < -j2 || (j2 - m2) % 2 != 0) return -1;
    int offset = 0;
    for (int b2 = n_; b2 > j2; b2 -= 2) offset += b2 + 1;
    return offset + (j2 - m2) / 2;
}

double DickeSpace::degeneracy(int n_tls, int j2) {
    if (j2 < 0 || j2 > n_tls || (n_tls - j2) % 2 != 0) return 0.0;
    const int k = (n_tls - j2) / 2;
    return binom(n_tls, k) - binom(n_tls, k - 1);
}

OracleParams OracleParams::thermal(double gamma0, double n_t, const CavityParams& cav) {
    if (gamma0 < 0.0 || n_t < 0.0 || n_t > 1.0) {
        throw ConfigError("OracleParams::thermal: need gamma0 >= 0 and n_T in [0, 1]");
    }
    OracleParams op;
    op.gamma_local_down = gamma0 * (1.0 - n_t);
    op.gamma_local_up = gamma0 * n_t;
    op.n_thermal = n_t;
    op.cavity = cav;
    op.validate();
    return op;
}

void OracleParams::validate() const {
    for (double r : {gamma_collective, gamma_local_down, gamma_local_up, gamma_local_phase,
                     n_thermal, cavity.g, cavity.kappa}) {
        if (!std::isfinite(r) || r < 0.0) {
            throw ConfigError("OracleParams: rates must be finite and non-negative");
        }
    }
    if (!std::isfinite(cavity.delta)) throw ConfigError("OracleParams: delta must be finite");
    if (cavity.n_fock < 2) throw ConfigError("OracleParams: n_fock must be >= 2");
}

// ---------------------------------------------------------------------------
// DensityState

DensityState DensityState::excited(const DickeSpace& space, int n_fock) {
    DensityState st;
    st.n_fock_ = n_fock;
    for (int j2 : space.j2_list()) {
        const int rows = (j2 + 1) * n_fock;
        st.block_j2_.push_back(j2);
        st.blocks_.emplace_back(Block::Zero(rows, rows));
    }
    // |j = N/2, m = +j> is the first basis state of the first block, Fock 0
    st.blocks_.front()(0, 0) = 1.0;
    return st;
}

DensityState DensityState::ground(const DickeSpace& space, int n_fock) {
    DensityState st = excited(space, n_fock);
    st.blocks_.front()(0, 0) = 0.0;
    const int j2 = space.j2_list().front();
    st.blocks_.front()(j2 * n_fock, j2 * n_fock) = 1.0;  // m = -j, Fock 0
    return st;
}

DensityState DensityState::maximally_mixed(const DickeSpace& space, int n_fock) {
    DensityState st = excited(space, n_fock);
    st.blocks_.front()(0, 0) = 0.0;
    double dim = 0.0;
    for (const auto& b : st.blocks_) dim += static_cast<double>(b.rows());
    for (auto& b : st.blocks_) {
        b.setIdentity();
        b *= 1.0 / dim;
    }
    return st;
}

double DensityState::trace() const {
    double tr = 0.0;
    for (const auto& b : blocks_) tr += b.trace().real();
    return tr;
}

double DensityState::hermiticity_defect() const {
    double d = 0.0;
    for (const auto& b : blocks_) {
        d = std::max(d, (b - b.adjoint()).cwiseAbs().maxCoeff());
    }
    return d;
}

double DensityState::min_eigenvalue() const {
    double mn = 0.0;
    for (const auto& b : blocks_) {
        Eigen::SelfAdjointEigenSolver<Block> es(0.5 * (b + b.adjoint()),
                                                Eigen::EigenvaluesOnly);
        mn = std::min(mn, es.eigenvalues().minCoeff());
    }
    return mn;
}

double DensityState::photon_number() const {
    double n = 0.0;
    for (const auto& b : blocks_) {
        const int rows = static_cast<int>(b.rows());
        for (int r = 0; r < rows; ++r) n += (r % n_fock_) * b(r, r).real();
    }
    return n;
}

double DensityState::jz() const {
    double v = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const int j2 = block_j2_[k];
        const auto& b = blocks_[k];
        for (int mi = 0; mi <= j2; ++mi) {
            const double m = 0.5 * (j2 - 2 * mi);
            for (int p = 0; p < n_fock_; ++p) {
                v += m * b(mi * n_fock_ + p, mi * n_fock_ + p).real();
            }
        }
    }
    return v;
}

double DensityState::jpjm() const {
    double v = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const int j2 = block_j2_[k];
        const auto& b = blocks_[k];
        for (int mi = 0; mi <= j2; ++mi) {
            const int m2 = j2 - 2 * mi;
            const double a = jm_lower(j2, m2);
            for (int p = 0; p < n_fock_; ++p) {
                v += a * a * b(mi * n_fock_ + p, mi * n_fock_ + p).real();
            }
        }
    }
    return v;
}

DensityState& DensityState::hermitize() {
    for (auto& b : blocks_) b = 0.5 * (b + b.adjoint()).eval();
    return *this;
}

// ---------------------------------------------------------------------------
// Liouvillian

Liouvillian::Liouvillian(const OracleParams& op, const DickeSpace& space,
                         const LiouvillianOptions& opt)
    : space_(space), nf_(op.cavity.n_fock) {
    op.validate();
    std::size_t dim = 0;
    for (int j2 : space_.j2_list()) {
        const int rows = (j2 + 1) * nf_;
        block_offset_.push_back(static_cast<int>(dim));
        block_rows_.push_back(rows);
        dim += static_cast<std::size_t>(rows) * static_cast<std::size_t>(rows);
    }
    dim_ = dim;
    if (dim_ > opt.max_packed_dim) {
        std::ostringstream os;
        os << "Liouvillian: packed dimension " << dim_ << " exceeds the memory cap "
           << opt.max_packed_dim << " (N = " << space_.n_tls() << ", n_fock = " << nf_ << ")";
        throw BudgetError(os.str());
    }
    assemble(op);
}

void Liouvillian::assemble(const OracleParams& op) {
    using T = Eigen::Triplet<cplx>;
    std::vector<T> trip;
    const int nf = nf_;
    const int nb = static_cast<int>(space_.j2_list().size());
    const int n_tls = space_.n_tls();
    const cplx I{0.0, 1.0};

    auto packed = [&](int b, int r, int c) {
        return block_offset_[b] + r * block_rows_[b] + c;
    };

    using OpElems = std::vector<std::pair<std::pair<int, int>, cplx>>;

    // within-block pieces: Hamiltonian, cavity loss, collective emission
    for (int b = 0; b < nb; ++b) {
        const int j2 = space_.j2_list()[b];
        const int nm = j2 + 1;
        const int rows = block_rows_[b];

        OpElems Hop, Aop, JMop;
        auto ridx = [&](int mi, int p) { return mi * nf + p; };

        for (int mi = 0; mi < nm; ++mi) {
            const int m2 = j2 - 2 * mi;
            for (int p = 0; p < nf; ++p) {
                // H = (g/2)(a^dag J- + a J+) + delta a^dag a; the moment
                // equations use the same g, which enters here halved
                if (op.cavity.g > 0.0) {
                    const double gl = jm_lower(j2, m2);
                    if (gl != 0.0 && p + 1 < nf) {  // a^dag J-: m -> m-1, p -> p+1
                        Hop.push_back({{ridx(mi + 1, p + 1), ridx(mi, p)},
                                       0.5 * op.cavity.g * gl * std::sqrt(p + 1.0)});
                    }
                    const double gr = jm_raise(j2, m2);
                    if (gr != 0.0 && p - 1 >= 0) {  // a J+: m -> m+1, p -> p-1
                        Hop.push_back(
                            {{ridx(mi - 1, p - 1), ridx(mi, p)},
                             0.5 * op.cavity.g * gr * std::sqrt(static_cast<double>(p))});
                    }
                }
                if (op.cavity.delta != 0.0) {
                    Hop.push_back(
                        {{ridx(mi, p), ridx(mi, p)}, op.cavity.delta * static_cast<double>(p)});
                }
                if (p - 1 >= 0) {  // cavity annihilation
                    Aop.push_back(
                        {{ridx(mi, p - 1), ridx(mi, p)}, std::sqrt(static_cast<double>(p))});
                }
                const double gl = jm_lower(j2, m2);
                if (gl != 0.0) {  // collective lowering
                    JMop.push_back({{ridx(mi + 1, p), ridx(mi, p)}, gl});
                }
            }
        }

        auto add_commutator = [&](const OpElems& H) {
            for (const auto& [rc, v] : H) {
                const auto [r2, r1] = rc;  // H[r2, r1]
                for (int c = 0; c < rows; ++c) {
                    trip.emplace_back(packed(b, r2, c), packed(b, r1, c), -I * v);
                    trip.emplace_back(packed(b, c, r1), packed(b, c, r2), I * std::conj(v));
                }
            }
        };
        auto add_lindblad = [&](const OpElems& A, double rate) {
            if (rate <= 0.0) return;
            for (const auto& [rc1, v1] : A) {  // A rho A^dag
                for (const auto& [rc2, v2] : A) {
                    trip.emplace_back(packed(b, rc1.first, rc2.first),
                                      packed(b, rc1.second, rc2.second),
                                      rate * v1 * std::conj(v2));
                }
            }
            // -1/2 {A^dag A, rho}; A^dag A is diagonal for the operators used
            std::vector<double> diag(rows, 0.0);
            for (const auto& [rc, v] : A) diag[rc.second] += std::norm(v);
            for (int r = 0; r < rows; ++r) {
                for (int c = 0; c < rows; ++c) {
                    const double d = 0.5 * rate * (diag[r] + diag[c]);
                    if (d != 0.0) trip.emplace_back(packed(b, r, c), packed(b, r, c), -d);
                }
            }
        };

        add_commutator(Hop);
        add_lindblad(Aop, op.cavity.kappa);
        add_lindblad(JMop, op.gamma_collective);
    }

    // Local channels transfer weight between j blocks; the coefficients come
    // from branching one spin against the other N-1 (paths through j1 add
    // incoherently, the two CG factors within one path coherently).
    struct Channel {
        double rate;
        int dm2;   // doubled m shift: -2 emission, +2 pumping, 0 dephasing
        int kind;  // 0 down, 1 up, 2 z
    };
    const std::array<Channel, 3> channels = {{{op.gamma_local_down, -2, 0},
                                              {op.gamma_local_up, +2, 1},
                                              {op.gamma_local_phase, 0, 2}}};

    std::map<int, int> block_of_j2;
    for (int b = 0; b < nb; ++b) block_of_j2[space_.j2_list()[b]] = b;

    for (const auto& ch : channels) {
        if (ch.rate <= 0.0) continue;
        const double pref = (ch.kind == 2) ? ch.rate / 4.0 : ch.rate;
        for (int b = 0; b < nb; ++b) {
            const int j2 = space_.j2_list()[b];
            const double dj = DickeSpace::degeneracy(n_tls, j2);
            for (int j12 : {j2 - 1, j2 + 1}) {
                const double d1 = DickeSpace::degeneracy(n_tls - 1, j12);
                if (d1 <= 0.0) continue;
                for (int jpp2 : {j12 - 1, j12 + 1}) {
                    auto itb = block_of_j2.find(jpp2);
                    if (itb == block_of_j2.end()) continue;
                    const int bp = itb->second;
                    const double scale = n_tls * (d1 / dj);
                    auto weight = [&](int m2) -> double {
                        const int mu2 = m2 + ch.dm2;
                        if (std::abs(mu2) > jpp2) return 0.0;
                        if (ch.kind == 0) return cg_a(j2, j12, m2) * cg_b(jpp2, j12, mu2);
                        if (ch.kind == 1) return cg_b(j2, j12, m2) * cg_a(jpp2, j12, mu2);
                        return cg_a(j2, j12, m2) * cg_a(jpp2, j12, m2) -
                               cg_b(j2, j12, m2) * cg_b(jpp2, j12, m2);
                    };
                    for (int mi = 0; mi <= j2; ++mi) {
                        const int m2 = j2 - 2 * mi;
                        const double w1 = weight(m2);
                        if (w1 == 0.0) continue;
                        const int mpi = (jpp2 - (m2 + ch.dm2)) / 2;
                        for (int mj = 0; mj <= j2; ++mj) {
                            const int mp2 = j2 - 2 * mj;
                            const double w2 = weight(mp2);
                            if (w2 == 0.0) continue;
                            const int mpj = (jpp2 - (mp2 + ch.dm2)) / 2;
                            const double coeff = pref * scale * w1 * w2;
                            for (int p = 0; p < nf; ++p) {
                                for (int q = 0; q < nf; ++q) {
                                    trip.emplace_back(packed(bp, mpi * nf + p, mpj * nf + q),
                                                      packed(b, mi * nf + p, mj * nf + q),
                                                      coeff);
                                }
                            }
                        }
                    }
                }
            }
            // anticommutator parts close on each element of the block
            for (int mi = 0; mi <= j2; ++mi) {
                const double m = 0.5 * (j2 - 2 * mi);
                for (int mj = 0; mj <= j2; ++mj) {
                    const double mp = 0.5 * (j2 - 2 * mj);
                    double d;
                    if (ch.kind == 0) {
                        d = -0.5 * ch.rate * (n_tls + m + mp);
                    } else if (ch.kind == 1) {
                        d = -0.5 * ch.rate * (n_tls - m - mp);
                    } else {
                        d = -0.25 * ch.rate * n_tls;
                    }
                    if (d == 0.0) continue;
                    for (int p = 0; p < nf; ++p) {
                        for (int q = 0; q < nf; ++q) {
                            const int idx = packed(b, mi * nf + p, mj * nf + q);
                            trip.emplace_back(idx, idx, d);
                        }
                    }
                }
            }
        }
    }

    mat_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    mat_.setFromTriplets(trip.begin(), trip.end());
    mat_.makeCompressed();
}

Eigen::VectorXcd Liouvillian::pack(const DensityState& rho) const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_));
    for (std::size_t b = 0; b < rho.blocks().size(); ++b) {
        const auto& blk = rho.blocks()[b];
        const int rows = block_rows_[b];
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < rows; ++c) {
                v[block_offset_[b] + r * rows + c] = blk(r, c);
            }
        }
    }
    return v;
}

DensityState Liouvillian::unpack(const Eigen::VectorXcd& v) const {
    DensityState st = DensityState::excited(space_, nf_);
    st.blocks_.front()(0, 0) = 0.0;
    for (std::size_t b = 0; b < st.blocks_.size(); ++b) {
        const int rows = block_rows_[b];
        auto& blk = st.blocks_[b];
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < rows; ++c) {
                blk(r, c) = v[block_offset_[b] + r * rows + c];
            }
        }
    }
    return st;
}

DensityState Liouvillian::apply(const DensityState& rho) const {
    return unpack(mat_ * pack(rho));
}

// ---------------------------------------------------------------------------
// steady state

namespace {

// Excitation label q = (m - m') + (p - p') is conserved by every term; the
// steady state lives in q = 0.
struct SectorMap {
    std::vector<Eigen::Index> full_index;        // sector -> packed
    std::vector<Eigen::Index> sector_index;      // packed -> sector or -1
    std::vector<Eigen::Index> diagonal_members;  // sector indices with r == c
};

SectorMap q_zero_sector(const Liouvillian& liou) {
    SectorMap map;
    const auto& space = liou.space();
    const int nf = liou.n_fock();
    map.sector_index.assign(liou.packed_dim(), -1);
    Eigen::Index packed = 0;
    for (int j2 : space.j2_list()) {
        const int nm = j2 + 1;
        const int rows = nm * nf;
        for (int r = 0; r < rows; ++r) {
            const int mi = r / nf, p = r % nf;
            const int m2 = j2 - 2 * mi;
            for (int c = 0; c < rows; ++c) {
                const int mj = c / nf, q = c % nf;
                const int mp2 = j2 - 2 * mj;
                const int excitation = (m2 - mp2) / 2 + (p - q);
                if (excitation == 0) {
                    map.sector_index[packed] =
                        static_cast<Eigen::Index>(map.full_index.size());
                    if (r == c) {
                        map.diagonal_members.push_back(
                            static_cast<Eigen::Index>(map.full_index.size()));
                    }
                    map.full_index.push_back(packed);
                }
                ++packed;
            }
        }
    }
    return map;
}

double max_rate(const SparseL& L) {
    double rate = 1.0;
    for (int k = 0; k < L.outerSize(); ++k) {
        for (SparseL::InnerIterator it(L, k); it; ++it) {
            rate = std::max(rate, std::abs(it.value()));
        }
    }
    return rate;
}

}  // namespace

DensityState me_steady_state(const Liouvillian& liou, SteadyStateInfo* info) {
    const SectorMap sector = q_zero_sector(liou);
    const auto sdim = static_cast<Eigen::Index>(sector.full_index.size());

    // restrict L to the sector, replacing one diagonal equation by the trace
    std::vector<Eigen::Triplet<cplx>> trip;
    const auto& L = liou.matrix();
    const Eigen::Index trace_row = sector.diagonal_members.front();
    for (int col = 0; col < L.outerSize(); ++col) {
        const Eigen::Index sc = sector.sector_index[col];
        if (sc < 0) continue;
        for (SparseL::InnerIterator it(L, col); it; ++it) {
            const Eigen::Index sr = sector.sector_index[it.row()];
            if (sr < 0 || sr == trace_row) continue;
            trip.emplace_back(sr, sc, it.value());
        }
    }
    for (Eigen::Index d : sector.diagonal_members) {
        trip.emplace_back(trace_row, d, cplx{1.0, 0.0});
    }
    SparseL Ls(sdim, sdim);
    Ls.setFromTriplets(trip.begin(), trip.end());
    Ls.makeCompressed();

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sdim);
    rhs[trace_row] = 1.0;

    SteadyStateInfo local;
    Eigen::VectorXcd x;
    Eigen::SparseLU<SparseL> lu;
    lu.compute(Ls);
    bool solved = false;
    if (lu.info() == Eigen::Success) {
        x = lu.solve(rhs);
        solved = (lu.info() == Eigen::Success) && x.allFinite();
    }
    if (!solved) {
        local.warning = "direct null-space solve failed (degenerate null space?)";
    }

    DensityState rho = DensityState::excited(liou.space(), liou.n_fock());
    const double rate = max_rate(L);
    if (solved) {
        Eigen::VectorXcd full =
            Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(liou.packed_dim()));
        for (Eigen::Index s = 0; s < sdim; ++s) full[sector.full_index[s]] = x[s];
        rho = liou.unpack(full);
        rho.hermitize();
        const double tr = rho.trace();
        if (std::abs(tr) < 1e-12) {
            solved = false;
            local.warning = "null-space vector is traceless (degenerate null space)";
        } else {
            for (auto& b : rho.blocks()) b /= tr;
            const Eigen::VectorXcd resid = L * liou.pack(rho);
            local.residual = resid.cwiseAbs().maxCoeff();
            if (local.residual > 1e-8 * rate) {
                solved = false;
                local.warning = "null-space residual too large; using propagation";
            }
        }
    }
    if (!solved) {
        local.used_propagation = true;
        DensityState r0 = DensityState::maximally_mixed(liou.space(), liou.n_fock());
        double t_end = 50.0 / rate;
        double prev = -1.0;
        for (int iter = 0; iter < 24; ++iter) {
            const auto res = me_evolve(liou, r0, {t_end});
            r0 = res.final_state;
            const double n = res.n_photon.back();
            if (prev >= 0.0 && std::abs(n - prev) <= 1e-9 * std::max(1.0, std::abs(n))) break;
            prev = n;
            t_end *= 2.0;
        }
        rho = r0;
        rho.hermitize();
        const Eigen::VectorXcd resid = L * liou.pack(rho);
        local.residual = resid.cwiseAbs().maxCoeff();
    }
    if (info) *info = local;
    return rho;
}

// ---------------------------------------------------------------------------
// evolution

namespace {

struct MeSystem {
    const Liouvillian* liou;
    Eigen::Index dim;
};

int me_rhs(double, const double* y, double* dydt, void* params) {
    const auto* s = static_cast<const MeSystem*>(params);
    const Eigen::Map<const Eigen::VectorXcd> v(reinterpret_cast<const cplx*>(y), s->dim);
    Eigen::Map<Eigen::VectorXcd> out(reinterpret_cast<cplx*>(dydt), s->dim);
    out = s->liou->matrix() * v;
    return GSL_SUCCESS;
}

}  // namespace

EvolveResult me_evolve(const Liouvillian& liou, const DensityState& rho0,
                       const std::vector<double>& t_grid, const MeEvolveOptions& opt) {
    if (t_grid.empty()) throw ConfigError("me_evolve: empty time grid");
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > t_grid[k - 1])) {
            throw ConfigError("me_evolve: time grid must be strictly increasing");
        }
    }
    gsl_set_error_handler_off();
    MeSystem sys{&liou, static_cast<Eigen::Index>(liou.packed_dim())};
    gsl_odeiv2_system gsys{&me_rhs, nullptr, 2 * liou.packed_dim(), &sys};
    gsl_odeiv2_driver* drv =
        gsl_odeiv2_driver_alloc_y_new(&gsys, gsl_odeiv2_step_rkf45, 1e-9, opt.atol, opt.rtol);
    gsl_odeiv2_driver_set_nmax(drv, static_cast<unsigned long>(opt.max_steps));

    Eigen::VectorXcd v0 = liou.pack(rho0);
    std::vector<double> y(reinterpret_cast<double*>(v0.data()),
                          reinterpret_cast<double*>(v0.data()) + 2 * liou.packed_dim());

    EvolveResult result;
    double t = 0.0;
    for (double ts : t_grid) {
        if (ts > t) {
            const int status = gsl_odeiv2_driver_apply(drv, &t, ts, y.data());
            if (status != GSL_SUCCESS) {
                gsl_odeiv2_driver_free(drv);
                throw NumericalError(std::string("me_evolve: ") + gsl_strerror(status) +
                                     " at t = " + std::to_string(t));
            }
        }
        Eigen::Map<const Eigen::VectorXcd> vm(reinterpret_cast<const cplx*>(y.data()),
                                              sys.dim);
        DensityState st = liou.unpack(vm);
        if (opt.check_invariants) {
            if (std::abs(st.trace() - 1.0) > 1e-7) {
                gsl_odeiv2_driver_free(drv);
                throw NumericalError("me_evolve: trace drifted beyond tolerance at t = " +
                                     std::to_string(ts));
            }
            if (st.hermiticity_defect() > 1e-8) {
                gsl_odeiv2_driver_free(drv);
                throw NumericalError("me_evolve: hermiticity lost at t = " +
                                     std::to_string(ts));
            }
            if (st.min_eigenvalue() < -1e-6) {
                gsl_odeiv2_driver_free(drv);
                throw NumericalError(
                    "me_evolve: positivity violated (Fock truncation too small?) at t = " +
                    std::to_string(ts));
            }
        }
        result.times.push_back(ts);
        result.n_photon.push_back(st.photon_number());
        result.jz_per_atom.push_back(st.jz() / liou.space().n_tls());
        result.jpjm.push_back(st.jpjm());
        if (ts == t_grid.back()) result.final_state = std::move(st);
    }
    gsl_odeiv2_driver_free(drv);
    return result;
}

// ---------------------------------------------------------------------------
// MFT comparison

ComparisonTable compare_mft_me(const PhysicalParams& base, const std::vector<double>& n_list,
                               const std::vector<double>& eta_list,
                               const CompareOptions& opt) {
    ComparisonTable table;
    table.base = base;
    table.n_fock = opt.n_fock;
    table.rows.resize(n_list.size() * eta_list.size());
    detail::parallel_for_index(table.rows.size(), opt.workers, [&](std::size_t idx) {
        const std::size_t i = idx / eta_list.size();
        const std::size_t k = idx % eta_list.size();
        ComparisonRow row;
        row.n_atoms = n_list[i];
        row.eta = eta_list[k];
        PhysicalParams p = base;
        p.eta = eta_list[k];
        p.n_atoms = n_list[i];
        row.n_mft = steady_state(p).n_photon;

        OracleParams op;
        op.gamma_local_down = p.gamma;
        op.gamma_local_up = p.eta;
        op.gamma_local_phase = 2.0 * p.chi;
        op.cavity = {p.g, p.kappa, p.delta, opt.n_fock};
        const int n_int = static_cast<int>(std::lround(n_list[i]));
        const auto space = DickeSpace::make(n_int);
        const Liouvillian liou(op, space);
        row.n_me = me_steady_state(liou).photon_number();
        row.ratio = row.n_mft / std::max(row.n_me, 1e-300);
        row.flagged = !(row.ratio >= 0.5 && row.ratio <= 2.0);
        table.rows[idx] = row;
    });
    return table;
}

}  // namespace srl::dicke
