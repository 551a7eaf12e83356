#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srl/model.hpp"

namespace srl::dicke {

using cplx = std::complex<double>;
using SparseL = Eigen::SparseMatrix<cplx>;

/// Permutation-invariant basis |j, m> for N two-level systems. Angular
/// momentum labels are stored doubled (j2 = 2j, m2 = 2m) so half-integer
/// sectors stay exact.
class DickeSpace {
  public:
    struct JM {
        int j2, m2;
    };

    static DickeSpace make(int n_tls);

    int n_tls() const { return n_; }
    const std::vector<JM>& states() const { return states_; }
    std::size_t size() const { return states_.size(); }
    int index_of(int j2, int m2) const;  // -1 when absent

    /// Multiplicity d(N, j) of the spin-j irreducible block.
    static double degeneracy(int n_tls, int j2);

    /// j sectors present, descending (doubled).
    const std::vector<int>& j2_list() const { return j2s_; }

  private:
    int n_ = 0;
    std::vector<JM> states_;
    std::vector<int> j2s_;
};

struct CavityParams {
    double g = 0.0;      ///< same convention as the moment equations (H uses g/2)
    double kappa = 0.0;
    double delta = 0.0;
    int n_fock = 8;
};

/// Rates of the reduced master equation: collective emission plus local
/// emission, pumping and dephasing, with the cavity attached coherently.
struct OracleParams {
    double gamma_collective = 0.0;   ///< collective emission
    double gamma_local_down = 0.0;   ///< local emission
    double gamma_local_up = 0.0;     ///< local pumping (the incoherent pump eta)
    double gamma_local_phase = 0.0;  ///< local dephasing (2 chi reproduces the
                                     ///< moment-equation coherence decay)
    double n_thermal = 0.0;
    CavityParams cavity;

    /// Thermal parametrization: gamma_down = gamma0 (1 - n_T), gamma_up = gamma0 n_T.
    static OracleParams thermal(double gamma0, double n_t, const CavityParams& cav);
    void validate() const;
};

/// Block-diagonal density operator over DickeSpace x Fock: one Hermitian
/// block per j sector of dimension (2j+1) * n_fock.
class DensityState {
  public:
    using Block = Eigen::MatrixXcd;

    static DensityState excited(const DickeSpace& space, int n_fock);   // |j=N/2, m=j> x |0>
    static DensityState ground(const DickeSpace& space, int n_fock);    // |j=N/2, m=-j> x |0>
    static DensityState maximally_mixed(const DickeSpace& space, int n_fock);

    const std::vector<Block>& blocks() const { return blocks_; }
    std::vector<Block>& blocks() { return blocks_; }
    int n_fock() const { return n_fock_; }

    double trace() const;
    double hermiticity_defect() const;   // max |rho - rho^dag|
    double min_eigenvalue() const;       // over all blocks
    double photon_number() const;        // <a^dag a>
    double jz() const;                   // <J_z>
    double jpjm() const;                 // <J_+ J_->

    DensityState& hermitize();

  private:
    friend class Liouvillian;
    friend DensityState state_like(const DickeSpace&, int);
    std::vector<Block> blocks_;
    std::vector<int> block_j2_;
    int n_fock_ = 0;
};

struct LiouvillianOptions {
    std::size_t max_packed_dim = 400'000;  // memory cap on the vectorized space
};

/// Sparse superoperator over the vectorized block-diagonal state space.
class Liouvillian {
  public:
    Liouvillian(const OracleParams& op, const DickeSpace& space,
                const LiouvillianOptions& opt = {});

    const SparseL& matrix() const { return mat_; }
    const DickeSpace& space() const { return space_; }
    int n_fock() const { return nf_; }
    std::size_t packed_dim() const { return dim_; }

    DensityState apply(const DensityState& rho) const;

    Eigen::VectorXcd pack(const DensityState& rho) const;
    DensityState unpack(const Eigen::VectorXcd& v) const;

  private:
    void assemble(const OracleParams& op);

    DickeSpace space_;
    int nf_ = 0;
    std::size_t dim_ = 0;
    std::vector<int> block_offset_;  // packed offset per j block
    std::vector<int> block_rows_;    // (2j+1) * n_fock per block
    SparseL mat_;
};

struct SteadyStateInfo {
    double residual = 0.0;       // ||L rho||_inf on the full superoperator
    bool used_propagation = false;
    std::string warning;         // set when the null space looked degenerate
};

/// Steady state via a direct sparse null-space solve (trace-normalized) in the
/// excitation-conserving sector, with long-time propagation as fallback.
DensityState me_steady_state(const Liouvillian& liou, SteadyStateInfo* info = nullptr);

struct EvolveResult {
    std::vector<double> times;
    std::vector<double> n_photon;       // <a^dag a>
    std::vector<double> jz_per_atom;    // <J_z>/N
    std::vector<double> jpjm;           // <J_+ J_->
    DensityState final_state;
};

struct MeEvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    bool check_invariants = true;  // trace/hermiticity/positivity at samples
    std::size_t max_steps = 50'000'000;
};

EvolveResult me_evolve(const Liouvillian& liou, const DensityState& rho0,
                       const std::vector<double>& t_grid, const MeEvolveOptions& opt = {});

struct ComparisonRow {
    double n_atoms = 0.0;
    double eta = 0.0;       // rad/s
    double n_mft = 0.0;
    double n_me = 0.0;
    double ratio = 0.0;     // n_mft / n_me
    bool flagged = false;   // ratio outside [0.5, 2.0]
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    PhysicalParams base;
    int n_fock = 0;
};

struct CompareOptions {
    int n_fock = 12;
    unsigned workers = 0;  // 0: hardware concurrency
};

/// Steady photon number of the moment equations against the master equation
/// for each (N, eta); eta in rad/s. chi maps to local dephasing 2 chi.
ComparisonTable compare_mft_me(const PhysicalParams& base, const std::vector<double>& n_list,
                               const std::vector<double>& eta_list,
                               const CompareOptions& opt = {});

}  // namespace srl::dicke
