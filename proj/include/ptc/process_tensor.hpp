// Process-tensor matrix product operators (PT-MPOs) and their algebra:
// per-mode construction, pairwise combination in both index orders, sweep
// compression, preselection-based combination, singular-value spectra and
// the normalized tensor distance.
//
// Index conventions, fixed across the project:
//   * A step tensor Q_l has indices (d_l, d_{l-1}, alpha_out, alpha_in),
//     stored as a D^2 x D^2 array of bond matrices `blocks[a_out * D^2 +
//     a_in]` of shape (bond_out x bond_in).
//   * Boundary bonds d_0 and d_n have dimension 1.
//   * Combination forms composite bonds (e, f) with e (the bond of the
//     first operand) as the slow index.
//   * Bond bases are gauge dependent; PT-MPOs are compared through
//     tensor_distance or through propagation results, never entrywise.

#pragma once

#include <utility>
#include <vector>

#include "ptc/linalg.hpp"
#include "ptc/modes.hpp"

namespace ptc {

struct SiteTensor {
    Index liou{0};  // D^2
    Index bond_out{0};
    Index bond_in{0};
    std::vector<Matrix> blocks;  // liou * liou entries

    SiteTensor() = default;
    SiteTensor(Index liou_dim, Index out, Index in);
    Matrix& block(Index a_out, Index a_in) { return blocks[a_out * liou + a_in]; }
    const Matrix& block(Index a_out, Index a_in) const {
        return blocks[a_out * liou + a_in];
    }
};

/// Per-bond singular values retained by a sweep, one descending list per
/// interior bond l = 1..n-1.
struct BondWeights {
    std::vector<RealVector> sigmas;
};

enum class CombineOrder { normal, swapped_even_steps };

struct ProcessTensor {
    Index sys_dim{0};
    std::vector<SiteTensor> sites;
    // closures[l] closes the environment bond at position l for read-out of
    // the reduced state after step l; tracked through every gauge change.
    std::vector<RowVector> closures;

    Index steps() const { return static_cast<Index>(sites.size()); }
    Index bond(Index l) const;  // bond dimension at position l = 0..n
    Index max_bond() const;
    void validate() const;

    /// PT-MPO whose action on the outer indices is the identity channel,
    /// all bonds of dimension 1.
    static ProcessTensor identity(Index sys_dim, Index n);
};

/// PT-MPO of a single environment mode over n steps: initial-state
/// insertion at l = 1, the bare propagator at 1 < l < n, and the
/// environment trace at l = n.
ProcessTensor single_mode_pt(const EnvironmentMode& mode, Index n);

/// Combine two PT-MPOs. With order = normal, q acts after p at every
/// step; with swapped_even_steps, even steps (l = 2, 4, ...) contract the
/// outer indices in the opposite order, which realizes the symmetric
/// Trotter splitting over pairs of steps. Bond dimensions multiply.
ProcessTensor combine(const ProcessTensor& q, const ProcessTensor& p,
                      CombineOrder order = CombineOrder::normal);

/// n_sweeps pairs of forward-then-backward truncating (zip-up) sweeps.
/// Returns the compressed PT-MPO and the final backward sweep's singular
/// values per bond.
std::pair<ProcessTensor, BondWeights> sweep_compress(ProcessTensor q,
                                                     double epsilon,
                                                     int n_sweeps);

/// Combine with preselection: independent truncating forward sweeps on q
/// and p record per-bond singular values; the backward sweep over the
/// conceptual combined MPO materializes, at each bond, only composite
/// indices (e, f) with sigma1_e * sigma2_f >= eps * sigma1_0 * sigma2_0
/// before the truncating SVD.
ProcessTensor combine_preselect(const ProcessTensor& q, const ProcessTensor& p,
                                double epsilon,
                                CombineOrder order = CombineOrder::normal);

/// Normalized distance d(a,b) = (<a|a> + <b|b> - 2 Re<a|b>) /
/// sqrt(<a|a><b|b>) with the overlap contracted over the outer bonds.
/// May be slightly negative from cancellation near convergence; the raw
/// value is returned unclamped.
double tensor_distance(const ProcessTensor& a, const ProcessTensor& b);

/// Singular values at interior bond l (1 <= l <= n-1) after bringing the
/// MPO to canonical form with non-truncating sweeps, normalized by the
/// largest value.
RealVector sv_spectrum(ProcessTensor q, Index l);

// ---- sweep internals, exposed for the schedulers and tests ------------

void forward_sweep(ProcessTensor& q, double epsilon, BondWeights* record);
void backward_sweep(ProcessTensor& q, double epsilon, BondWeights* record);

/// Composite indices (e, f), e slow, passing the preselection product
/// rule; always contains (0, 0).
std::vector<Index> preselect_keep(const RealVector& s1, const RealVector& s2,
                                  double epsilon);

/// Lazily materialized combined sites, so schedulers can fuse combination
/// with the first forward sweep instead of holding the full uncompressed
/// product MPO in memory.
class SiteSource {
public:
    virtual ~SiteSource() = default;
    virtual Index steps() const = 0;
    virtual Index sys_dim() const = 0;
    virtual SiteTensor site(Index l) const = 0;          // 1-based
    virtual RowVector closure(Index l) const = 0;        // bond l = 0..n

    /// site(l) with `carry` contracted into the in-bond. Sources with
    /// Kronecker structure override this to avoid materializing the raw
    /// composite tensor.
    virtual SiteTensor site_absorbed(Index l, const Matrix& carry) const;
};

/// Eq.-style pairwise combination as a lazy source.
class CombineSource final : public SiteSource {
public:
    CombineSource(const ProcessTensor& q, const ProcessTensor& p,
                  CombineOrder order);
    Index steps() const override;
    Index sys_dim() const override;
    SiteTensor site(Index l) const override;
    RowVector closure(Index l) const override;

private:
    const ProcessTensor& q_;
    const ProcessTensor& p_;
    CombineOrder order_;
};

/// Symmetric inclusion of one additional mode into an existing PT-MPO:
/// the mode's half-step propagators multiply the current PT-MPO from the
/// left and from the right within every time step.
class SandwichSource final : public SiteSource {
public:
    SandwichSource(const EnvironmentMode& mode, const ProcessTensor& p);
    Index steps() const override;
    Index sys_dim() const override;
    SiteTensor site(Index l) const override;
    RowVector closure(Index l) const override;

private:
    const EnvironmentMode& mode_;
    const ProcessTensor& p_;
    std::vector<Matrix> half_blocks_;  // mode half propagator as bond blocks
    Matrix insert_;                    // half propagator times state insertion
    Matrix traced_;                    // environment trace times half propagator
    RowVector mode_trace_;
    Index liou_;
    Index mode_liou_;
};

/// Fused combine-and-compress: zip-up forward sweep over the lazily
/// materialized sites, then a backward sweep, then n_sweeps-1 further
/// full sweep pairs. Numerically identical to materializing the
/// combination followed by sweep_compress.
std::pair<ProcessTensor, BondWeights> zipup_compress(const SiteSource& src,
                                                     double epsilon,
                                                     int n_sweeps);

}  // namespace ptc
