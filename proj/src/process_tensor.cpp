#include "ptc/process_tensor.hpp"

#include <cmath>

namespace ptc {

namespace {

// Joint Liouville index of the (system x mode) space for system Liouville
// index alpha = (s, s') and mode Liouville index d = (m, m').
inline Index joint_liou_index(Index alpha, Index d, Index sys_dim, Index mode_dim) {
    const Index s = alpha / sys_dim, sp = alpha % sys_dim;
    const Index m = d / mode_dim, mp = d % mode_dim;
    const Index joint = sys_dim * mode_dim;
    return (s * mode_dim + m) * joint + (sp * mode_dim + mp);
}

Matrix forward_unfold(const SiteTensor& t) {
    Matrix m(t.bond_out, t.liou * t.liou * t.bond_in);
    for (Index k = 0; k < t.liou * t.liou; ++k)
        m.middleCols(k * t.bond_in, t.bond_in) = t.blocks[k];
    return m;
}

Matrix backward_unfold(const SiteTensor& t) {
    Matrix m(t.liou * t.liou * t.bond_out, t.bond_in);
    for (Index k = 0; k < t.liou * t.liou; ++k)
        m.middleRows(k * t.bond_out, t.bond_out) = t.blocks[k];
    return m;
}

// One forward zip-up step at site l: truncate the out-bond, return the
// carry U*sigma to absorb into the next site, and update the closure.
void forward_step(ProcessTensor& q, Index l, double epsilon, RealVector* sig) {
    SiteTensor& t = q.sites[l - 1];
    const SvdResult svd = truncated_svd(forward_unfold(t), epsilon);
    for (Index k = 0; k < t.liou * t.liou; ++k)
        t.blocks[k] = svd.vdag.middleCols(k * t.bond_in, t.bond_in);
    t.bond_out = svd.kept;

    const Matrix carry = svd.u * svd.singular_values.asDiagonal();
    SiteTensor& next = q.sites[l];
    for (Index k = 0; k < next.liou * next.liou; ++k)
        next.blocks[k] = next.blocks[k] * carry;
    next.bond_in = svd.kept;
    q.closures[l] = q.closures[l] * carry;
    if (sig) *sig = svd.singular_values;
}

// One backward zip-up step at site l: truncate the in-bond, absorb
// sigma*Vdag into the previous site, and track the closure through the
// pseudo-inverse of the gauge change.
void backward_step(ProcessTensor& q, Index l, double epsilon, RealVector* sig) {
    SiteTensor& t = q.sites[l - 1];
    const SvdResult svd = truncated_svd(backward_unfold(t), epsilon);
    for (Index k = 0; k < t.liou * t.liou; ++k)
        t.blocks[k] = svd.u.middleRows(k * t.bond_out, t.bond_out);
    t.bond_in = svd.kept;

    const Matrix carry = svd.singular_values.asDiagonal() * svd.vdag;
    SiteTensor& prev = q.sites[l - 2];
    for (Index k = 0; k < prev.liou * prev.liou; ++k)
        prev.blocks[k] = carry * prev.blocks[k];
    prev.bond_out = svd.kept;

    RowVector c = q.closures[l - 1] * svd.vdag.adjoint();
    for (Index k = 0; k < svd.kept; ++k) {
        const double s = svd.singular_values(k);
        c(k) = s > 0.0 ? c(k) / s : Complex(0, 0);
    }
    q.closures[l - 1] = c;
    if (sig) *sig = svd.singular_values;
}

}  // namespace

SiteTensor::SiteTensor(Index liou_dim, Index out, Index in)
    : liou(liou_dim), bond_out(out), bond_in(in),
      blocks(liou_dim * liou_dim, Matrix::Zero(out, in)) {}

Index ProcessTensor::bond(Index l) const {
    if (l == 0) return sites.front().bond_in;
    return sites[l - 1].bond_out;
}

Index ProcessTensor::max_bond() const {
    Index m = 1;
    for (const auto& s : sites) m = std::max(m, s.bond_out);
    return m;
}

void ProcessTensor::validate() const {
    const Index n = steps();
    if (n == 0) throw invalid_input("ProcessTensor: no steps");
    const Index liou = sys_dim * sys_dim;
    if (sites.front().bond_in != 1 || sites.back().bond_out != 1)
        throw invalid_input("ProcessTensor: boundary bonds must have dimension 1");
    for (Index l = 0; l < n; ++l) {
        const SiteTensor& t = sites[l];
        if (t.liou != liou) throw invalid_input("ProcessTensor: outer dimension mismatch");
        if (static_cast<Index>(t.blocks.size()) != liou * liou)
            throw invalid_input("ProcessTensor: block count mismatch");
        for (const auto& b : t.blocks) {
            if (b.rows() != t.bond_out || b.cols() != t.bond_in)
                throw invalid_input("ProcessTensor: block shape mismatch");
            if (!all_finite(b)) throw invalid_input("ProcessTensor: non-finite entries");
        }
        if (l + 1 < n && t.bond_out != sites[l + 1].bond_in)
            throw invalid_input("ProcessTensor: bond chain inconsistent");
    }
    if (static_cast<Index>(closures.size()) != n + 1)
        throw invalid_input("ProcessTensor: closure count mismatch");
    for (Index l = 0; l <= n; ++l)
        if (closures[l].size() != bond(l))
            throw invalid_input("ProcessTensor: closure dimension mismatch");
}

ProcessTensor ProcessTensor::identity(Index sys_dim, Index n) {
    ProcessTensor pt;
    pt.sys_dim = sys_dim;
    const Index liou = sys_dim * sys_dim;
    pt.sites.reserve(n);
    for (Index l = 0; l < n; ++l) {
        SiteTensor t(liou, 1, 1);
        for (Index a = 0; a < liou; ++a) t.block(a, a)(0, 0) = 1.0;
        pt.sites.push_back(std::move(t));
    }
    pt.closures.assign(n + 1, RowVector::Ones(1));
    return pt;
}

ProcessTensor single_mode_pt(const EnvironmentMode& mode, Index n) {
    if (n < 1) throw invalid_input("single_mode_pt: n < 1");
    mode.validate();
    const Index d = mode.sys_dim, md = mode.mode_dim;
    const Index liou = d * d, mliou = md * md;
    const Matrix& e = mode.propagator;
    const Vector rho = vectorize(mode.initial_state);

    // Bare propagator as bond blocks.
    auto bare_block = [&](Index a, Index b) {
        Matrix blk(mliou, mliou);
        for (Index dd = 0; dd < mliou; ++dd)
            for (Index dp = 0; dp < mliou; ++dp)
                blk(dd, dp) = e(joint_liou_index(a, dd, d, md),
                                joint_liou_index(b, dp, d, md));
        return blk;
    };

    ProcessTensor pt;
    pt.sys_dim = d;
    pt.sites.reserve(n);
    for (Index l = 1; l <= n; ++l) {
        const bool first = (l == 1), last = (l == n);
        SiteTensor t(liou, last ? 1 : mliou, first ? 1 : mliou);
        for (Index a = 0; a < liou; ++a) {
            for (Index b = 0; b < liou; ++b) {
                Matrix blk = bare_block(a, b);
                if (first) blk = (blk * rho).eval();  // insert rho^E at t_0
                if (last) {
                    // Environment trace on the out-bond.
                    RowVector tr = RowVector::Zero(mliou);
                    for (Index m = 0; m < md; ++m) tr(m * md + m) = 1.0;
                    blk = (tr * blk).eval();
                }
                t.block(a, b) = blk;
            }
        }
        pt.sites.push_back(std::move(t));
    }

    pt.closures.assign(n + 1, RowVector());
    pt.closures[0] = RowVector::Ones(1);
    pt.closures[n] = RowVector::Ones(1);
    for (Index l = 1; l < n; ++l) {
        RowVector tr = RowVector::Zero(mliou);
        for (Index m = 0; m < md; ++m) tr(m * md + m) = 1.0;
        pt.closures[l] = tr;
    }
    pt.validate();
    return pt;
}

ProcessTensor combine(const ProcessTensor& q, const ProcessTensor& p,
                      CombineOrder order) {
    CombineSource src(q, p, order);
    const Index n = src.steps();
    ProcessTensor out;
    out.sys_dim = src.sys_dim();
    out.sites.reserve(n);
    for (Index l = 1; l <= n; ++l) out.sites.push_back(src.site(l));
    out.closures.resize(n + 1);
    for (Index l = 0; l <= n; ++l) out.closures[l] = src.closure(l);
    return out;
}

void forward_sweep(ProcessTensor& q, double epsilon, BondWeights* record) {
    const Index n = q.steps();
    if (record) record->sigmas.assign(n > 0 ? n - 1 : 0, RealVector());
    for (Index l = 1; l < n; ++l)
        forward_step(q, l, epsilon, record ? &record->sigmas[l - 1] : nullptr);
}

void backward_sweep(ProcessTensor& q, double epsilon, BondWeights* record) {
    const Index n = q.steps();
    if (record) record->sigmas.assign(n > 0 ? n - 1 : 0, RealVector());
    for (Index l = n; l >= 2; --l)
        backward_step(q, l, epsilon, record ? &record->sigmas[l - 2] : nullptr);
}

std::pair<ProcessTensor, BondWeights> sweep_compress(ProcessTensor q,
                                                     double epsilon,
                                                     int n_sweeps) {
    if (n_sweeps < 1) throw invalid_input("sweep_compress: n_sweeps < 1");
    BondWeights weights;
    weights.sigmas.assign(q.steps() > 0 ? q.steps() - 1 : 0, RealVector());
    for (int i = 0; i < n_sweeps; ++i) {
        forward_sweep(q, epsilon, nullptr);
        backward_sweep(q, epsilon, i + 1 == n_sweeps ? &weights : nullptr);
    }
    return {std::move(q), std::move(weights)};
}

std::vector<Index> preselect_keep(const RealVector& s1, const RealVector& s2,
                                  double epsilon) {
    std::vector<Index> keep;
    const double cut = epsilon * s1(0) * s2(0);
    for (Index e = 0; e < s1.size(); ++e)
        for (Index f = 0; f < s2.size(); ++f)
            if (s1(e) * s2(f) >= cut) keep.push_back(e * s2.size() + f);
    if (keep.empty()) keep.push_back(0);
    return keep;
}

ProcessTensor combine_preselect(const ProcessTensor& q, const ProcessTensor& p,
                                double epsilon, CombineOrder order) {
    if (q.steps() != p.steps() || q.sys_dim != p.sys_dim)
        throw invalid_input("combine_preselect: operand mismatch");
    const Index n = q.steps();
    const Index liou = q.sys_dim * q.sys_dim;

    ProcessTensor qf = q, pf = p;
    BondWeights w1, w2;
    forward_sweep(qf, epsilon, &w1);
    forward_sweep(pf, epsilon, &w2);

    // Selected composite indices per bond, boundary bonds fixed to (0, 0).
    std::vector<std::vector<Index>> sel(n + 1);
    sel[0] = {0};
    sel[n] = {0};
    for (Index l = 1; l < n; ++l)
        sel[l] = preselect_keep(w1.sigmas[l - 1], w2.sigmas[l - 1], epsilon);

    auto split = [&](const std::vector<Index>& comp, Index pdim) {
        std::vector<Index> e(comp.size()), f(comp.size());
        for (size_t i = 0; i < comp.size(); ++i) {
            e[i] = comp[i] / pdim;
            f[i] = comp[i] % pdim;
        }
        return std::make_pair(e, f);
    };

    ProcessTensor out;
    out.sys_dim = q.sys_dim;
    out.sites.assign(n, SiteTensor());
    out.closures.assign(n + 1, RowVector());
    out.closures[0] = RowVector::Ones(1);
    out.closures[n] = RowVector::Ones(1);

    Matrix carry = Matrix::Ones(1, 1);  // compressed basis <- selected composite
    for (Index l = n; l >= 1; --l) {
        const auto [e_out, f_out] = split(sel[l], pf.bond(l));
        const auto [e_in, f_in] = split(sel[l - 1], pf.bond(l - 1));
        const bool swapped =
            order == CombineOrder::swapped_even_steps && l % 2 == 0;

        // Gather the selected sub-blocks of both operands once per site.
        std::vector<Matrix> qg(liou * liou), pg(liou * liou);
        for (Index k = 0; k < liou * liou; ++k) {
            qg[k] = qf.sites[l - 1].blocks[k](e_out, e_in);
            pg[k] = pf.sites[l - 1].blocks[k](f_out, f_in);
        }

        SiteTensor t(liou, carry.rows(),
                     static_cast<Index>(sel[l - 1].size()));
        for (Index a = 0; a < liou; ++a) {
            for (Index b = 0; b < liou; ++b) {
                Matrix acc = Matrix::Zero(static_cast<Index>(sel[l].size()),
                                          static_cast<Index>(sel[l - 1].size()));
                for (Index c = 0; c < liou; ++c) {
                    if (!swapped)
                        acc += qg[a * liou + c].cwiseProduct(pg[c * liou + b]);
                    else
                        acc += qg[c * liou + b].cwiseProduct(pg[a * liou + c]);
                }
                t.block(a, b) = carry * acc;
            }
        }

        if (l > 1) {
            const SvdResult svd = truncated_svd(backward_unfold(t), epsilon);
            for (Index k = 0; k < liou * liou; ++k)
                t.blocks[k] = svd.u.middleRows(k * t.bond_out, t.bond_out);
            t.bond_in = svd.kept;
            carry = svd.singular_values.asDiagonal() * svd.vdag;

            // Closure of the new bond l-1: the selected composite closure
            // pushed through the gauge change.
            RowVector comp = RowVector::Zero(static_cast<Index>(sel[l - 1].size()));
            for (size_t i = 0; i < sel[l - 1].size(); ++i)
                comp(static_cast<Index>(i)) =
                    qf.closures[l - 1](e_in[i]) * pf.closures[l - 1](f_in[i]);
            RowVector c = comp * svd.vdag.adjoint();
            for (Index k = 0; k < svd.kept; ++k) {
                const double s = svd.singular_values(k);
                c(k) = s > 0.0 ? c(k) / s : Complex(0, 0);
            }
            out.closures[l - 1] = c;
        }
        out.sites[l - 1] = std::move(t);
    }
    out.validate();
    return out;
}

namespace {

Complex mpo_overlap(const ProcessTensor& a, const ProcessTensor& b) {
    Matrix r = Matrix::Ones(1, 1);
    for (Index l = 0; l < a.steps(); ++l) {
        const SiteTensor& ta = a.sites[l];
        const SiteTensor& tb = b.sites[l];
        Matrix next = Matrix::Zero(ta.bond_out, tb.bond_out);
        for (Index k = 0; k < ta.liou * ta.liou; ++k)
            next += ta.blocks[k].conjugate() * r * tb.blocks[k].transpose();
        r = std::move(next);
    }
    return r(0, 0);
}

}  // namespace

double tensor_distance(const ProcessTensor& a, const ProcessTensor& b) {
    if (a.steps() != b.steps() || a.sys_dim != b.sys_dim)
        throw invalid_input("tensor_distance: operand mismatch");
    const double aa = mpo_overlap(a, a).real();
    const double bb = mpo_overlap(b, b).real();
    const Complex ab = mpo_overlap(a, b);
    return (aa + bb - 2.0 * ab.real()) / std::sqrt(aa * bb);
}

RealVector sv_spectrum(ProcessTensor q, Index l) {
    const Index n = q.steps();
    if (l < 1 || l > n - 1) throw invalid_input("sv_spectrum: bond out of range");
    forward_sweep(q, 0.0, nullptr);
    RealVector sig;
    for (Index m = n; m >= l + 1; --m) backward_step(q, m, 0.0, &sig);
    return sig / sig(0);
}

// ---- lazy combination sources ------------------------------------------

CombineSource::CombineSource(const ProcessTensor& q, const ProcessTensor& p,
                             CombineOrder order)
    : q_(q), p_(p), order_(order) {
    if (q.steps() != p.steps() || q.sys_dim != p.sys_dim)
        throw invalid_input("combine: operand mismatch");
}

Index CombineSource::steps() const { return q_.steps(); }
Index CombineSource::sys_dim() const { return q_.sys_dim; }

SiteTensor CombineSource::site(Index l) const {
    const SiteTensor& tq = q_.sites[l - 1];
    const SiteTensor& tp = p_.sites[l - 1];
    const Index liou = tq.liou;
    const bool swapped =
        order_ == CombineOrder::swapped_even_steps && l % 2 == 0;
    SiteTensor t(liou, tq.bond_out * tp.bond_out, tq.bond_in * tp.bond_in);
    for (Index a = 0; a < liou; ++a) {
        for (Index b = 0; b < liou; ++b) {
            Matrix acc = Matrix::Zero(t.bond_out, t.bond_in);
            for (Index c = 0; c < liou; ++c) {
                if (!swapped)
                    acc += kron(tq.block(a, c), tp.block(c, b));
                else
                    acc += kron(tq.block(c, b), tp.block(a, c));
            }
            t.block(a, b) = std::move(acc);
        }
    }
    return t;
}

RowVector CombineSource::closure(Index l) const {
    const RowVector& cq = q_.closures[l];
    const RowVector& cp = p_.closures[l];
    RowVector c(cq.size() * cp.size());
    for (Index e = 0; e < cq.size(); ++e)
        for (Index f = 0; f < cp.size(); ++f) c(e * cp.size() + f) = cq(e) * cp(f);
    return c;
}

SandwichSource::SandwichSource(const EnvironmentMode& mode,
                               const ProcessTensor& p)
    : mode_(mode), p_(p) {
    if (!mode.half_propagator)
        throw invalid_input("sandwich: mode has no half-step propagator");
    if (mode.sys_dim != p.sys_dim)
        throw invalid_input("sandwich: system dimension mismatch");
    const Index d = mode.sys_dim, md = mode.mode_dim;
    liou_ = d * d;
    mode_liou_ = md * md;
    const Matrix& eh = *mode.half_propagator;

    half_blocks_.resize(liou_ * liou_);
    for (Index a = 0; a < liou_; ++a)
        for (Index b = 0; b < liou_; ++b) {
            Matrix blk(mode_liou_, mode_liou_);
            for (Index dd = 0; dd < mode_liou_; ++dd)
                for (Index dp = 0; dp < mode_liou_; ++dp)
                    blk(dd, dp) = eh(joint_liou_index(a, dd, d, md),
                                     joint_liou_index(b, dp, d, md));
            half_blocks_[a * liou_ + b] = std::move(blk);
        }

    const Vector rho = vectorize(mode.initial_state);
    mode_trace_ = RowVector::Zero(mode_liou_);
    for (Index m = 0; m < md; ++m) mode_trace_(m * md + m) = 1.0;

    // insert_[(a, d), b] = sum_d' Eh[(a,d),(b,d')] rho[d']
    insert_ = Matrix(liou_ * mode_liou_, liou_);
    for (Index a = 0; a < liou_; ++a)
        for (Index b = 0; b < liou_; ++b)
            insert_.block(a * mode_liou_, b, mode_liou_, 1) =
                half_blocks_[a * liou_ + b] * rho;
    // traced_[a, (b, d)] = sum_m Eh[(a,(m,m)),(b,d)]
    traced_ = Matrix(liou_, liou_ * mode_liou_);
    for (Index a = 0; a < liou_; ++a)
        for (Index b = 0; b < liou_; ++b)
            traced_.block(a, b * mode_liou_, 1, mode_liou_) =
                mode_trace_ * half_blocks_[a * liou_ + b];
}

Index SandwichSource::steps() const { return p_.steps(); }
Index SandwichSource::sys_dim() const { return p_.sys_dim; }

SiteTensor SandwichSource::site(Index l) const {
    const Index n = p_.steps();
    const SiteTensor& tp = p_.sites[l - 1];
    const bool first = (l == 1), last = (l == n);
    const Index mode_out = last ? 1 : mode_liou_;
    const Index mode_in = first ? 1 : mode_liou_;

    SiteTensor t(liou_, mode_out * tp.bond_out, mode_in * tp.bond_in);
    for (Index a = 0; a < liou_; ++a) {
        for (Index b = 0; b < liou_; ++b) {
            Matrix acc = Matrix::Zero(t.bond_out, t.bond_in);
            for (Index c = 0; c < liou_; ++c) {
                for (Index cc = 0; cc < liou_; ++cc) {
                    // Mode factor: left half-propagator (or trace at l = n)
                    // times right half-propagator (or insertion at l = 1),
                    // contracted over the intra-step mode index.
                    Matrix kmat;
                    if (last && first)
                        kmat = traced_.block(a, c * mode_liou_, 1, mode_liou_) *
                               insert_.block(cc * mode_liou_, b, mode_liou_, 1);
                    else if (last)
                        kmat = traced_.block(a, c * mode_liou_, 1, mode_liou_) *
                               half_blocks_[cc * liou_ + b];
                    else if (first)
                        kmat = half_blocks_[a * liou_ + c] *
                               insert_.block(cc * mode_liou_, b, mode_liou_, 1);
                    else
                        kmat = half_blocks_[a * liou_ + c] *
                               half_blocks_[cc * liou_ + b];
                    acc += kron(kmat, tp.block(c, cc));
                }
            }
            t.block(a, b) = std::move(acc);
        }
    }
    return t;
}

RowVector SandwichSource::closure(Index l) const {
    const RowVector& cp = p_.closures[l];
    const RowVector cm = (l == 0 || l == p_.steps())
                             ? RowVector::Ones(1)
                             : static_cast<RowVector>(mode_trace_);
    RowVector c(cm.size() * cp.size());
    for (Index e = 0; e < cm.size(); ++e)
        for (Index f = 0; f < cp.size(); ++f) c(e * cp.size() + f) = cm(e) * cp(f);
    return c;
}

std::pair<ProcessTensor, BondWeights> zipup_compress(const SiteSource& src,
                                                     double epsilon,
                                                     int n_sweeps) {
    if (n_sweeps < 1) throw invalid_input("zipup_compress: n_sweeps < 1");
    const Index n = src.steps();
    ProcessTensor out;
    out.sys_dim = src.sys_dim();
    out.sites.reserve(n);
    out.closures.assign(n + 1, RowVector());
    out.closures[0] = RowVector::Ones(1);
    out.closures[n] = RowVector::Ones(1);

    Matrix carry;  // raw bond -> compressed basis of the previous SVD
    for (Index l = 1; l <= n; ++l) {
        SiteTensor t = src.site(l);
        if (l > 1) {
            for (auto& b : t.blocks) b = b * carry;
            t.bond_in = carry.cols();
        }
        if (l < n) {
            const SvdResult svd = truncated_svd(forward_unfold(t), epsilon);
            for (Index k = 0; k < t.liou * t.liou; ++k)
                t.blocks[k] = svd.vdag.middleCols(k * t.bond_in, t.bond_in);
            t.bond_out = svd.kept;
            carry = svd.u * svd.singular_values.asDiagonal();
            out.closures[l] = src.closure(l) * carry;
        }
        out.sites.push_back(std::move(t));
    }

    BondWeights weights;
    backward_sweep(out, epsilon, &weights);
    for (int i = 1; i < n_sweeps; ++i) {
        forward_sweep(out, epsilon, nullptr);
        backward_sweep(out, epsilon, &weights);
    }
    return {std::move(out), std::move(weights)};
}

}  // namespace ptc
