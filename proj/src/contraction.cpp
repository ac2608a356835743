#include "ptc/contraction.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

namespace ptc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// A combination counts the built-in compression of the preselected path
// as its first sweep pair, so n_sweeps - 1 further pairs follow it; the
// plain path combines and then performs n_sweeps pairs (the first forward
// sweep fused with the combination, zip-up style).
ProcessTensor combine_and_compress(const ProcessTensor& q,
                                   const ProcessTensor& p, bool preselect,
                                   double epsilon, int n_sweeps,
                                   CombineOrder order) {
    if (preselect) {
        ProcessTensor out = combine_preselect(q, p, epsilon, order);
        if (n_sweeps > 1)
            out = sweep_compress(std::move(out), epsilon, n_sweeps - 1).first;
        return out;
    }
    CombineSource src(q, p, order);
    return zipup_compress(src, epsilon, n_sweeps).first;
}

}  // namespace

void CompressionPolicy::validate() const {
    if (!(epsilon_max > 0)) throw invalid_input("CompressionPolicy: epsilon_max <= 0");
    if (range_factor < 1.0) throw invalid_input("CompressionPolicy: range_factor < 1");
    if (n_sweeps < 1) throw invalid_input("CompressionPolicy: n_sweeps < 1");
}

void ContractionPlan::validate() const {
    if (ordering == Ordering::random && !seed)
        throw invalid_input("ContractionPlan: random ordering requires a seed");
}

std::vector<EnvironmentMode> order_modes(std::vector<EnvironmentMode> modes,
                                         Ordering ordering,
                                         std::optional<std::uint64_t> seed) {
    auto need_omega = [&] {
        for (const auto& m : modes)
            if (!m.omega) throw invalid_input("order_modes: mode frequency missing");
    };
    switch (ordering) {
        case Ordering::as_given:
            break;
        case Ordering::increasing_frequency:
            need_omega();
            std::stable_sort(modes.begin(), modes.end(),
                             [](const auto& a, const auto& b) { return *a.omega < *b.omega; });
            break;
        case Ordering::decreasing_frequency:
            need_omega();
            std::stable_sort(modes.begin(), modes.end(),
                             [](const auto& a, const auto& b) { return *a.omega > *b.omega; });
            break;
        case Ordering::increasing_coupling:
            for (const auto& m : modes)
                if (!m.coupling) throw invalid_input("order_modes: mode coupling missing");
            std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
                return std::abs(*a.coupling) < std::abs(*b.coupling);
            });
            break;
        case Ordering::random: {
            if (!seed) throw invalid_input("order_modes: random ordering requires a seed");
            std::mt19937_64 rng(*seed);
            std::shuffle(modes.begin(), modes.end(), rng);
            break;
        }
    }
    return modes;
}

double layer_threshold(int layer, int total_layers,
                       const CompressionPolicy& policy) {
    if (layer < 1 || layer > total_layers)
        throw invalid_input("layer_threshold: layer out of range");
    if (total_layers == 1) return policy.epsilon_max;
    const double lo = std::log(policy.epsilon_min());
    const double hi = std::log(policy.epsilon_max);
    const double frac = double(layer - 1) / double(total_layers - 1);
    return std::exp(lo + frac * (hi - lo));
}

ContractionResult contract_sequential(const std::vector<EnvironmentMode>& modes,
                                      Index n, const CompressionPolicy& policy,
                                      const ContractionPlan& plan) {
    policy.validate();
    plan.validate();
    if (modes.empty()) throw invalid_input("contract_sequential: no modes");
    auto ordered = order_modes(modes, plan.ordering, plan.seed);
    const int nm = static_cast<int>(ordered.size());
    const bool preselect =
        policy.preselect || plan.scheme == Scheme::sequential_preselect;
    const bool symmetric = plan.trotter == Trotter::symmetric_alternating;
    // The half-step sandwich realizes the symmetric env split for the
    // plain sequential path; modes without half propagators (the
    // parity-dressed fermionic ones) and the preselected path use the
    // alternating combination order instead.
    bool sandwich = symmetric && !preselect;
    for (const auto& m : ordered)
        if (!m.half_propagator) sandwich = false;
    const CombineOrder order = (symmetric && !sandwich)
                                   ? CombineOrder::swapped_even_steps
                                   : CombineOrder::normal;

    const auto t0 = Clock::now();
    ContractionResult result;

    const int total_combinations = nm - 1;
    auto step_epsilon = [&](int i) {  // i = 1..nm-1
        if (total_combinations <= 0) return policy.epsilon_max;
        return layer_threshold(i, total_combinations, policy);
    };

    ProcessTensor pt = single_mode_pt(ordered[0], n);
    if (nm == 1) pt = sweep_compress(std::move(pt), policy.epsilon_max, policy.n_sweeps).first;

    for (int k = 1; k < nm; ++k) {
        const auto tc = Clock::now();
        const double eps = step_epsilon(k);
        const Index pre = pt.max_bond();
        if (sandwich) {
            SandwichSource src(ordered[k], pt);
            pt = zipup_compress(src, eps, policy.n_sweeps).first;
        } else {
            ProcessTensor mode_pt = single_mode_pt(ordered[k], n);
            pt = combine_and_compress(mode_pt, pt, preselect, eps,
                                      policy.n_sweeps, order);
        }
        CombinationRecord rec;
        rec.layer = k;
        rec.left = 0;
        rec.right = k;
        rec.pre_max_bond = pre;
        rec.post_max_bond = pt.max_bond();
        rec.seconds = seconds_since(tc);
        result.records.push_back(rec);
    }

    result.pt = std::move(pt);
    result.seconds = seconds_since(t0);
    return result;
}

ContractionResult contract_tree(const std::vector<EnvironmentMode>& modes,
                                Index n, const CompressionPolicy& policy,
                                const ContractionPlan& plan, int threads) {
    policy.validate();
    plan.validate();
    if (modes.empty()) throw invalid_input("contract_tree: no modes");
    auto ordered = order_modes(modes, plan.ordering, plan.seed);
    const int nm = static_cast<int>(ordered.size());
    const CombineOrder order = plan.trotter == Trotter::symmetric_alternating
                                   ? CombineOrder::swapped_even_steps
                                   : CombineOrder::normal;

    const auto t0 = Clock::now();
    ContractionResult result;

    std::vector<ProcessTensor> layer_pts;
    layer_pts.reserve(nm);
    for (int k = 0; k < nm; ++k) layer_pts.push_back(single_mode_pt(ordered[k], n));

    if (nm == 1) {
        result.pt = sweep_compress(std::move(layer_pts[0]), policy.epsilon_max,
                                   policy.n_sweeps)
                        .first;
        result.seconds = seconds_since(t0);
        return result;
    }

    const int total_layers = static_cast<int>(std::ceil(std::log2(double(nm))));
    int layer = 0;
    while (layer_pts.size() > 1) {
        ++layer;
        const double eps = layer_threshold(layer, total_layers, policy);
        const int pairs = static_cast<int>(layer_pts.size()) / 2;
        std::vector<ProcessTensor> next(pairs);
        std::vector<CombinationRecord> recs(pairs);

        auto work = [&](int j) {
            const auto tc = Clock::now();
            const ProcessTensor& left = layer_pts[2 * j];
            const ProcessTensor& right = layer_pts[2 * j + 1];
            CombinationRecord rec;
            rec.layer = layer;
            rec.left = 2 * j;
            rec.right = 2 * j + 1;
            rec.pre_max_bond = std::max(left.max_bond(), right.max_bond());
            // Tree combinations always preselect; the lower-index block is
            // the one applied first at odd steps.
            next[j] = combine_and_compress(right, left, true, eps,
                                           policy.n_sweeps, order);
            rec.post_max_bond = next[j].max_bond();
            rec.seconds = seconds_since(tc);
            recs[j] = rec;
        };

        const int nthreads = std::max(1, std::min(threads, pairs));
        if (nthreads == 1) {
            for (int j = 0; j < pairs; ++j) work(j);
        } else {
            std::atomic<int> cursor{0};
            std::vector<std::thread> pool;
            pool.reserve(nthreads);
            for (int t = 0; t < nthreads; ++t)
                pool.emplace_back([&] {
                    for (int j = cursor.fetch_add(1); j < pairs; j = cursor.fetch_add(1))
                        work(j);
                });
            for (auto& th : pool) th.join();
        }

        if (layer_pts.size() % 2 == 1) next.push_back(std::move(layer_pts.back()));
        layer_pts = std::move(next);
        for (auto& r : recs) result.records.push_back(r);
    }

    result.pt = std::move(layer_pts.front());
    result.seconds = seconds_since(t0);
    return result;
}

ContractionResult contract(const std::vector<EnvironmentMode>& modes, Index n,
                           const CompressionPolicy& policy,
                           const ContractionPlan& plan, int threads) {
    if (plan.scheme == Scheme::tree)
        return contract_tree(modes, n, policy, plan, threads);
    return contract_sequential(modes, n, policy, plan);
}

}  // namespace ptc
