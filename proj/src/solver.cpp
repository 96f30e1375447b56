#include "gicdc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gicdc/errors.hpp"

namespace gicdc {

// ----------------------------------------------------------------------------
// Assembly
// ----------------------------------------------------------------------------

namespace {

// Minimal union-find over node ids, used to detect components with no path
// to remote earth.
struct UnionFind {
    std::unordered_map<int, int> parent;

    int find(int x) {
        auto it = parent.find(x);
        if (it == parent.end()) {
            parent[x] = x;
            return x;
        }
        while (it->second != x) {
            x = it->second;
            it = parent.find(x);
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b] = a;
    }
};

} // namespace

ConductanceSystem assemble(const GmdNetwork& net) {
    const int max_id = net.max_node_id();

    std::vector<int> degree(static_cast<size_t>(max_id) + 1, 0);
    UnionFind uf;
    for (const auto& b : net.branches) {
        if (!(b.resistance_ohm > 0.0) || std::isnan(b.resistance_ohm)) {
            throw SolveError("branch " + std::to_string(b.id) +
                             " has non-positive resistance");
        }
        for (int end : {b.from_node, b.to_node}) {
            if (end != kEarthNode && !net.find_node(end)) {
                throw SolveError("branch " + std::to_string(b.id) +
                                 " references missing node " + std::to_string(end));
            }
            if (end != kEarthNode) ++degree[static_cast<size_t>(end)];
        }
        uf.unite(b.from_node, b.to_node);
    }

    // Zero-degree nodes make the matrix structurally singular; report them
    // all by name rather than letting the factorization fail opaquely.
    std::string isolated;
    for (const auto& n : net.buses) {
        if (degree[static_cast<size_t>(n.id)] == 0) {
            if (!isolated.empty()) isolated += ", ";
            isolated += net.describe_node(n.id);
        }
    }
    if (!isolated.empty()) {
        throw SolveError("singular system: no conductance at " + isolated);
    }

    // Components that never reach earth have a floating potential. Pinning
    // one node per component to 0 V is exact: every EMF injects equal and
    // opposite currents at its two endpoints, so injections inside such a
    // component always sum to zero and the dropped equation is redundant.
    const int earth_root = uf.find(kEarthNode);
    std::unordered_map<int, int> pin_of_root;
    for (const auto& n : net.buses) {
        const int root = uf.find(n.id);
        if (root == earth_root) continue;
        auto [it, inserted] = pin_of_root.try_emplace(root, n.id);
        if (!inserted) it->second = std::min(it->second, n.id);
    }

    ConductanceSystem sys;
    sys.row_of_node.assign(static_cast<size_t>(max_id) + 1, -1);
    for (const auto& [root, node] : pin_of_root) sys.pinned_nodes.push_back(node);
    std::sort(sys.pinned_nodes.begin(), sys.pinned_nodes.end());

    for (const auto& n : net.buses) {
        if (std::binary_search(sys.pinned_nodes.begin(), sys.pinned_nodes.end(), n.id)) {
            continue;
        }
        sys.row_of_node[static_cast<size_t>(n.id)] = static_cast<int>(sys.node_of_row.size());
        sys.node_of_row.push_back(n.id);
    }

    sys.rhs.assign(sys.node_of_row.size(), 0.0);
    auto row = [&sys](int node) {
        return node == kEarthNode ? -1 : sys.row_of_node[static_cast<size_t>(node)];
    };
    for (const auto& b : net.branches) {
        const double g = 1.0 / b.resistance_ohm;
        const int rf = row(b.from_node);
        const int rt = row(b.to_node);
        if (rf >= 0) sys.entries.push_back({rf, rf, g});
        if (rt >= 0) sys.entries.push_back({rt, rt, g});
        if (rf >= 0 && rt >= 0) {
            sys.entries.push_back({rf, rt, -g});
            sys.entries.push_back({rt, rf, -g});
        }
        if (b.induced_v != 0.0) {
            const double inj = b.induced_v * g;
            if (rf >= 0) sys.rhs[static_cast<size_t>(rf)] -= inj;
            if (rt >= 0) sys.rhs[static_cast<size_t>(rt)] += inj;
        }
    }
    return sys;
}

// ----------------------------------------------------------------------------
// Solve
// ----------------------------------------------------------------------------

namespace {

constexpr int kDenseLimit = 2000;

// Hager-style 1-norm estimate of the inverse through repeated solves; the
// matrix is symmetric so transpose solves reuse the factorization.
template <typename SolveFn>
double inverse_one_norm_estimate(int n, SolveFn&& solve_with) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        const Eigen::VectorXd y = solve_with(x);
        est = y.template lpNorm<1>();
        Eigen::VectorXd xi(n);
        for (int i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
        const Eigen::VectorXd z = solve_with(xi);
        int j = 0;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x)) break;
        x.setZero();
        x[j] = 1.0;
    }
    return est;
}

struct Factorization {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> solve;
    double cond = 0.0;
};

} // namespace

NodeVoltages solve(const ConductanceSystem& sys, const SolveOptions& opts) {
    const int n = sys.unknowns();
    NodeVoltages out;
    out.v.assign(sys.row_of_node.size(), 0.0);
    out.cond_estimate = 1.0;
    if (n == 0) return out;

    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b[i] = sys.rhs[static_cast<size_t>(i)];

    Factorization fact;
    Eigen::SparseMatrix<double> A_sparse;
    Eigen::MatrixXd A_dense;
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;

    if (n <= kDenseLimit) {
        A_dense = Eigen::MatrixXd::Zero(n, n);
        for (const auto& e : sys.entries) A_dense(e.row, e.col) += e.g;
        dense_lu.compute(A_dense);
        const double rcond = dense_lu.rcond();
        fact.cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
        fact.solve = [&dense_lu](const Eigen::VectorXd& rhs) { return dense_lu.solve(rhs); };
    } else {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(sys.entries.size());
        for (const auto& e : sys.entries) trips.emplace_back(e.row, e.col, e.g);
        A_sparse.resize(n, n);
        A_sparse.setFromTriplets(trips.begin(), trips.end());
        A_sparse.makeCompressed();
        sparse_lu.compute(A_sparse);
        if (sparse_lu.info() != Eigen::Success) {
            throw SolveError("singular system: sparse factorization failed");
        }
        fact.solve = [&sparse_lu](const Eigen::VectorXd& rhs) { return sparse_lu.solve(rhs); };
        double norm_a = 0.0;   // 1-norm via column sums
        {
            Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
            for (const auto& e : sys.entries) colsum[e.col] += std::abs(e.g);
            norm_a = colsum.maxCoeff();
        }
        fact.cond = norm_a * inverse_one_norm_estimate(n, fact.solve);
    }

    if (!std::isfinite(fact.cond) || fact.cond > opts.cond_limit) {
        throw SolveError("singular or ill-conditioned system (condition estimate " +
                         std::to_string(fact.cond) + ")");
    }

    Eigen::VectorXd x = fact.solve(b);
    const double b_scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
    // Residuals are accumulated in extended precision straight from the entry
    // list: conductances span many orders of magnitude (star ties vs winding
    // paths), and a double-precision matvec would floor the refinement near
    // eps * max(g) * |v|, leaving microamp-scale ghost currents in tight loops.
    std::vector<long double> acc(static_cast<size_t>(n));
    auto residual = [&](const Eigen::VectorXd& xx) -> Eigen::VectorXd {
        for (int i = 0; i < n; ++i) acc[static_cast<size_t>(i)] = b[i];
        for (const auto& e : sys.entries) {
            acc[static_cast<size_t>(e.row)] -=
                static_cast<long double>(e.g) * static_cast<long double>(xx[e.col]);
        }
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = static_cast<double>(acc[static_cast<size_t>(i)]);
        return r;
    };
    Eigen::VectorXd r = residual(x);
    for (int pass = 0; pass < 4 && r.lpNorm<Eigen::Infinity>() > 0.0; ++pass) {
        const Eigen::VectorXd dx = fact.solve(r);
        if (!dx.allFinite()) break;
        x += dx;
        r = residual(x);
    }
    out.residual_inf = r.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(out.residual_inf) || out.residual_inf > opts.residual_rtol * b_scale) {
        throw SolveError("solve residual " + std::to_string(out.residual_inf) +
                         " exceeds tolerance; system is numerically unusable");
    }

    out.cond_estimate = fact.cond;
    for (int i = 0; i < n; ++i) {
        out.v[static_cast<size_t>(sys.node_of_row[static_cast<size_t>(i)])] = x[i];
    }
    return out;
}

// ----------------------------------------------------------------------------
// Currents and transformer quantities
// ----------------------------------------------------------------------------

std::vector<double> branch_currents(const GmdNetwork& net, const std::vector<double>& node_v) {
    std::vector<double> out(static_cast<size_t>(net.max_branch_id()) + 1, 0.0);
    auto v_at = [&node_v](int node) {
        return node == kEarthNode ? 0.0 : node_v.at(static_cast<size_t>(node));
    };
    for (const auto& b : net.branches) {
        out[static_cast<size_t>(b.id)] =
            (v_at(b.from_node) - v_at(b.to_node) + b.induced_v) / b.resistance_ohm;
    }
    return out;
}

double kcl_max_residual(const GmdNetwork& net, const std::vector<double>& currents) {
    std::unordered_map<int, double> net_out;
    for (const auto& b : net.branches) {
        const double i = currents.at(static_cast<size_t>(b.id));
        if (b.from_node != kEarthNode) net_out[b.from_node] += i;
        if (b.to_node != kEarthNode) net_out[b.to_node] -= i;
    }
    double worst = 0.0;
    for (const auto& n : net.buses) {
        const auto it = net_out.find(n.id);
        if (it != net_out.end()) worst = std::max(worst, std::abs(it->second));
    }
    return worst;
}

namespace {

double bus_kv(const AcCase& c, int bus_id, int xf_id) {
    const AcBus* bus = c.find_bus(bus_id);
    if (!bus || !(bus->nominal_kv > 0.0)) {
        throw SolveError("transformer " + std::to_string(xf_id) +
                         " references bus " + std::to_string(bus_id) +
                         " without a usable nominal kV");
    }
    return bus->nominal_kv;
}

double slot_current(const std::optional<int>& slot, const std::vector<double>& currents,
                    int xf_id) {
    if (!slot) return 0.0;
    if (*slot <= 0 || static_cast<size_t>(*slot) >= currents.size()) {
        throw SolveError("transformer " + std::to_string(xf_id) +
                         " maps branch " + std::to_string(slot.value_or(0)) +
                         " outside the solved network");
    }
    return currents[static_cast<size_t>(*slot)];
}

} // namespace

double transformer_i_base(const AcCase& c, const Transformer& xf) {
    const double kv = bus_kv(c, xf.high_bus, xf.id);
    return xf.mva_3ph * 1e6 / (std::sqrt(3.0) * kv * 1e3);
}

double effective_gic_pu(const AcCase& c, const Transformer& xf, const XfBranchSet& slots,
                        const std::vector<double>& branch_current) {
    // Branch currents are three-phase totals; windings see a third each.
    const double i_h = slot_current(slots.high, branch_current, xf.id) / 3.0;
    const double i_l = slot_current(slots.low, branch_current, xf.id) / 3.0;
    const double i_t = slot_current(slots.tertiary, branch_current, xf.id) / 3.0;
    const double i_s = slot_current(slots.series, branch_current, xf.id) / 3.0;
    const double i_c = slot_current(slots.common, branch_current, xf.id) / 3.0;

    const double kv_h = bus_kv(c, xf.high_bus, xf.id);

    double eff_amps = 0.0;
    switch (xf.kind) {
    case XfKind::GwyeGwye: {
        const double alpha = kv_h / bus_kv(c, xf.low_bus, xf.id);
        eff_amps = std::abs(i_h + i_l / alpha);
        break;
    }
    case XfKind::DeltaGwye:
        eff_amps = std::abs(i_l);
        break;
    case XfKind::GwyeDelta:
        eff_amps = std::abs(i_h);
        break;
    case XfKind::DeltaDelta:
        eff_amps = 0.0;
        break;
    case XfKind::AutoGwye:
    case XfKind::ThreeWindingAuto: {
        // Series and common winding currents combine through the overall
        // ratio; the delta tertiary of the three-winding form carries none.
        const double alpha = kv_h / bus_kv(c, xf.low_bus, xf.id);
        eff_amps = std::abs(i_s + i_c * (alpha - 1.0) / alpha);
        break;
    }
    case XfKind::ThreeWinding: {
        double sum = i_h;
        if (slots.low) sum += i_l / (kv_h / bus_kv(c, xf.low_bus, xf.id));
        if (slots.tertiary && xf.tertiary_bus) {
            sum += i_t / (kv_h / bus_kv(c, *xf.tertiary_bus, xf.id));
        }
        eff_amps = std::abs(sum);
        break;
    }
    }
    return eff_amps / transformer_i_base(c, xf);
}

double qloss_mvar(const AcCase& c, const Transformer& xf, double gic_pu) {
    if (xf.is_implicit_gsu) return 0.0;
    const AcBus* high = c.find_bus(xf.high_bus);
    const double v_pu = high && high->v_pu ? std::abs(*high->v_pu) : 1.0;
    return xf.k_factor * gic_pu * v_pu * transformer_i_base(c, xf);
}

} // namespace gicdc
