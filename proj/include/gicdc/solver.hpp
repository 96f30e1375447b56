#pragma once

// ============================================================================
// Nodal dc solve
//
// Assembles the node conductance system from the branch list (each branch
// stamps 1/R; a series EMF becomes the Norton injection pair -V/R, +V/R),
// eliminates remote earth as the reference, and solves G v = J by direct
// factorization: dense up to 2000 unknowns, sparse above. Components that
// have no conductance to earth are gauge-pinned at their lowest node id,
// which is exact because Norton injections always balance within a
// component. Zero-degree nodes are rejected as singular input.
// ============================================================================

#include <string>
#include <vector>

#include "gicdc/model.hpp"
#include "gicdc/network.hpp"

namespace gicdc {

struct ConductanceSystem {
    // row_of_node[node id] = unknown index, or -1 for eliminated nodes
    // (remote earth and gauge-pinned component references).
    std::vector<int> row_of_node;
    std::vector<int> node_of_row;
    std::vector<int> pinned_nodes;   // one per earth-free component

    struct Entry {
        int row = 0;
        int col = 0;
        double g = 0.0;
    };
    std::vector<Entry> entries;      // accumulated conductance stamps
    std::vector<double> rhs;         // Norton current injections, amps

    [[nodiscard]] int unknowns() const { return static_cast<int>(node_of_row.size()); }
};

// Throws SolveError naming isolated nodes (zero incident branches), which
// would produce a structurally singular matrix.
[[nodiscard]] ConductanceSystem assemble(const GmdNetwork& net);

struct SolveOptions {
    double residual_rtol = 1e-9;   // on ||G v - J||_inf relative to max(1, ||J||_inf)
    double cond_limit = 1e12;      // condition estimate above this is an error
};

struct NodeVoltages {
    std::vector<double> v;         // indexed by node id; earth and pinned ids read 0
    double cond_estimate = 0.0;
    double residual_inf = 0.0;
};

// Direct solve with one step of iterative refinement. Throws SolveError when
// the factorization reports an ill-conditioned or singular system.
[[nodiscard]] NodeVoltages solve(const ConductanceSystem& sys,
                                 const SolveOptions& opts = {});

// Branch current from terminal voltages: I = (v_from - v_to + emf) / R,
// positive from -> to. Indexed by branch id; index 0 is unused.
[[nodiscard]] std::vector<double> branch_currents(const GmdNetwork& net,
                                                  const std::vector<double>& node_v);

// Largest absolute nodal current imbalance over all non-earth nodes, amps.
[[nodiscard]] double kcl_max_residual(const GmdNetwork& net,
                                      const std::vector<double>& currents);

// High-side base current, amps: MVA * 1e6 / (sqrt(3) * kV_high * 1e3).
[[nodiscard]] double transformer_i_base(const AcCase& c, const Transformer& xf);

// Effective per-phase GIC of one transformer in per-unit of its high-side
// base current. Branch currents are three-phase totals; each winding's
// per-phase share is a third of its branch current. The windings combine by
// turns ratio: gwye-gwye |I_H + I_L/a|, single grounded winding |I_w|,
// autotransformer |I_S + I_C (a-1)/a|, three-winding |I_H + I_L/a_L + I_T/a_T|.
[[nodiscard]] double effective_gic_pu(const AcCase& c, const Transformer& xf,
                                      const XfBranchSet& slots,
                                      const std::vector<double>& branch_current);

// Reactive loss estimate, MVAr: K * I_gic_pu * |V_high|_pu * I_base.
// The ac voltage magnitude is the high bus value, 1.0 when the case has none.
[[nodiscard]] double qloss_mvar(const AcCase& c, const Transformer& xf, double gic_pu);

struct XfLoss {
    int transformer_id = 0;
    double effective_gic_pu = 0.0;
    double qloss_mvar = 0.0;

    friend bool operator==(const XfLoss&, const XfLoss&) = default;
};

struct SolveResult {
    GmdNetwork network;                 // the network that was actually solved
    std::vector<double> node_voltage;   // by node id
    std::vector<double> branch_current; // by branch id
    std::vector<XfLoss> transformers;   // explicit transformers, id order
    double total_qloss_mvar = 0.0;
    double cond_estimate = 0.0;
    double kcl_max_abs = 0.0;
    std::vector<Diagnostic> notes;
};

} // namespace gicdc
