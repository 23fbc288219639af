#pragma once

#include "gridcert/dissipativity.hpp"

#include <span>

namespace gridcert {

struct LineData {
    int from = 0;
    int to = 0;
    double r = 0.0; // series resistance (p.u.)
    double x = 0.0; // series reactance (p.u.)
    double b = 0.0; // total line charging susceptance (p.u.)
};

// Real 2Nx2N admittance in DQ block form: a complex entry g+jb maps to
// [[g, -b], [b, g]]. Bus ids are 1-based in LineData, 0-based internally.
MatrixXd build_admittance(std::span<const LineData> lines, int n_buses);

// The network interconnection u = -C y with the (u, y) interleaving
// permutation; the convention is reconstructed so that the summed device
// supply rates equal dy' * lc(X) * dy along network-consistent signals.
struct Interconnection {
    int n_buses = 0;
    MatrixXd c;                    // 2N x 2N
    std::vector<int> perm;         // row map: stacked (u; y) -> per-bus pairs
    std::vector<PortRole> roles;

    MatrixXd perm_matrix() const;  // explicit 0/1 P_pi (4N x 4N)
    // rows of P_pi [-C; I] belonging to bus i (4 x 2N): [-C_i; E_i]
    MatrixXd bus_map(int bus) const;
};

Interconnection build_interconnection(const std::vector<PortRole>& roles,
                                      const MatrixXd& y_real);

MatrixXd assemble_lc(const Interconnection& ic, std::span<const Matrix4d> x);

double lc_max_eig(const Interconnection& ic, std::span<const Matrix4d> x);

// Per-bus local constraint payload for the joint coupling solve: dynamic
// buses carry scenario LMI samples, static buses a single constant-jacobian
// sample (their dh/du does not depend on the point for the bundled models).
struct BusLocalSet {
    const DeviceModel* model = nullptr;
    std::vector<LmiSample> samples;
};

struct CouplingOptions {
    double epsilon = 1e-4;
    double delta_pd = 1e-6;
    double cap = 1e3;
    double feas_margin = 1e-6;
    double reg = 1e-5;
    lmi::Settings solver = VerifyOptions::make_solver_settings();
};

struct CouplingResult {
    bool feasible = false;
    std::vector<DissipativityCertificate> certificates; // one per bus
    double lc_max = 0.0;       // recomputed lambda_max of lc at the solution
    double achieved_margin = 0.0;
    lmi::Status solver_status = lmi::Status::error;
    std::string diagnostics;
};

// One joint semidefinite feasibility solve over all X_i (and P_i for the
// dynamic buses) with the coupling condition lc(X_1..X_N) <= 0.
CouplingResult verify_coupling_centralized(const Interconnection& ic,
                                           const std::vector<BusLocalSet>& locals,
                                           const CouplingOptions& opts = {});

} // namespace gridcert
