#include "gridcert/network.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <complex>
#include <sstream>

namespace gridcert {

namespace {

Matrix2d dq_block(std::complex<double> y) {
    Matrix2d m;
    m << y.real(), -y.imag(), y.imag(), y.real();
    return m;
}

} // namespace

MatrixXd build_admittance(std::span<const LineData> lines, int n_buses) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n_buses, n_buses);
    for (const auto& l : lines) {
        if (l.from < 1 || l.from > n_buses || l.to < 1 || l.to > n_buses) {
            throw ValidationError("line references bus outside 1.." +
                                  std::to_string(n_buses));
        }
        if (l.from == l.to) {
            throw ValidationError("line endpoints must be distinct buses");
        }
        if (l.r == 0.0 && l.x == 0.0) {
            throw ValidationError("line needs nonzero series impedance");
        }
        const int a = l.from - 1;
        const int b = l.to - 1;
        const std::complex<double> ys = 1.0 / std::complex<double>(l.r, l.x);
        const std::complex<double> sh(0.0, l.b / 2.0);
        y(a, a) += ys + sh;
        y(b, b) += ys + sh;
        y(a, b) -= ys;
        y(b, a) -= ys;
    }
    MatrixXd out = MatrixXd::Zero(2 * n_buses, 2 * n_buses);
    for (int i = 0; i < n_buses; ++i) {
        for (int k = 0; k < n_buses; ++k) {
            out.block<2, 2>(2 * i, 2 * k) = dq_block(y(i, k));
        }
    }
    return out;
}

MatrixXd Interconnection::perm_matrix() const {
    MatrixXd p = MatrixXd::Zero(4 * n_buses, 4 * n_buses);
    for (int r = 0; r < 4 * n_buses; ++r) {
        p(r, perm[r]) = 1.0;
    }
    return p;
}

MatrixXd Interconnection::bus_map(int bus) const {
    MatrixXd f(4, 2 * n_buses);
    f.topRows(2) = -c.middleRows(2 * bus, 2);
    f.bottomRows(2).setZero();
    f(2, 2 * bus) = 1.0;
    f(3, 2 * bus + 1) = 1.0;
    return f;
}

Interconnection build_interconnection(const std::vector<PortRole>& roles,
                                      const MatrixXd& y_real) {
    const int n = static_cast<int>(roles.size());
    if (y_real.rows() != 2 * n || y_real.cols() != 2 * n) {
        throw ValidationError("admittance dimension does not match bus count");
    }
    // split buses: A keeps current equations (device output is the voltage),
    // B gets the partially inverted block (device output is the current)
    std::vector<int> a_set, b_set;
    for (int i = 0; i < n; ++i) {
        if (roles[i] == PortRole::CurrentInVoltageOut) {
            a_set.push_back(i);
            continue;
        }
        // completely isolated current-output buses decouple (zero C entries)
        const bool isolated = y_real.middleRows(2 * i, 2).cwiseAbs().maxCoeff() == 0.0 &&
                              y_real.middleCols(2 * i, 2).cwiseAbs().maxCoeff() == 0.0;
        if (!isolated) b_set.push_back(i);
    }
    auto expand = [](const std::vector<int>& set) {
        std::vector<int> coords;
        coords.reserve(2 * set.size());
        for (int b : set) {
            coords.push_back(2 * b);
            coords.push_back(2 * b + 1);
        }
        return coords;
    };
    const auto ac = expand(a_set);
    const auto bc = expand(b_set);
    auto slice = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
        MatrixXd m(rows.size(), cols.size());
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t k = 0; k < cols.size(); ++k)
                m(i, k) = y_real(rows[i], cols[k]);
        return m;
    };

    MatrixXd c = MatrixXd::Zero(2 * n, 2 * n);
    if (bc.empty()) {
        c = y_real;
    } else {
        const MatrixXd ybb = slice(bc, bc);
        Eigen::FullPivLU<MatrixXd> lu(ybb);
        lu.setThreshold(1e-10);
        if (!lu.isInvertible()) {
            throw StructuralError(
                "current-output bus block of the admittance is singular; the "
                "chosen port-role split leaves the network algebra unsolvable");
        }
        const MatrixXd ybb_inv = lu.inverse();
        const MatrixXd yaa = slice(ac, ac);
        const MatrixXd yab = slice(ac, bc);
        const MatrixXd yba = slice(bc, ac);
        const MatrixXd haa = yaa - yab * ybb_inv * yba; // u_A = -(H y)_A
        const MatrixXd hab = -yab * ybb_inv;
        const MatrixXd hba = ybb_inv * yba;
        const MatrixXd hbb = ybb_inv;
        auto scatter = [&](const MatrixXd& m, const std::vector<int>& rows,
                           const std::vector<int>& cols) {
            for (size_t i = 0; i < rows.size(); ++i)
                for (size_t k = 0; k < cols.size(); ++k)
                    c(rows[i], cols[k]) = m(i, k);
        };
        scatter(haa, ac, ac);
        scatter(hab, ac, bc);
        scatter(hba, bc, ac);
        scatter(hbb, bc, bc);
    }

    Interconnection ic;
    ic.n_buses = n;
    ic.c = std::move(c);
    ic.roles = roles;
    // stacked (u_1..u_N, y_1..y_N) -> (u_1, y_1, ..., u_N, y_N)
    ic.perm.resize(4 * n);
    for (int i = 0; i < n; ++i) {
        ic.perm[4 * i + 0] = 2 * i;
        ic.perm[4 * i + 1] = 2 * i + 1;
        ic.perm[4 * i + 2] = 2 * n + 2 * i;
        ic.perm[4 * i + 3] = 2 * n + 2 * i + 1;
    }
    return ic;
}

MatrixXd assemble_lc(const Interconnection& ic, std::span<const Matrix4d> x) {
    if (static_cast<int>(x.size()) != ic.n_buses) {
        throw ValidationError("assemble_lc: one supply rate per bus required");
    }
    MatrixXd lc = MatrixXd::Zero(2 * ic.n_buses, 2 * ic.n_buses);
    for (int i = 0; i < ic.n_buses; ++i) {
        const MatrixXd f = ic.bus_map(i);
        lc.noalias() += f.transpose() * x[i] * f;
    }
    return 0.5 * (lc + lc.transpose());
}

double lc_max_eig(const Interconnection& ic, std::span<const Matrix4d> x) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(assemble_lc(ic, x),
                                               Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

CouplingResult verify_coupling_centralized(const Interconnection& ic,
                                           const std::vector<BusLocalSet>& locals,
                                           const CouplingOptions& opts) {
    const int n = ic.n_buses;
    if (static_cast<int>(locals.size()) != n) {
        throw ValidationError("one local constraint set per bus required");
    }

    lmi::Problem prob;
    std::vector<lmi::VarHandle> xs(n), ps(n);
    auto tv = prob.add_scalar_var("t");
    prob.scalar_upper_bound(tv, 1.0);
    prob.add_scalar_cost(tv, -1.0);

    for (int i = 0; i < n; ++i) {
        xs[i] = prob.add_sym_var(4, "X" + std::to_string(i));
        prob.bound_spectrum(xs[i], -opts.cap, opts.cap);
        prob.add_reg(xs[i], opts.reg);
        const auto& set = locals[i];
        if (set.samples.empty()) {
            throw ValidationError("bus " + std::to_string(i + 1) +
                                  " has no local samples");
        }
        const int ns = set.model->state_dim();
        if (ns > 0) {
            ps[i] = prob.add_sym_var(ns, "P" + std::to_string(i));
            prob.bound_spectrum(ps[i], opts.delta_pd, opts.cap);
            prob.add_reg(ps[i], opts.reg);
        }
        for (const auto& smp : set.samples) {
            auto& blk = prob.add_block(ns + 2);
            if (ns > 0) {
                MatrixXd l = MatrixXd::Zero(ns, ns + 2);
                l.leftCols(ns) = MatrixXd::Identity(ns, ns);
                MatrixXd r(ns, ns + 2);
                r.leftCols(ns) = smp.jac.a;
                r.rightCols(2) = smp.jac.b;
                blk.lyaps.push_back({ps[i].id, l, r});
                blk.g0.topLeftCorner(ns, ns) +=
                    opts.epsilon * MatrixXd::Identity(ns, ns);
            }
            MatrixXd w = MatrixXd::Zero(4, ns + 2);
            w.block(0, ns, 2, 2) = Matrix2d::Identity();
            if (ns > 0) w.block(2, 0, 2, ns) = smp.jac.cm;
            w.block(2, ns, 2, 2) = smp.jac.dm;
            blk.congruences.push_back({xs[i].id, w, -1.0});
            blk.scalars.push_back({tv.id, MatrixXd::Identity(ns + 2, ns + 2)});
        }
    }
    // coupling block lc(X) <= -t I
    auto& cblk = prob.add_block(2 * n);
    for (int i = 0; i < n; ++i) {
        cblk.congruences.push_back({xs[i].id, ic.bus_map(i), 1.0});
    }
    cblk.scalars.push_back({tv.id, MatrixXd::Identity(2 * n, 2 * n)});

    const auto sol = lmi::solve(prob, opts.solver);

    CouplingResult out;
    out.solver_status = sol.status;
    if (sol.status == lmi::Status::infeasible || sol.status == lmi::Status::error) {
        out.diagnostics = sol.diagnostic;
        return out;
    }
    out.achieved_margin = sol.scalar(tv);

    std::vector<Matrix4d> xv(n);
    double worst = -1e300;
    for (int i = 0; i < n; ++i) {
        xv[i] = sol.matrix(xs[i]);
        DissipativityCertificate cert;
        cert.device = "bus" + std::to_string(i + 1);
        cert.supply = SupplyRateMatrix(Matrix4d(0.5 * (xv[i] + xv[i].transpose())));
        cert.epsilon = opts.epsilon;
        const int ns = locals[i].model->state_dim();
        if (ns > 0) cert.storage = sol.matrix(ps[i]);
        for (const auto& smp : locals[i].samples) {
            const double mg =
                ns > 0 ? margin_dynamic(smp.jac, *cert.storage, cert.supply.full(),
                                        opts.epsilon)
                       : margin_static(smp.jac.dm, cert.supply.full());
            cert.sample_margins.push_back(mg);
            worst = std::max(worst, mg);
        }
        out.certificates.push_back(std::move(cert));
    }
    out.lc_max = lc_max_eig(ic, xv);
    worst = std::max(worst, out.lc_max);
    out.feasible = worst <= -opts.feas_margin &&
                   (sol.status == lmi::Status::optimal ||
                    sol.status == lmi::Status::inaccurate);
    if (!out.feasible) {
        std::ostringstream os;
        os << "joint margin " << worst << " (slack t*=" << out.achieved_margin
           << ", lc max " << out.lc_max << ", solver " << lmi::to_string(sol.status)
           << ")";
        out.diagnostics = os.str();
    }
    return out;
}

} // namespace gridcert
