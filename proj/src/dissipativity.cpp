#include "gridcert/dissipativity.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <sstream>

namespace gridcert {

namespace {

double max_eig(const MatrixXd& m) {
    if (m.rows() == 1) return m(0, 0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double min_eig(const MatrixXd& m) { return -max_eig(-m); }

// stacked map W = [[0, I], [Cm, Dm]] taking (dx/dt, du/dt) to (du/dt, dy/dt)
MatrixXd stacked_output_map(const JacobianSet& j) {
    const int n = static_cast<int>(j.a.rows());
    MatrixXd w = MatrixXd::Zero(4, n + 2);
    w.block(0, n, 2, 2) = Matrix2d::Identity();
    if (n > 0) w.block(2, 0, 2, n) = j.cm;
    w.block(2, n, 2, 2) = j.dm;
    return w;
}

} // namespace

SupplyRateMatrix::SupplyRateMatrix(const Matrix4d& x) : x_(0.5 * (x + x.transpose())) {
    if ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw ValidationError("supply rate matrix is not symmetric");
    }
}

SupplyRateMatrix SupplyRateMatrix::from_blocks(const Matrix2d& q, const Matrix2d& s,
                                               const Matrix2d& r) {
    Matrix4d x;
    x.topLeftCorner<2, 2>() = 0.5 * (q + q.transpose());
    x.topRightCorner<2, 2>() = s;
    x.bottomLeftCorner<2, 2>() = s.transpose();
    x.bottomRightCorner<2, 2>() = 0.5 * (r + r.transpose());
    return SupplyRateMatrix(x);
}

MatrixXd lmi_lhs_dynamic(const JacobianSet& j, const MatrixXd& p, const Matrix4d& x,
                         double epsilon) {
    const int n = static_cast<int>(j.a.rows());
    MatrixXd top = MatrixXd::Zero(n + 2, n + 2);
    if (n > 0) {
        top.topLeftCorner(n, n) =
            p * j.a + j.a.transpose() * p + epsilon * MatrixXd::Identity(n, n);
        top.topRightCorner(n, 2) = p * j.b;
        top.bottomLeftCorner(2, n) = j.b.transpose() * p;
    }
    const MatrixXd w = stacked_output_map(j);
    return top - w.transpose() * x * w;
}

Matrix2d lmi_lhs_static(const Matrix2d& dm, const Matrix4d& x) {
    Eigen::Matrix<double, 4, 2> w;
    w.topRows<2>() = Matrix2d::Identity();
    w.bottomRows<2>() = dm;
    return w.transpose() * x * w;
}

double margin_dynamic(const JacobianSet& j, const MatrixXd& p, const Matrix4d& x,
                      double epsilon) {
    return max_eig(lmi_lhs_dynamic(j, p, x, epsilon));
}

double margin_static(const Matrix2d& dm, const Matrix4d& x) {
    return max_eig(-lmi_lhs_static(dm, x));
}

double check_pointwise(const DeviceModel& m, const DissipativityCertificate& c,
                       const VectorXd& x, const Vector2d& u) {
    const JacobianSet j = m.jacobians(x, u);
    if (m.is_static()) {
        return margin_static(j.dm, c.supply.full());
    }
    return margin_dynamic(j, *c.storage, c.supply.full(), c.epsilon);
}

namespace {

VerifyOutcome verify_impl(const DeviceModel& m, const std::vector<LmiSample>& samples,
                          const VerifyOptions& opts, bool dynamic) {
    if (samples.empty()) {
        throw ValidationError("verification needs at least one sample point");
    }
    const int n = dynamic ? m.state_dim() : 0;

    lmi::Problem prob;
    auto xv = prob.add_sym_var(4, "X");
    lmi::VarHandle pv;
    if (n > 0) {
        pv = prob.add_sym_var(n, "P");
        prob.bound_spectrum(pv, opts.delta_pd, opts.cap);
        prob.add_reg(pv, opts.reg);
    }
    auto tv = prob.add_scalar_var("t");
    prob.bound_spectrum(xv, -opts.cap, opts.cap);
    prob.add_reg(xv, opts.reg);
    prob.scalar_upper_bound(tv, 1.0);
    prob.add_scalar_cost(tv, -1.0);

    for (const auto& smp : samples) {
        auto& blk = prob.add_block(n + 2);
        if (n > 0) {
            MatrixXd l = MatrixXd::Zero(n, n + 2);
            l.leftCols(n) = MatrixXd::Identity(n, n);
            MatrixXd r(n, n + 2);
            r.leftCols(n) = smp.jac.a;
            r.rightCols(2) = smp.jac.b;
            blk.lyaps.push_back({pv.id, l, r});
            blk.g0.topLeftCorner(n, n) += opts.epsilon * MatrixXd::Identity(n, n);
        }
        blk.congruences.push_back({xv.id, stacked_output_map(smp.jac), -1.0});
        blk.scalars.push_back({tv.id, MatrixXd::Identity(n + 2, n + 2)});
    }
    if (opts.r_negative) {
        auto& blk = prob.add_block(2); // R <= 0
        MatrixXd sy = MatrixXd::Zero(4, 2);
        sy.bottomRows(2) = Matrix2d::Identity();
        blk.congruences.push_back({xv.id, sy, 1.0});
    }

    const auto sol = lmi::solve(prob, opts.solver);

    VerifyOutcome out;
    out.solver_status = sol.status;
    if (sol.status == lmi::Status::infeasible || sol.status == lmi::Status::error) {
        out.feasible = false;
        out.diagnostics = sol.diagnostic;
        return out;
    }
    out.achieved_margin = sol.scalar(tv);

    DissipativityCertificate cert;
    cert.supply = SupplyRateMatrix(Matrix4d(sol.matrix(xv)));
    cert.epsilon = opts.epsilon;
    if (n > 0) cert.storage = sol.matrix(pv);
    cert.sample_margins.reserve(samples.size());
    double worst = -1e300;
    for (const auto& smp : samples) {
        const double mg = n > 0 ? margin_dynamic(smp.jac, *cert.storage,
                                                 cert.supply.full(), opts.epsilon)
                                : margin_static(smp.jac.dm, cert.supply.full());
        cert.sample_margins.push_back(mg);
        worst = std::max(worst, mg);
    }
    // the certificate is validated by the recomputed eigenvalue margins, not
    // by the solver's own convergence flags
    const bool pd_ok = n == 0 || min_eig(*cert.storage) > 0.0;
    out.feasible = worst <= -opts.feas_margin && pd_ok &&
                   (sol.status == lmi::Status::optimal ||
                    sol.status == lmi::Status::inaccurate);
    out.cert = std::move(cert);
    if (!out.feasible) {
        std::ostringstream os;
        os << "relaxation t*=" << out.achieved_margin << ", worst margin " << worst
           << ", solver " << lmi::to_string(sol.status);
        out.diagnostics = os.str();
    }
    return out;
}

} // namespace

VerifyOutcome verify_dynamic(const DeviceModel& m, const std::vector<LmiSample>& samples,
                             const VerifyOptions& opts) {
    if (m.is_static()) {
        return verify_impl(m, samples, opts, false);
    }
    return verify_impl(m, samples, opts, true);
}

VerifyOutcome verify_static(const DeviceModel& m, const std::vector<LmiSample>& samples,
                            const VerifyOptions& opts) {
    return verify_impl(m, samples, opts, false);
}

bool analytic_family_check(DeviceKind kind, const SupplyRateMatrix& x,
                           const ZipParams* zip, double tol) {
    switch (kind) {
    case DeviceKind::IntermediateNode:
    case DeviceKind::ConstVoltage:
        return min_eig(x.q_block()) >= -tol;
    case DeviceKind::Zip: {
        if (zip == nullptr || zip->ip != 0 || zip->iq != 0 || zip->p0 != 0 ||
            zip->q0 != 0) {
            return false; // family covers the constant-impedance case only
        }
        const bool q_ok = min_eig(MatrixXd(x.q_block() + zip->zp * Matrix2d::Identity())) >= -tol;
        const bool s_ok = (x.s_block() - 0.5 * Matrix2d::Identity()).cwiseAbs().maxCoeff() <= tol;
        const bool r_ok = min_eig(x.r_block()) >= -tol;
        return q_ok && s_ok && r_ok;
    }
    default:
        return false;
    }
}

std::vector<LmiSample> sample_scenarios(const DeviceModel& m, const VectorXd& x0,
                                        const Vector2d& u0, const SampleSpec& spec) {
    std::vector<LmiSample> out;
    auto push = [&](const VectorXd& x, const Vector2d& u) {
        try {
            out.push_back({x, u, m.jacobians(x, u)});
        } catch (const DomainError&) {
            // skip points outside the model domain (e.g. voltage floor)
        }
    };
    const int g = std::max(1, spec.input_grid);
    for (int i = 0; i < g; ++i) {
        for (int k = 0; k < g; ++k) {
            Vector2d u = u0;
            if (g > 1) {
                u(0) += spec.input_halfwidth * (2.0 * i / (g - 1) - 1.0);
                u(1) += spec.input_halfwidth * (2.0 * k / (g - 1) - 1.0);
            }
            push(x0, u);
        }
    }
    for (int ax = 0; ax < m.state_dim(); ++ax) {
        const double hw = std::max(spec.state_rel * std::abs(x0(ax)), spec.state_floor);
        for (int i = 0; i < spec.state_points; ++i) {
            VectorXd x = x0;
            x(ax) += spec.state_points > 1 ? hw * (2.0 * i / (spec.state_points - 1) - 1.0)
                                           : 0.0;
            push(x, u0);
        }
    }
    if (out.empty()) {
        throw DomainError("all scenario samples fell outside the model domain");
    }
    return out;
}

size_t DissipativeRegion::node_count() const {
    size_t n = 1;
    for (int r : res) n *= static_cast<size_t>(r);
    return n;
}

size_t DissipativeRegion::flat_index(const std::vector<int>& idx) const {
    size_t f = 0;
    size_t stride = 1;
    for (size_t a = 0; a < res.size(); ++a) {
        f += static_cast<size_t>(idx[a]) * stride;
        stride *= static_cast<size_t>(res[a]);
    }
    return f;
}

DissipativeRegion characterize_region(const DeviceModel& m,
                                      const DissipativityCertificate& c,
                                      const std::vector<std::pair<double, double>>& box,
                                      const std::vector<int>& res,
                                      const VectorXd& nominal, double guard) {
    const int n = m.state_dim();
    if (static_cast<int>(box.size()) != n + 2 || box.size() != res.size()) {
        throw ValidationError("region box/resolution dimensions must match state+input");
    }
    for (int r : res) {
        if (r < 2) throw ValidationError("region resolution must be >= 2 per axis");
    }
    DissipativeRegion region;
    region.device = c.device;
    region.box = box;
    region.res = res;
    region.guard = guard;
    region.nominal = nominal;
    region.margins.assign(region.node_count(), 0.0);

    VectorXd pt(box.size());
    const size_t total = region.node_count();
    for (size_t f = 0; f < total; ++f) {
        size_t rem = f;
        for (size_t a = 0; a < box.size(); ++a) {
            const int ia = static_cast<int>(rem % res[a]);
            rem /= res[a];
            const auto [lo, hi] = box[a];
            pt(a) = lo + (hi - lo) * ia / (res[a] - 1);
        }
        const VectorXd x = pt.head(n);
        const Vector2d u = pt.tail(2);
        double mg;
        try {
            mg = check_pointwise(m, c, x, u);
        } catch (const DomainError&) {
            mg = std::numeric_limits<double>::infinity();
        }
        region.margins[f] = mg;
    }
    region.nominal_certified = membership(region, nominal) == Membership::certified;
    return region;
}

Membership membership(const DissipativeRegion& r, const VectorXd& point) {
    const int na = r.axes();
    if (point.size() != na) {
        throw ValidationError("membership point dimension mismatch");
    }
    std::vector<int> cell(na);
    for (int a = 0; a < na; ++a) {
        const auto [lo, hi] = r.box[a];
        if (point(a) < lo || point(a) > hi) {
            return Membership::outside_box;
        }
        const double h = (hi - lo) / (r.res[a] - 1);
        int ia = static_cast<int>(std::floor((point(a) - lo) / h));
        ia = std::min(std::max(ia, 0), r.res[a] - 2);
        cell[a] = ia;
    }
    // conservative: every corner of the containing cell must be certified
    std::vector<int> corner(na);
    for (int mask = 0; mask < (1 << na); ++mask) {
        for (int a = 0; a < na; ++a) {
            corner[a] = cell[a] + ((mask >> a) & 1);
        }
        if (!(r.margins[r.flat_index(corner)] <= -r.guard)) {
            return Membership::uncertified;
        }
    }
    return Membership::certified;
}

void export_region_csv(const DeviceModel& m, const DissipativityCertificate& c,
                       const DissipativeRegion& r, int axis1, int axis2, int res,
                       std::ostream& os) {
    os << "axis1,axis2,margin,certified\n";
    const int n = m.state_dim();
    VectorXd pt = r.nominal;
    for (int i = 0; i < res; ++i) {
        for (int k = 0; k < res; ++k) {
            const auto [lo1, hi1] = r.box[axis1];
            const auto [lo2, hi2] = r.box[axis2];
            pt = r.nominal;
            pt(axis1) = lo1 + (hi1 - lo1) * i / (res - 1);
            pt(axis2) = lo2 + (hi2 - lo2) * k / (res - 1);
            double mg;
            try {
                mg = check_pointwise(m, c, VectorXd(pt.head(n)), Vector2d(pt.tail(2)));
            } catch (const DomainError&) {
                mg = std::numeric_limits<double>::infinity();
            }
            os << pt(axis1) << ',' << pt(axis2) << ',' << mg << ','
               << (mg <= -r.guard ? 1 : 0) << '\n';
        }
    }
}

} // namespace gridcert
