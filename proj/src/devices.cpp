#include "gridcert/devices.hpp"

#include <cmath>

namespace gridcert {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string("parameter '") + field +
                              "' must be strictly positive");
    }
}

void require_nonnegative(double v, const char* field) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string("parameter '") + field +
                              "' must be nonnegative");
    }
}

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) {
        throw ValidationError(std::string("parameter '") + field + "' must be finite");
    }
}

void check_voltage(double vmag) {
    if (!(vmag >= kVoltageFloor)) {
        throw DomainError("DQ voltage magnitude " + std::to_string(vmag) +
                          " below resolution floor " + std::to_string(kVoltageFloor));
    }
}

// Power delivered by injection current I_DQ at voltage V_DQ and its companion
// reactive power, plus partials, for the voltage-source devices (VSG/CD/QD)
// where V_D = V cos(th), V_Q = V sin(th) and I_DQ = -u.
struct VSourceFlow {
    double p, q;
    double dp_dth, dp_dv, dq_dth, dq_dv;
    Vector2d dp_du, dq_du;
};

VSourceFlow vsource_flow(double th, double v, const Vector2d& u) {
    const double c = std::cos(th);
    const double s = std::sin(th);
    VSourceFlow r;
    r.p = -(u(0) * v * c + u(1) * v * s);
    r.q = -u(0) * v * s + u(1) * v * c;
    r.dp_dth = -r.q;
    r.dp_dv = r.p / v;
    r.dq_dth = r.p;
    r.dq_dv = r.q / v;
    r.dp_du = {-v * c, -v * s};
    r.dq_du = {-v * s, v * c};
    return r;
}

// SG stator solution in the local dq frame for the voltage-input form.
struct SgPoint {
    double c, s;          // cos/sin of rotor angle
    double vd, vq;        // local terminal voltage
    double id, iq;        // local stator currents
    double pe;            // electrical power
};

SgPoint sg_point_vin(const Sg3Params& p, double delta, double eq, const Vector2d& u) {
    SgPoint r;
    r.c = std::cos(delta);
    r.s = std::sin(delta);
    r.vd = r.c * u(0) + r.s * u(1);
    r.vq = -r.s * u(0) + r.c * u(1);
    r.id = -r.vq / p.xq;
    r.iq = (r.vd - eq) / p.xd_t;
    r.pe = r.vd * r.id + r.vq * r.iq;
    return r;
}

SgPoint sg_point_iin(const Sg3Params& p, double delta, double eq, const Vector2d& u) {
    SgPoint r;
    r.c = std::cos(delta);
    r.s = std::sin(delta);
    // u = -I_DQ, local currents I_dq = T(delta) * I_DQ = -T(delta) u
    r.id = -(r.c * u(0) + r.s * u(1));
    r.iq = -(-r.s * u(0) + r.c * u(1));
    r.vd = eq + p.xd_t * r.iq;
    r.vq = -p.xq * r.id;
    r.pe = r.vd * r.id + r.vq * r.iq;
    return r;
}

double qd_uref(const DroopParams& p) {
    // steady-state regulation constant: 0 = -d2 qref - vref (vref - uref)
    return (p.vref * p.vref + p.d2 * p.qref) / p.vref;
}

} // namespace

Vector2d zip_injection(const ZipParams& p, const Vector2d& v) {
    const double v2 = v.squaredNorm();
    const double vm = std::sqrt(v2);
    check_voltage(vm);
    const double pl = p.zp * v2 + p.ip * vm + p.p0;
    const double ql = p.zq * v2 + p.iq * vm + p.q0;
    return {(-pl * v(0) - ql * v(1)) / v2, (-pl * v(1) + ql * v(0)) / v2};
}

DeviceModel::DeviceModel(DeviceKind kind, PortRole role, int state_dim, DeviceParams params)
    : kind_(kind), role_(role), state_dim_(state_dim), params_(std::move(params)) {
    cyclic_.assign(static_cast<size_t>(state_dim_), false);
    switch (kind_) {
    case DeviceKind::Sg3:
        cyclic_[0] = true; // rotor angle enters only through T(delta)
        break;
    case DeviceKind::Pll:
        cyclic_[1] = true; // PLL angle enters only through sin/cos
        break;
    case DeviceKind::Vsg:
        // theta is anchored by the K_I integral term unless K_I = 0
        cyclic_[0] = std::get<VsgParams>(params_).ki == 0.0;
        break;
    default:
        break; // droop angles are anchored by theta_ref
    }
}

DeviceModel DeviceModel::sg3(const Sg3Params& p, PortRole role) {
    require_positive(p.m, "m");
    require_nonnegative(p.d, "d");
    require_positive(p.xd, "xd");
    require_positive(p.xd_t, "xd_t");
    require_positive(p.xq, "xq");
    require_positive(p.td0, "td0");
    require_finite(p.pm, "pm");
    require_finite(p.ef, "ef");
    return {DeviceKind::Sg3, role, 3, p};
}

DeviceModel DeviceModel::pll(const PllParams& p) {
    require_positive(p.kp, "kp");
    require_positive(p.ki, "ki");
    require_positive(p.tau1, "tau1");
    require_positive(p.tau2, "tau2");
    require_nonnegative(p.d1, "d1");
    require_nonnegative(p.d2, "d2");
    require_finite(p.pref, "pref");
    require_finite(p.qref, "qref");
    require_positive(p.vref, "vref");
    return {DeviceKind::Pll, PortRole::VoltageInCurrentOut, 4, p};
}

DeviceModel DeviceModel::vsg(const VsgParams& p) {
    require_positive(p.m, "m");
    require_nonnegative(p.d, "d");
    require_positive(p.kq, "kq");
    require_nonnegative(p.ki, "ki");
    require_positive(p.t, "t");
    require_finite(p.pref, "pref");
    require_finite(p.qref, "qref");
    require_positive(p.vref, "vref");
    return {DeviceKind::Vsg, PortRole::CurrentInVoltageOut, 3, p};
}

DeviceModel DeviceModel::cd(const DroopParams& p) {
    require_positive(p.tau1, "tau1");
    require_positive(p.tau2, "tau2");
    require_nonnegative(p.d1, "d1");
    require_nonnegative(p.d2, "d2");
    require_finite(p.theta_ref, "theta_ref");
    require_positive(p.vref, "vref");
    require_finite(p.pref, "pref");
    require_finite(p.qref, "qref");
    return {DeviceKind::Cd, PortRole::CurrentInVoltageOut, 2, p};
}

DeviceModel DeviceModel::qd(const DroopParams& p) {
    require_positive(p.tau1, "tau1");
    require_positive(p.tau2, "tau2");
    require_nonnegative(p.d1, "d1");
    require_nonnegative(p.d2, "d2");
    require_finite(p.theta_ref, "theta_ref");
    require_positive(p.vref, "vref");
    require_finite(p.pref, "pref");
    require_finite(p.qref, "qref");
    return {DeviceKind::Qd, PortRole::CurrentInVoltageOut, 2, p};
}

DeviceModel DeviceModel::intermediate_node() {
    return {DeviceKind::IntermediateNode, PortRole::VoltageInCurrentOut, 0,
            IntermediateParams{}};
}

DeviceModel DeviceModel::const_voltage(const ConstVoltageParams& p) {
    require_finite(p.vd0, "vd0");
    require_finite(p.vq0, "vq0");
    if (std::hypot(p.vd0, p.vq0) < kVoltageFloor) {
        throw ValidationError("constant voltage source magnitude below voltage floor");
    }
    return {DeviceKind::ConstVoltage, PortRole::CurrentInVoltageOut, 0, p};
}

DeviceModel DeviceModel::zip(const ZipParams& p) {
    require_nonnegative(p.zp, "zp");
    require_nonnegative(p.zq, "zq");
    require_nonnegative(p.ip, "ip");
    require_nonnegative(p.iq, "iq");
    require_nonnegative(p.p0, "p0");
    require_nonnegative(p.q0, "q0");
    return {DeviceKind::Zip, PortRole::VoltageInCurrentOut, 0, p};
}

DeviceModel DeviceModel::build(DeviceKind kind, const DeviceParams& params,
                               std::optional<PortRole> role_override) {
    switch (kind) {
    case DeviceKind::Sg3:
        return sg3(std::get<Sg3Params>(params),
                   role_override.value_or(PortRole::VoltageInCurrentOut));
    case DeviceKind::Pll:
        return pll(std::get<PllParams>(params));
    case DeviceKind::Vsg:
        return vsg(std::get<VsgParams>(params));
    case DeviceKind::Cd:
        return cd(std::get<DroopParams>(params));
    case DeviceKind::Qd:
        return qd(std::get<DroopParams>(params));
    case DeviceKind::IntermediateNode:
        return intermediate_node();
    case DeviceKind::ConstVoltage:
        return const_voltage(std::get<ConstVoltageParams>(params));
    case DeviceKind::Zip:
        return zip(std::get<ZipParams>(params));
    }
    throw ValidationError("unknown device kind");
}

VectorXd DeviceModel::dynamics(const VectorXd& x, const Vector2d& u) const {
    if (x.size() != state_dim_) {
        throw ValidationError("state dimension mismatch");
    }
    VectorXd f(state_dim_);
    switch (kind_) {
    case DeviceKind::Sg3: {
        const auto& p = std::get<Sg3Params>(params_);
        const SgPoint s = role_ == PortRole::VoltageInCurrentOut
                              ? sg_point_vin(p, x(0), x(2), u)
                              : sg_point_iin(p, x(0), x(2), u);
        f(0) = x(1);
        f(1) = (-p.d * x(1) - s.pe + p.pm) / p.m;
        // demagnetizing armature reaction: the current along the EMF axis
        // (local q in this frame) drives the flux decay
        f(2) = (-x(2) + s.iq * (p.xd - p.xd_t) + p.ef) / p.td0;
        return f;
    }
    case DeviceKind::Pll: {
        const auto& p = std::get<PllParams>(params_);
        const double vm = u.norm();
        check_voltage(vm);
        const double cd = std::cos(x(1));
        const double sd = std::sin(x(1));
        const double e = u(1) * cd - u(0) * sd; // V sin(theta - delta_pll)
        const double wp = p.kp * e + p.ki * x(0);
        f(0) = e;
        f(1) = wp;
        f(2) = (-x(2) + p.pref - p.d1 * wp) / p.tau1;
        f(3) = (-x(3) + p.qref - p.d2 * (vm - p.vref)) / p.tau2;
        return f;
    }
    case DeviceKind::Vsg: {
        const auto& p = std::get<VsgParams>(params_);
        check_voltage(x(2));
        const VSourceFlow w = vsource_flow(x(0), x(2), u);
        f(0) = x(1);
        f(1) = (-p.d * x(1) - w.p + p.pref - p.ki * x(0)) / p.m;
        f(2) = (-(x(2) - p.vref) + p.kq * (p.qref - w.q) / x(2)) / p.t;
        return f;
    }
    case DeviceKind::Cd: {
        const auto& p = std::get<DroopParams>(params_);
        check_voltage(x(1));
        const VSourceFlow w = vsource_flow(x(0), x(1), u);
        f(0) = (-(x(0) - p.theta_ref) - p.d1 * (w.p - p.pref)) / p.tau1;
        f(1) = (-(x(1) - p.vref) - p.d2 * (w.q - p.qref)) / p.tau2;
        return f;
    }
    case DeviceKind::Qd: {
        const auto& p = std::get<DroopParams>(params_);
        check_voltage(x(1));
        const VSourceFlow w = vsource_flow(x(0), x(1), u);
        f(0) = (-(x(0) - p.theta_ref) - p.d1 * (w.p - p.pref)) / p.tau1;
        f(1) = (-p.d2 * w.q - x(1) * (x(1) - qd_uref(p))) / p.tau2;
        return f;
    }
    default:
        return f; // static devices: empty
    }
}

Vector2d DeviceModel::output(const VectorXd& x, const Vector2d& u) const {
    switch (kind_) {
    case DeviceKind::Sg3: {
        const auto& p = std::get<Sg3Params>(params_);
        if (role_ == PortRole::VoltageInCurrentOut) {
            const SgPoint s = sg_point_vin(p, x(0), x(2), u);
            // y = -I_DQ = -T(delta)^T I_dq
            return {-(s.c * s.id - s.s * s.iq), -(s.s * s.id + s.c * s.iq)};
        }
        const SgPoint s = sg_point_iin(p, x(0), x(2), u);
        // y = V_DQ = T(delta)^T V_dq
        return {s.c * s.vd - s.s * s.vq, s.s * s.vd + s.c * s.vq};
    }
    case DeviceKind::Pll: {
        const double v2 = u.squaredNorm();
        check_voltage(std::sqrt(v2));
        const double id = (x(2) * u(0) + x(3) * u(1)) / v2;
        const double iq = (x(2) * u(1) - x(3) * u(0)) / v2;
        return {-id, -iq};
    }
    case DeviceKind::Vsg:
        return {x(2) * std::cos(x(0)), x(2) * std::sin(x(0))};
    case DeviceKind::Cd:
    case DeviceKind::Qd:
        return {x(1) * std::cos(x(0)), x(1) * std::sin(x(0))};
    case DeviceKind::IntermediateNode:
        return Vector2d::Zero();
    case DeviceKind::ConstVoltage: {
        const auto& p = std::get<ConstVoltageParams>(params_);
        return {p.vd0, p.vq0};
    }
    case DeviceKind::Zip:
        return -zip_injection(std::get<ZipParams>(params_), u);
    }
    return Vector2d::Zero();
}

JacobianSet DeviceModel::jacobians(const VectorXd& x, const Vector2d& u) const {
    JacobianSet j;
    const int n = state_dim_;
    j.a.setZero(n, n);
    j.b.setZero(n, 2);
    j.cm.setZero(2, n);
    j.dm.setZero();

    switch (kind_) {
    case DeviceKind::Sg3: {
        const auto& p = std::get<Sg3Params>(params_);
        if (role_ == PortRole::VoltageInCurrentOut) {
            const SgPoint s = sg_point_vin(p, x(0), x(2), u);
            // local quantities vs (delta, E'q, u)
            const double dvd_dd = s.vq;
            const double dvq_dd = -s.vd;
            const Vector2d dvd_du{s.c, s.s};
            const Vector2d dvq_du{-s.s, s.c};
            const double did_dd = -dvq_dd / p.xq;
            const Vector2d did_du = -dvq_du / p.xq;
            const double diq_dd = dvd_dd / p.xd_t;
            const double diq_de = -1.0 / p.xd_t;
            const Vector2d diq_du = dvd_du / p.xd_t;
            // Pe = vd id + vq iq
            const double dpe_dd = dvd_dd * s.id + s.vd * did_dd + dvq_dd * s.iq + s.vq * diq_dd;
            const double dpe_de = s.vq * diq_de;
            const Vector2d dpe_du = dvd_du * s.id + s.vd * did_du + dvq_du * s.iq + s.vq * diq_du;
            j.a(0, 1) = 1.0;
            j.a(1, 0) = -dpe_dd / p.m;
            j.a(1, 1) = -p.d / p.m;
            j.a(1, 2) = -dpe_de / p.m;
            j.a(2, 0) = (p.xd - p.xd_t) * diq_dd / p.td0;
            j.a(2, 2) = (-1.0 + (p.xd - p.xd_t) * diq_de) / p.td0;
            j.b.row(1) = -dpe_du.transpose() / p.m;
            j.b.row(2) = (p.xd - p.xd_t) / p.td0 * diq_du.transpose();
            // y = -(T^T I_dq)
            const double dID_dd = -s.s * s.id + s.c * did_dd - s.c * s.iq - s.s * diq_dd;
            const double dIQ_dd = s.c * s.id + s.s * did_dd - s.s * s.iq + s.c * diq_dd;
            const double dID_de = -s.s * diq_de;
            const double dIQ_de = s.c * diq_de;
            const Vector2d dID_du = s.c * did_du - s.s * diq_du;
            const Vector2d dIQ_du = s.s * did_du + s.c * diq_du;
            j.cm(0, 0) = -dID_dd;
            j.cm(0, 2) = -dID_de;
            j.cm(1, 0) = -dIQ_dd;
            j.cm(1, 2) = -dIQ_de;
            j.dm.row(0) = -dID_du.transpose();
            j.dm.row(1) = -dIQ_du.transpose();
        } else {
            const SgPoint s = sg_point_iin(p, x(0), x(2), u);
            const double did_dd = s.iq;  // d/d delta of -(c u0 + s u1) = -(-s u0 + c u1)
            const double diq_dd = -s.id; // d/d delta of -(-s u0 + c u1) = -(c u0 + s u1)
            const Vector2d did_du{-s.c, -s.s};
            const Vector2d diq_du{s.s, -s.c};
            const double dvd_dd = p.xd_t * diq_dd;
            const double dvq_dd = -p.xq * did_dd;
            const Vector2d dvd_du = p.xd_t * diq_du;
            const Vector2d dvq_du = -p.xq * did_du;
            const double dpe_dd = dvd_dd * s.id + s.vd * did_dd + dvq_dd * s.iq + s.vq * diq_dd;
            const double dpe_de = s.id; // dvd/dE = 1
            const Vector2d dpe_du = dvd_du * s.id + s.vd * did_du + dvq_du * s.iq + s.vq * diq_du;
            j.a(0, 1) = 1.0;
            j.a(1, 0) = -dpe_dd / p.m;
            j.a(1, 1) = -p.d / p.m;
            j.a(1, 2) = -dpe_de / p.m;
            j.a(2, 0) = (p.xd - p.xd_t) * diq_dd / p.td0;
            j.a(2, 2) = -1.0 / p.td0;
            j.b.row(1) = -dpe_du.transpose() / p.m;
            j.b.row(2) = (p.xd - p.xd_t) / p.td0 * diq_du.transpose();
            // y = T^T V_dq
            const double dy0_dd = -s.s * s.vd + s.c * dvd_dd - s.c * s.vq - s.s * dvq_dd;
            const double dy1_dd = s.c * s.vd + s.s * dvd_dd - s.s * s.vq + s.c * dvq_dd;
            j.cm(0, 0) = dy0_dd;
            j.cm(0, 2) = s.c; // dvd/dE = 1, dvq/dE = 0
            j.cm(1, 0) = dy1_dd;
            j.cm(1, 2) = s.s;
            j.dm.row(0) = (s.c * dvd_du - s.s * dvq_du).transpose();
            j.dm.row(1) = (s.s * dvd_du + s.c * dvq_du).transpose();
        }
        return j;
    }
    case DeviceKind::Pll: {
        const auto& p = std::get<PllParams>(params_);
        const double v2 = u.squaredNorm();
        const double vm = std::sqrt(v2);
        check_voltage(vm);
        const double cd = std::cos(x(1));
        const double sd = std::sin(x(1));
        const double de_dd = -u(1) * sd - u(0) * cd;
        const Vector2d de_du{-sd, cd};
        j.a(0, 1) = de_dd;
        j.a(1, 0) = p.ki;
        j.a(1, 1) = p.kp * de_dd;
        j.a(2, 0) = -p.d1 * p.ki / p.tau1;
        j.a(2, 1) = -p.d1 * p.kp * de_dd / p.tau1;
        j.a(2, 2) = -1.0 / p.tau1;
        j.a(3, 3) = -1.0 / p.tau2;
        j.b.row(0) = de_du.transpose();
        j.b.row(1) = p.kp * de_du.transpose();
        j.b.row(2) = -p.d1 / p.tau1 * p.kp * de_du.transpose();
        j.b.row(3) = -p.d2 / p.tau2 / vm * u.transpose();
        // y = -(I_D, I_Q), I_D = (P u0 + Q u1)/v2, I_Q = (P u1 - Q u0)/v2
        const double P = x(2), Q = x(3);
        const double id = (P * u(0) + Q * u(1)) / v2;
        const double iq = (P * u(1) - Q * u(0)) / v2;
        j.cm(0, 2) = -u(0) / v2;
        j.cm(0, 3) = -u(1) / v2;
        j.cm(1, 2) = -u(1) / v2;
        j.cm(1, 3) = u(0) / v2;
        j.dm(0, 0) = -(P - 2.0 * u(0) * id) / v2;
        j.dm(0, 1) = -(Q - 2.0 * u(1) * id) / v2;
        j.dm(1, 0) = -(-Q - 2.0 * u(0) * iq) / v2;
        j.dm(1, 1) = -(P - 2.0 * u(1) * iq) / v2;
        return j;
    }
    case DeviceKind::Vsg: {
        const auto& p = std::get<VsgParams>(params_);
        check_voltage(x(2));
        const VSourceFlow w = vsource_flow(x(0), x(2), u);
        const double v = x(2);
        j.a(0, 1) = 1.0;
        j.a(1, 0) = (-w.dp_dth - p.ki) / p.m;
        j.a(1, 1) = -p.d / p.m;
        j.a(1, 2) = -w.dp_dv / p.m;
        j.a(2, 0) = -p.kq * w.dq_dth / (v * p.t);
        j.a(2, 2) = (-1.0 + p.kq * (-w.dq_dv * v - (p.qref - w.q)) / (v * v)) / p.t;
        j.b.row(1) = -w.dp_du.transpose() / p.m;
        j.b.row(2) = -p.kq / (v * p.t) * w.dq_du.transpose();
        const double c = std::cos(x(0)), s = std::sin(x(0));
        j.cm << -v * s, 0.0, c, v * c, 0.0, s;
        return j;
    }
    case DeviceKind::Cd: {
        const auto& p = std::get<DroopParams>(params_);
        check_voltage(x(1));
        const VSourceFlow w = vsource_flow(x(0), x(1), u);
        j.a(0, 0) = (-1.0 - p.d1 * w.dp_dth) / p.tau1;
        j.a(0, 1) = -p.d1 * w.dp_dv / p.tau1;
        j.a(1, 0) = -p.d2 * w.dq_dth / p.tau2;
        j.a(1, 1) = (-1.0 - p.d2 * w.dq_dv) / p.tau2;
        j.b.row(0) = -p.d1 / p.tau1 * w.dp_du.transpose();
        j.b.row(1) = -p.d2 / p.tau2 * w.dq_du.transpose();
        const double c = std::cos(x(0)), s = std::sin(x(0));
        j.cm << -x(1) * s, c, x(1) * c, s;
        return j;
    }
    case DeviceKind::Qd: {
        const auto& p = std::get<DroopParams>(params_);
        check_voltage(x(1));
        const VSourceFlow w = vsource_flow(x(0), x(1), u);
        j.a(0, 0) = (-1.0 - p.d1 * w.dp_dth) / p.tau1;
        j.a(0, 1) = -p.d1 * w.dp_dv / p.tau1;
        j.a(1, 0) = -p.d2 * w.dq_dth / p.tau2;
        j.a(1, 1) = (-p.d2 * w.dq_dv - 2.0 * x(1) + qd_uref(p)) / p.tau2;
        j.b.row(0) = -p.d1 / p.tau1 * w.dp_du.transpose();
        j.b.row(1) = -p.d2 / p.tau2 * w.dq_du.transpose();
        const double c = std::cos(x(0)), s = std::sin(x(0));
        j.cm << -x(1) * s, c, x(1) * c, s;
        return j;
    }
    case DeviceKind::IntermediateNode:
    case DeviceKind::ConstVoltage:
        return j; // dm = 0
    case DeviceKind::Zip: {
        const auto& p = std::get<ZipParams>(params_);
        const double v2 = u.squaredNorm();
        const double vm = std::sqrt(v2);
        check_voltage(vm);
        // h = K(V) u with K = [[kp, kq], [-kq, kp]], kp = zp + ip/V + p0/V^2
        const double kp = p.zp + p.ip / vm + p.p0 / v2;
        const double kq = p.zq + p.iq / vm + p.q0 / v2;
        const double kp_v = -p.ip / v2 - 2.0 * p.p0 / (v2 * vm);
        const double kq_v = -p.iq / v2 - 2.0 * p.q0 / (v2 * vm);
        Matrix2d K;
        K << kp, kq, -kq, kp;
        Vector2d g{kp_v * u(0) + kq_v * u(1), -kq_v * u(0) + kp_v * u(1)};
        j.dm = K + g * u.transpose() / vm;
        return j;
    }
    }
    return j;
}

double DeviceModel::injected_power(const VectorXd& x, const Vector2d& u) const {
    return -u.dot(output(x, u));
}

std::string to_string(DeviceKind kind) {
    switch (kind) {
    case DeviceKind::Sg3: return "sg3";
    case DeviceKind::Pll: return "pll";
    case DeviceKind::Vsg: return "vsg";
    case DeviceKind::Cd: return "cd";
    case DeviceKind::Qd: return "qd";
    case DeviceKind::IntermediateNode: return "intermediate";
    case DeviceKind::ConstVoltage: return "const_voltage";
    case DeviceKind::Zip: return "zip";
    }
    return "?";
}

std::string to_string(PortRole role) {
    return role == PortRole::CurrentInVoltageOut ? "current_in" : "voltage_in";
}

} // namespace gridcert
