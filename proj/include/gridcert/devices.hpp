#pragma once

#include "gridcert/dq.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gridcert {

enum class DeviceKind {
    Sg3,              // 3rd-order synchronous generator
    Pll,              // PLL-synchronized (grid-following) inverter
    Vsg,              // virtual synchronous generator control
    Cd,               // conventional droop control
    Qd,               // quadratic droop control
    IntermediateNode, // passive network bus, zero injection
    ConstVoltage,     // stiff external grid
    Zip               // static ZIP load
};

// u = -I_DQ, y = V_DQ   (device imposes the bus voltage)
// u =  V_DQ, y = -I_DQ  (device imposes the bus current)
enum class PortRole { CurrentInVoltageOut, VoltageInCurrentOut };

struct Sg3Params {
    double m;        // inertia (p.u. power per rad/s^2)
    double d;        // frequency damping (p.u. power per rad/s)
    double xd;       // d-axis synchronous reactance
    double xd_t;     // d-axis transient reactance
    double xq;       // q-axis synchronous reactance
    double td0;      // open-circuit transient time constant (s)
    double pm;       // mechanical power
    double ef;       // excitation voltage
};

struct PllParams {
    double kp;       // PLL proportional gain
    double ki;       // PLL integral gain
    double tau1;     // active power loop time constant
    double tau2;     // reactive power loop time constant
    double d1;       // P-f droop coefficient
    double d2;       // Q-V droop coefficient
    double pref;
    double qref;
    double vref;
};

struct VsgParams {
    double m;        // virtual inertia
    double d;        // virtual damping
    double kq;       // reactive power control coefficient
    double ki;       // frequency integral coefficient
    double t;        // voltage loop time constant
    double pref;
    double qref;
    double vref;
};

// Shared by conventional and quadratic droop; the quadratic variant derives
// its regulation constant u_ref from (vref, qref, d2).
struct DroopParams {
    double tau1;
    double tau2;
    double d1;
    double d2;
    double theta_ref;
    double vref;
    double pref;
    double qref;
};

struct ConstVoltageParams {
    double vd0;
    double vq0;
};

struct ZipParams {
    double zp = 0.0; // constant-impedance P coefficient
    double zq = 0.0; // constant-impedance Q coefficient
    double ip = 0.0; // constant-current P coefficient
    double iq = 0.0; // constant-current Q coefficient
    double p0 = 0.0; // constant-power P
    double q0 = 0.0; // constant-power Q
};

struct IntermediateParams {};

using DeviceParams = std::variant<Sg3Params, PllParams, VsgParams, DroopParams,
                                  ConstVoltageParams, ZipParams, IntermediateParams>;

// Jacobians of (f, h) at a point: a = df/dx, b = df/du, cm = dh/dx, dm = dh/du.
// Static devices carry empty a, b, cm and a 2x2 dm.
struct JacobianSet {
    MatrixXd a;
    MatrixXd b;
    MatrixXd cm;
    Matrix2d dm;
};

// ZIP injection currents I_DQ for a bus voltage V_DQ.
Vector2d zip_injection(const ZipParams& p, const Vector2d& v_dq);

// An immutable device in DQ input-output form. Evaluation is pure.
class DeviceModel {
public:
    static DeviceModel sg3(const Sg3Params& p,
                           PortRole role = PortRole::VoltageInCurrentOut);
    static DeviceModel pll(const PllParams& p);
    static DeviceModel vsg(const VsgParams& p);
    static DeviceModel cd(const DroopParams& p);
    static DeviceModel qd(const DroopParams& p);
    static DeviceModel intermediate_node();
    static DeviceModel const_voltage(const ConstVoltageParams& p);
    static DeviceModel zip(const ZipParams& p);

    static DeviceModel build(DeviceKind kind, const DeviceParams& params,
                             std::optional<PortRole> role_override = {});

    DeviceKind kind() const { return kind_; }
    PortRole port_role() const { return role_; }
    int state_dim() const { return state_dim_; }
    bool is_static() const { return state_dim_ == 0; }
    bool is_dynamic() const { return state_dim_ > 0; }
    const DeviceParams& params() const { return params_; }

    VectorXd dynamics(const VectorXd& x, const Vector2d& u) const;
    Vector2d output(const VectorXd& x, const Vector2d& u) const;
    JacobianSet jacobians(const VectorXd& x, const Vector2d& u) const;

    // States in which the dynamics are 2*pi-periodic (angle coordinates with
    // no absolute anchor); used for wrap-aware equilibrium deduplication.
    const std::vector<bool>& cyclic_states() const { return cyclic_; }

    // Injected power at the port, P = I_D V_D + I_Q V_Q = -u . y in both roles.
    double injected_power(const VectorXd& x, const Vector2d& u) const;

private:
    DeviceModel(DeviceKind kind, PortRole role, int state_dim, DeviceParams params);

    DeviceKind kind_;
    PortRole role_;
    int state_dim_;
    DeviceParams params_;
    std::vector<bool> cyclic_;
};

std::string to_string(DeviceKind kind);
std::string to_string(PortRole role);

} // namespace gridcert
