#pragma once

#include "gridcert/devices.hpp"
#include "gridcert/lmi.hpp"

#include <iosfwd>
#include <optional>

namespace gridcert {

// Quadratic supply rate on (du/dt, dy/dt), partitioned X = [[Q, S], [S^T, R]].
class SupplyRateMatrix {
public:
    SupplyRateMatrix() { x_.setZero(); }
    explicit SupplyRateMatrix(const Matrix4d& x);
    static SupplyRateMatrix from_blocks(const Matrix2d& q, const Matrix2d& s,
                                        const Matrix2d& r);

    const Matrix4d& full() const { return x_; }
    Matrix2d q_block() const { return x_.topLeftCorner<2, 2>(); }
    Matrix2d s_block() const { return x_.topRightCorner<2, 2>(); }
    Matrix2d r_block() const { return x_.bottomRightCorner<2, 2>(); }

private:
    Matrix4d x_;
};

// One scenario point with the jacobians frozen there.
struct LmiSample {
    VectorXd x;
    Vector2d u;
    JacobianSet jac;
};

struct DissipativityCertificate {
    std::string device;
    std::optional<MatrixXd> storage; // P, absent for static devices
    SupplyRateMatrix supply;
    double epsilon = 0.0;
    std::vector<double> sample_margins;
};

// Prop-1 left-hand side, (n+m)x(n+m); degenerates to -[I;D]^T X [I;D] for
// n = 0, which is the negated static condition.
MatrixXd lmi_lhs_dynamic(const JacobianSet& j, const MatrixXd& p,
                         const Matrix4d& x, double epsilon);
// Static condition value [I;D]^T X [I;D] (pass requires >= 0).
Matrix2d lmi_lhs_static(const Matrix2d& dm, const Matrix4d& x);

// Negative margin means the point is certified; static margins are stored
// negated so that "<= 0 means pass" holds uniformly.
double margin_dynamic(const JacobianSet& j, const MatrixXd& p, const Matrix4d& x,
                      double epsilon);
double margin_static(const Matrix2d& dm, const Matrix4d& x);

double check_pointwise(const DeviceModel& m, const DissipativityCertificate& c,
                       const VectorXd& x, const Vector2d& u);

struct VerifyOptions {
    double epsilon = 1e-4;
    double delta_pd = 1e-6;    // representable floor for P > 0
    double cap = 1e3;          // spectral cap on P and X
    double feas_margin = 1e-6; // required recomputed sample margin (<= -this)
    bool r_negative = true;    // standalone certificates: require R <= 0
    double reg = 1e-5;
    lmi::Settings solver = make_solver_settings();

    static lmi::Settings make_solver_settings() {
        lmi::Settings s;
        s.max_iter = 8000;
        s.eps_abs = 1e-8;
        s.eps_rel = 1e-8;
        return s;
    }
};

struct VerifyOutcome {
    bool feasible = false;
    DissipativityCertificate cert;
    double achieved_margin = 0.0; // optimal slack t*
    lmi::Status solver_status = lmi::Status::error;
    std::string diagnostics;
};

VerifyOutcome verify_dynamic(const DeviceModel& m, const std::vector<LmiSample>& samples,
                             const VerifyOptions& opts = {});
VerifyOutcome verify_static(const DeviceModel& m, const std::vector<LmiSample>& samples,
                            const VerifyOptions& opts = {});

// Closed-form admissible families (intermediate node / constant voltage:
// Q psd; constant-impedance load: Q >= -zp I, S = I/2, R psd).
bool analytic_family_check(DeviceKind kind, const SupplyRateMatrix& x,
                           const ZipParams* zip = nullptr, double tol = 1e-9);

// Scenario sampling: a tensor grid over the input plane at the nominal state
// plus one-axis-at-a-time state perturbations at the nominal input.
struct SampleSpec {
    int input_grid = 5;
    double input_halfwidth = 0.25;
    int state_points = 5;
    double state_rel = 0.2;
    double state_floor = 0.1;
};
std::vector<LmiSample> sample_scenarios(const DeviceModel& m, const VectorXd& x0,
                                        const Vector2d& u0, const SampleSpec& spec = {});

enum class Membership { certified, uncertified, outside_box };

struct DissipativeRegion {
    std::string device;
    std::vector<std::pair<double, double>> box; // per axis: states then inputs
    std::vector<int> res;                       // nodes per axis (>= 2)
    std::vector<double> margins;                // flattened node margins
    double guard = 1e-8;
    VectorXd nominal;
    bool nominal_certified = false;

    int axes() const { return static_cast<int>(box.size()); }
    size_t node_count() const;
    size_t flat_index(const std::vector<int>& idx) const;
};

DissipativeRegion characterize_region(const DeviceModel& m,
                                      const DissipativityCertificate& c,
                                      const std::vector<std::pair<double, double>>& box,
                                      const std::vector<int>& res,
                                      const VectorXd& nominal, double guard = 1e-8);

Membership membership(const DissipativeRegion& r, const VectorXd& point);

// Fresh 2-D cross-section on (axis1, axis2) with the other coordinates held
// at the region's nominal point; columns axis1, axis2, margin, certified.
void export_region_csv(const DeviceModel& m, const DissipativityCertificate& c,
                       const DissipativeRegion& r, int axis1, int axis2,
                       int res, std::ostream& os);

} // namespace gridcert
