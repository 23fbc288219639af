#pragma once

#include "gridcert/common.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace gridcert::lmi {

// Scalarization of symmetric matrices that preserves the Frobenius inner
// product: off-diagonal entries are scaled by sqrt(2).
VectorXd svec(const MatrixXd& m);
MatrixXd smat(const VectorXd& v, int n);
int svec_dim(int n);

struct VarHandle {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// An affine symmetric-matrix expression constrained to "<= 0" (negative
// semidefinite). Expressions are sums of terms:
//   const G0   |  sign * F^T X F   |  L^T P R + R^T P L  |  t * G
struct ConstraintBlock {
    int dim = 0;
    MatrixXd g0; // constant part

    struct Congruence {
        int var;
        MatrixXd f; // var_dim x block_dim
        double sign;
    };
    struct Lyap {
        int var;
        MatrixXd l; // var_dim x block_dim
        MatrixXd r; // var_dim x block_dim
    };
    struct ScalarTerm {
        int var;
        MatrixXd g;
    };

    std::vector<Congruence> congruences;
    std::vector<Lyap> lyaps;
    std::vector<ScalarTerm> scalars;
};

class Problem {
public:
    VarHandle add_sym_var(int n, std::string name = {});
    VarHandle add_scalar_var(std::string name = {});

    // expr <= 0 block; fill via the returned reference
    ConstraintBlock& add_block(int dim);

    // convenience: X >= lo*I  and  X <= hi*I
    void bound_spectrum(VarHandle x, double lo, double hi);
    // scalar bounds, encoded as 1x1 blocks
    void scalar_upper_bound(VarHandle t, double hi);
    void scalar_lower_bound(VarHandle t, double lo);

    // sum_j coeff_j * scalar_j = rhs
    void add_equality(const std::vector<std::pair<VarHandle, double>>& terms, double rhs);

    // objective: minimize  sum <C,X> + sum c*t + sum (w/2)*||X - X0||_F^2
    void add_linear_cost(VarHandle x, const MatrixXd& c);
    void add_scalar_cost(VarHandle t, double c);
    void add_prox(VarHandle x, const MatrixXd& x0, double weight);
    void add_reg(VarHandle x, double weight);

    int var_dim(VarHandle v) const;      // matrix order, 1 for scalars
    int total_coords() const { return total_; }
    std::string dump() const;            // debugging aid

private:
    friend class SolverImpl;
    struct VarInfo {
        int n;       // matrix order; 0 marks a scalar
        int offset;  // first coordinate in the stacked vector
        int coords;  // number of coordinates
        std::string name;
    };
    std::vector<VarInfo> vars_;
    std::vector<ConstraintBlock> blocks_;
    std::vector<std::pair<VectorXd, double>> equalities_; // dense row, rhs
    VectorXd cost_c_{VectorXd::Zero(0)};
    VectorXd quad_w_{VectorXd::Zero(0)};  // diagonal quadratic weights
    VectorXd quad_b_{VectorXd::Zero(0)};  // accumulated w * svec(center)
    int total_ = 0;

    void grow(int by);
};

enum class Status { optimal, infeasible, inaccurate, error };

struct Settings {
    int max_iter = 50000;
    double eps_abs = 1e-9;
    double eps_rel = 1e-9;
    double rho = 1.0;
    double alpha = 1.6; // over-relaxation
    bool verbose = false;
};

struct Solution {
    Status status = Status::error;
    std::map<int, MatrixXd> matrices;  // by var id
    std::map<int, double> scalars;
    double objective = 0.0;
    double max_violation = 0.0;        // recomputed from returned variables
    int iterations = 0;
    std::string diagnostic;

    MatrixXd matrix(VarHandle h) const { return matrices.at(h.id); }
    double scalar(VarHandle h) const { return scalars.at(h.id); }
};

// Reusable dual/slack state for warm-started repeated solves of problems
// with identical block structure.
struct WarmState {
    VectorXd v, s, u;
    double rho = 0.0;
    bool valid = false;
};

Solution solve(const Problem& p, const Settings& settings = {},
               WarmState* warm = nullptr);

const char* to_string(Status s);

} // namespace gridcert::lmi
