#include "gridcert/lmi.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gridcert::lmi {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kRidge = 1e-10;
} // namespace

int svec_dim(int n) { return n * (n + 1) / 2; }

VectorXd svec(const MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    VectorXd v(svec_dim(n));
    int k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            v(k++) = i == j ? m(i, j) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
        }
    }
    return v;
}

MatrixXd smat(const VectorXd& v, int n) {
    MatrixXd m(n, n);
    int k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            const double val = v(k++);
            if (i == j) {
                m(i, j) = val;
            } else {
                m(i, j) = val / kSqrt2;
                m(j, i) = m(i, j);
            }
        }
    }
    return m;
}

void Problem::grow(int by) {
    total_ += by;
    cost_c_.conservativeResize(total_);
    cost_c_.tail(by).setZero();
    quad_w_.conservativeResize(total_);
    quad_w_.tail(by).setZero();
    quad_b_.conservativeResize(total_);
    quad_b_.tail(by).setZero();
}

VarHandle Problem::add_sym_var(int n, std::string name) {
    VarInfo info{n, total_, svec_dim(n), std::move(name)};
    vars_.push_back(info);
    grow(info.coords);
    return {static_cast<int>(vars_.size()) - 1};
}

VarHandle Problem::add_scalar_var(std::string name) {
    VarInfo info{0, total_, 1, std::move(name)};
    vars_.push_back(info);
    grow(1);
    return {static_cast<int>(vars_.size()) - 1};
}

ConstraintBlock& Problem::add_block(int dim) {
    blocks_.emplace_back();
    blocks_.back().dim = dim;
    blocks_.back().g0 = MatrixXd::Zero(dim, dim);
    return blocks_.back();
}

void Problem::bound_spectrum(VarHandle x, double lo, double hi) {
    const int n = vars_[x.id].n;
    {
        auto& blk = add_block(n); // lo*I - X <= 0
        blk.g0 = lo * MatrixXd::Identity(n, n);
        blk.congruences.push_back({x.id, MatrixXd::Identity(n, n), -1.0});
    }
    {
        auto& blk = add_block(n); // X - hi*I <= 0
        blk.g0 = -hi * MatrixXd::Identity(n, n);
        blk.congruences.push_back({x.id, MatrixXd::Identity(n, n), 1.0});
    }
}

void Problem::scalar_upper_bound(VarHandle t, double hi) {
    auto& blk = add_block(1);
    blk.g0(0, 0) = -hi;
    blk.scalars.push_back({t.id, MatrixXd::Ones(1, 1)});
}

void Problem::scalar_lower_bound(VarHandle t, double lo) {
    auto& blk = add_block(1);
    blk.g0(0, 0) = lo;
    blk.scalars.push_back({t.id, -MatrixXd::Ones(1, 1)});
}

void Problem::add_equality(const std::vector<std::pair<VarHandle, double>>& terms,
                           double rhs) {
    VectorXd row = VectorXd::Zero(total_);
    for (const auto& [h, c] : terms) {
        row(vars_[h.id].offset) += c;
    }
    equalities_.emplace_back(std::move(row), rhs);
}

void Problem::add_linear_cost(VarHandle x, const MatrixXd& c) {
    const auto& info = vars_[x.id];
    cost_c_.segment(info.offset, info.coords) += svec(0.5 * (c + c.transpose()));
}

void Problem::add_scalar_cost(VarHandle t, double c) {
    cost_c_(vars_[t.id].offset) += c;
}

void Problem::add_prox(VarHandle x, const MatrixXd& x0, double weight) {
    const auto& info = vars_[x.id];
    quad_w_.segment(info.offset, info.coords).array() += weight;
    quad_b_.segment(info.offset, info.coords) += weight * svec(x0);
}

void Problem::add_reg(VarHandle x, double weight) {
    const auto& info = vars_[x.id];
    quad_w_.segment(info.offset, info.coords).array() += weight;
}

int Problem::var_dim(VarHandle v) const {
    const int n = vars_[v.id].n;
    return n == 0 ? 1 : n;
}

std::string Problem::dump() const {
    std::ostringstream os;
    os << "lmi problem: " << vars_.size() << " vars, " << total_ << " coords, "
       << blocks_.size() << " blocks, " << equalities_.size() << " equalities\n";
    for (size_t i = 0; i < vars_.size(); ++i) {
        os << "  var " << i << " '" << vars_[i].name << "' "
           << (vars_[i].n == 0 ? std::string("scalar")
                               : "sym " + std::to_string(vars_[i].n) + "x" +
                                     std::to_string(vars_[i].n))
           << "\n";
    }
    for (size_t k = 0; k < blocks_.size(); ++k) {
        const auto& b = blocks_[k];
        os << "  block " << k << " dim " << b.dim << ": " << b.congruences.size()
           << " congruence, " << b.lyaps.size() << " lyap, " << b.scalars.size()
           << " scalar terms\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// solver
// ---------------------------------------------------------------------------

class SolverImpl {
public:
    SolverImpl(const Problem& p, const Settings& st) : p_(p), st_(st) {
        d_ = p.total_;
        block_off_.resize(p.blocks_.size());
        int s = 0;
        for (size_t k = 0; k < p.blocks_.size(); ++k) {
            block_off_[k] = s;
            s += svec_dim(p.blocks_[k].dim);
        }
        slack_dim_ = s;
        // per-block normalization keeps O(1) LMIs and large cap blocks on
        // comparable scales in the splitting iteration
        scale_.resize(p.blocks_.size());
        for (size_t k = 0; k < p.blocks_.size(); ++k) {
            const auto& blk = p.blocks_[k];
            double sc = blk.g0.cwiseAbs().maxCoeff();
            for (const auto& c : blk.congruences) {
                sc = std::max(sc, c.f.operatorNorm() * c.f.operatorNorm());
            }
            for (const auto& l : blk.lyaps) {
                sc = std::max(sc, 2.0 * l.l.operatorNorm() * l.r.operatorNorm());
            }
            for (const auto& t : blk.scalars) {
                sc = std::max(sc, t.g.cwiseAbs().maxCoeff());
            }
            scale_[k] = 1.0 / std::max(1.0, sc);
        }
        b_ = VectorXd(slack_dim_);
        for (size_t k = 0; k < p.blocks_.size(); ++k) {
            b_.segment(block_off_[k], svec_dim(p.blocks_[k].dim)) =
                -scale_[k] * svec(p.blocks_[k].g0);
        }
        build_gram();
        if (!p.equalities_.empty()) {
            const int m = static_cast<int>(p.equalities_.size());
            eq_mat_.resize(m, d_);
            eq_rhs_.resize(m);
            for (int i = 0; i < m; ++i) {
                eq_mat_.row(i) = p.equalities_[i].first.transpose();
                eq_rhs_(i) = p.equalities_[i].second;
            }
        }
    }

    Solution run(WarmState* warm);

private:
    const Problem& p_;
    Settings st_;
    int d_ = 0;
    int slack_dim_ = 0;
    std::vector<int> block_off_;
    std::vector<double> scale_;
    VectorXd b_;
    MatrixXd gram_;
    MatrixXd eq_mat_;
    VectorXd eq_rhs_;

    Eigen::LLT<MatrixXd> llt_;
    MatrixXd h_inv_eqt_;
    Eigen::LLT<MatrixXd> eq_llt_;

    void build_gram();
    void add_block_gram_dense(const ConstraintBlock& blk, double sc);
    void add_block_gram_structured(const ConstraintBlock& blk, double sc);
    MatrixXd eval_linear(const ConstraintBlock& blk, const VectorXd& v) const;
    MatrixXd coord_basis(int n, int local) const;
    VectorXd apply_a(const VectorXd& v) const;
    VectorXd apply_at(const VectorXd& w) const;
    void factor(double rho);
    VectorXd solve_kkt(const VectorXd& rhs) const;
    VectorXd project(const VectorXd& w) const;
};

MatrixXd SolverImpl::coord_basis(int n, int local) const {
    MatrixXd e = MatrixXd::Zero(n, n);
    int k = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= j; ++i) {
            if (k == local) {
                if (i == j) {
                    e(i, j) = 1.0;
                } else {
                    e(i, j) = e(j, i) = 1.0 / kSqrt2;
                }
                return e;
            }
            ++k;
        }
    }
    return e;
}

MatrixXd SolverImpl::eval_linear(const ConstraintBlock& blk, const VectorXd& v) const {
    MatrixXd m = MatrixXd::Zero(blk.dim, blk.dim);
    for (const auto& c : blk.congruences) {
        const auto& info = p_.vars_[c.var];
        const MatrixXd x = smat(v.segment(info.offset, info.coords), info.n);
        m.noalias() += c.sign * c.f.transpose() * x * c.f;
    }
    for (const auto& l : blk.lyaps) {
        const auto& info = p_.vars_[l.var];
        const MatrixXd x = smat(v.segment(info.offset, info.coords), info.n);
        const MatrixXd lp = l.l.transpose() * x * l.r;
        m.noalias() += lp + lp.transpose();
    }
    for (const auto& s : blk.scalars) {
        m.noalias() += v(p_.vars_[s.var].offset) * s.g;
    }
    return m;
}

VectorXd SolverImpl::apply_a(const VectorXd& v) const {
    VectorXd out(slack_dim_);
    for (size_t k = 0; k < p_.blocks_.size(); ++k) {
        out.segment(block_off_[k], svec_dim(p_.blocks_[k].dim)) =
            scale_[k] * svec(eval_linear(p_.blocks_[k], v));
    }
    return out;
}

VectorXd SolverImpl::apply_at(const VectorXd& w) const {
    VectorXd out = VectorXd::Zero(d_);
    for (size_t k = 0; k < p_.blocks_.size(); ++k) {
        const auto& blk = p_.blocks_[k];
        const MatrixXd lam =
            scale_[k] * smat(w.segment(block_off_[k], svec_dim(blk.dim)), blk.dim);
        for (const auto& c : blk.congruences) {
            const auto& info = p_.vars_[c.var];
            const MatrixXd g = c.sign * c.f * lam * c.f.transpose();
            out.segment(info.offset, info.coords) += svec(g);
        }
        for (const auto& l : blk.lyaps) {
            const auto& info = p_.vars_[l.var];
            const MatrixXd g =
                l.l * lam * l.r.transpose() + l.r * lam * l.l.transpose();
            out.segment(info.offset, info.coords) += svec(g);
        }
        for (const auto& s : blk.scalars) {
            out(p_.vars_[s.var].offset) += (lam.array() * s.g.array()).sum();
        }
    }
    return out;
}

void SolverImpl::add_block_gram_dense(const ConstraintBlock& blk, double sc) {
    std::vector<int> coords;
    auto touch = [&](int var) {
        const auto& info = p_.vars_[var];
        for (int c = 0; c < info.coords; ++c) coords.push_back(info.offset + c);
    };
    for (const auto& c : blk.congruences) touch(c.var);
    for (const auto& l : blk.lyaps) touch(l.var);
    for (const auto& s : blk.scalars) touch(s.var);
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

    const int sd = svec_dim(blk.dim);
    MatrixXd a(sd, static_cast<int>(coords.size()));
    for (size_t j = 0; j < coords.size(); ++j) {
        MatrixXd m = MatrixXd::Zero(blk.dim, blk.dim);
        const int coord = coords[j];
        for (const auto& c : blk.congruences) {
            const auto& info = p_.vars_[c.var];
            if (coord < info.offset || coord >= info.offset + info.coords) continue;
            const MatrixXd e = coord_basis(info.n, coord - info.offset);
            m.noalias() += c.sign * c.f.transpose() * e * c.f;
        }
        for (const auto& l : blk.lyaps) {
            const auto& info = p_.vars_[l.var];
            if (coord < info.offset || coord >= info.offset + info.coords) continue;
            const MatrixXd e = coord_basis(info.n, coord - info.offset);
            const MatrixXd lp = l.l.transpose() * e * l.r;
            m.noalias() += lp + lp.transpose();
        }
        for (const auto& s : blk.scalars) {
            if (p_.vars_[s.var].offset == coord) m.noalias() += s.g;
        }
        a.col(static_cast<int>(j)) = svec(m);
    }
    const MatrixXd ata = sc * sc * a.transpose() * a;
    for (size_t i = 0; i < coords.size(); ++i) {
        for (size_t j = 0; j < coords.size(); ++j) {
            gram_(coords[i], coords[j]) += ata(static_cast<int>(i), static_cast<int>(j));
        }
    }
}

void SolverImpl::add_block_gram_structured(const ConstraintBlock& blk, double sc) {
    // congruence/scalar terms only; pairwise inner products through the
    // small cross matrices M = F1 F2^T, never materializing block columns
    auto basis_product = [](const MatrixXd& m, int n1, int n2, MatrixXd& out) {
        out.resize(svec_dim(n1), svec_dim(n2));
        int a = 0;
        for (int q = 0; q < n1; ++q) {
            for (int p = 0; p <= q; ++p) {
                int bcol = 0;
                for (int s = 0; s < n2; ++s) {
                    for (int r = 0; r <= s; ++r) {
                        double val;
                        if (p == q && r == s) {
                            val = m(p, r) * m(p, r);
                        } else if (p == q) {
                            val = kSqrt2 * m(p, r) * m(p, s);
                        } else if (r == s) {
                            val = kSqrt2 * m(p, r) * m(q, r);
                        } else {
                            val = m(p, r) * m(q, s) + m(p, s) * m(q, r);
                        }
                        out(a, bcol) = val;
                        ++bcol;
                    }
                }
                ++a;
            }
        }
    };

    MatrixXd cross;
    for (size_t i = 0; i < blk.congruences.size(); ++i) {
        const auto& ci = blk.congruences[i];
        const auto& vi = p_.vars_[ci.var];
        for (size_t l = i; l < blk.congruences.size(); ++l) {
            const auto& cl = blk.congruences[l];
            const auto& vl = p_.vars_[cl.var];
            const MatrixXd m = ci.f * cl.f.transpose();
            basis_product(m, vi.n, vl.n, cross);
            cross *= sc * sc * ci.sign * cl.sign;
            for (int a = 0; a < vi.coords; ++a) {
                for (int bcol = 0; bcol < vl.coords; ++bcol) {
                    gram_(vi.offset + a, vl.offset + bcol) += cross(a, bcol);
                    if (l != i) {
                        gram_(vl.offset + bcol, vi.offset + a) += cross(a, bcol);
                    }
                }
            }
        }
        for (const auto& s : blk.scalars) {
            const MatrixXd w = ci.sign * ci.f * s.g * ci.f.transpose();
            const VectorXd col = sc * sc * svec(0.5 * (w + w.transpose()));
            const int tc = p_.vars_[s.var].offset;
            for (int a = 0; a < vi.coords; ++a) {
                gram_(vi.offset + a, tc) += col(a);
                gram_(tc, vi.offset + a) += col(a);
            }
        }
    }
    for (size_t i = 0; i < blk.scalars.size(); ++i) {
        for (size_t l = i; l < blk.scalars.size(); ++l) {
            const double v =
                sc * sc * (blk.scalars[i].g.array() * blk.scalars[l].g.array()).sum();
            const int a = p_.vars_[blk.scalars[i].var].offset;
            const int bcol = p_.vars_[blk.scalars[l].var].offset;
            gram_(a, bcol) += v;
            if (l != i) gram_(bcol, a) += v;
        }
    }
}

void SolverImpl::build_gram() {
    gram_ = MatrixXd::Zero(d_, d_);
    for (size_t k = 0; k < p_.blocks_.size(); ++k) {
        const auto& blk = p_.blocks_[k];
        if (blk.dim <= 20 || !blk.lyaps.empty()) {
            add_block_gram_dense(blk, scale_[k]);
        } else {
            add_block_gram_structured(blk, scale_[k]);
        }
    }
}

void SolverImpl::factor(double rho) {
    MatrixXd h = rho * gram_;
    h.diagonal() += p_.quad_w_;
    h.diagonal().array() += kRidge * (1.0 + rho);
    llt_.compute(h);
    if (eq_mat_.rows() > 0) {
        h_inv_eqt_ = llt_.solve(eq_mat_.transpose());
        eq_llt_.compute(eq_mat_ * h_inv_eqt_);
    }
}

VectorXd SolverImpl::solve_kkt(const VectorXd& rhs) const {
    VectorXd v = llt_.solve(rhs);
    if (eq_mat_.rows() > 0) {
        const VectorXd lam = eq_llt_.solve(eq_mat_ * v - eq_rhs_);
        v -= h_inv_eqt_ * lam;
    }
    return v;
}

VectorXd SolverImpl::project(const VectorXd& w) const {
    VectorXd out(slack_dim_);
    for (size_t k = 0; k < p_.blocks_.size(); ++k) {
        const int n = p_.blocks_[k].dim;
        const int sd = svec_dim(n);
        if (n == 1) {
            out(block_off_[k]) = std::max(0.0, w(block_off_[k]));
            continue;
        }
        const MatrixXd m = smat(w.segment(block_off_[k], sd), n);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
        const VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        out.segment(block_off_[k], sd) =
            svec(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
    }
    return out;
}

Solution SolverImpl::run(WarmState* warm) {
    Solution sol;
    double rho = st_.rho;
    VectorXd v = VectorXd::Zero(d_);
    VectorXd s = VectorXd::Zero(slack_dim_);
    VectorXd u = VectorXd::Zero(slack_dim_);
    if (warm && warm->valid && warm->v.size() == d_ && warm->s.size() == slack_dim_) {
        v = warm->v;
        s = warm->s;
        u = warm->u;
        if (warm->rho > 0) rho = warm->rho;
    }
    factor(rho);

    const double bnorm = b_.norm();
    int it = 0;
    bool converged = false;
    for (it = 1; it <= st_.max_iter; ++it) {
        const VectorXd rhs = p_.quad_b_ - p_.cost_c_ + rho * apply_at(b_ - s - u);
        v = solve_kkt(rhs);
        const VectorXd av = apply_a(v);
        const VectorXd h = st_.alpha * av + (1.0 - st_.alpha) * (b_ - s);
        const VectorXd s_old = s;
        s = project(b_ - h - u);
        u += h + s - b_;

        const double rp = (av + s - b_).norm();
        const double rd = rho * apply_at(s - s_old).norm();
        const double ep = std::sqrt(double(slack_dim_)) * st_.eps_abs +
                          st_.eps_rel * std::max({av.norm(), s.norm(), bnorm});
        const double ed = std::sqrt(double(d_)) * st_.eps_abs +
                          st_.eps_rel * rho * apply_at(u).norm();
        if (!std::isfinite(rp) || !std::isfinite(rd)) {
            sol.status = Status::error;
            sol.diagnostic = "numerical breakdown (non-finite residuals)";
            sol.iterations = it;
            return sol;
        }
        if (st_.verbose && it % 1000 == 0) {
            std::fprintf(stderr, "  lmi it=%d rp=%.3e/%.3e rd=%.3e/%.3e rho=%.3e\n",
                         it, rp, ep, rd, ed, rho);
        }
        if (rp <= ep && rd <= ed) {
            converged = true;
            break;
        }
        if (it % 100 == 0) {
            const double un = u.norm();
            if (un > 1e-12 && it > 200) {
                const VectorXd yn = u / un;
                const double bty = b_.dot(yn);
                const double atn = apply_at(yn).norm();
                if (bty < -1e-7 && atn < 1e-6) {
                    sol.status = Status::infeasible;
                    sol.diagnostic = "primal infeasibility certificate: |A'y|=" +
                                     std::to_string(atn) +
                                     ", b'y=" + std::to_string(bty);
                    sol.iterations = it;
                    return sol;
                }
            }
            const double rel_p = rp / std::max(ep, 1e-300);
            const double rel_d = rd / std::max(ed, 1e-300);
            const double ratio = std::sqrt(rel_p / std::max(rel_d, 1e-300));
            if (ratio > 2.0 || ratio < 0.5) {
                const double f = std::min(5.0, std::max(0.2, ratio));
                u /= f;
                rho *= f;
                factor(rho);
            }
        }
    }

    sol.iterations = std::min(it, st_.max_iter);
    for (size_t i = 0; i < p_.vars_.size(); ++i) {
        const auto& info = p_.vars_[i];
        if (info.n == 0) {
            sol.scalars[static_cast<int>(i)] = v(info.offset);
        } else {
            sol.matrices[static_cast<int>(i)] =
                smat(v.segment(info.offset, info.coords), info.n);
        }
    }
    double viol = 0.0;
    for (const auto& blk : p_.blocks_) {
        const MatrixXd m = eval_linear(blk, v) + blk.g0;
        if (blk.dim == 1) {
            viol = std::max(viol, m(0, 0));
        } else {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
            viol = std::max(viol, es.eigenvalues().maxCoeff());
        }
    }
    if (eq_mat_.rows() > 0) {
        viol = std::max(viol, (eq_mat_ * v - eq_rhs_).cwiseAbs().maxCoeff());
    }
    sol.max_violation = std::max(0.0, viol);
    sol.objective = p_.cost_c_.dot(v) + 0.5 * v.dot(p_.quad_w_.asDiagonal() * v) -
                    p_.quad_b_.dot(v);
    if (converged && sol.max_violation <= 1e-6) {
        sol.status = Status::optimal;
    } else {
        sol.status = Status::inaccurate;
        sol.diagnostic = converged ? "converged but violation above tolerance"
                                   : "iteration limit reached";
    }
    if (warm) {
        warm->v = v;
        warm->s = s;
        warm->u = u;
        warm->rho = rho;
        warm->valid = true;
    }
    return sol;
}

Solution solve(const Problem& p, const Settings& settings, WarmState* warm) {
    SolverImpl impl(p, settings);
    return impl.run(warm);
}

const char* to_string(Status s) {
    switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::inaccurate: return "inaccurate";
    case Status::error: return "error";
    }
    return "?";
}

} // namespace gridcert::lmi
