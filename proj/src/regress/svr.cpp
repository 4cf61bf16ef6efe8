#include "tafs/regress/svr.hpp"

#include "regress/binary_io.hpp"

#include <algorithm>
#include <cmath>

namespace tafs::regress {

namespace {

constexpr double kTau = 1e-12;

double rbf(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b,
           double gamma) {
    return std::exp(-gamma * (a - b).squaredNorm());
}

// Dual over 2m variables: index i < m is alpha_i (sign +1), i >= m is
// alpha*_{i-m} (sign -1). Q_ij = s_i s_j K(i mod m, j mod m).
class SmoSolver {
public:
    SmoSolver(const Matrix& X, const Vector& y, const SvrOptions& options)
        : m_(static_cast<std::size_t>(X.rows())), C_(options.C), tol_(options.tol) {
        kernel_.resize(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = i; j < m_; ++j) {
                const double k = rbf(X.row(static_cast<Eigen::Index>(i)), X.row(static_cast<Eigen::Index>(j)),
                                     options.gamma);
                kernel_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k;
                kernel_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k;
            }
        }
        const std::size_t l = 2 * m_;
        alpha_.assign(l, 0.0);
        sign_.resize(l);
        grad_.resize(l);
        for (std::size_t i = 0; i < m_; ++i) {
            sign_[i] = 1.0;
            sign_[i + m_] = -1.0;
            grad_[i] = options.epsilon - y(static_cast<Eigen::Index>(i));
            grad_[i + m_] = options.epsilon + y(static_cast<Eigen::Index>(i));
        }
        max_iter_ = options.max_iter != 0 ? options.max_iter : std::max<std::size_t>(10'000'000, 100 * m_);
    }

    FitInfo solve() {
        FitInfo info;
        info.converged = false;
        std::size_t iter = 0;
        for (; iter < max_iter_; ++iter) {
            std::size_t i = 0;
            std::size_t j = 0;
            if (!select_working_set(i, j)) {
                info.converged = true;
                break;
            }
            update_pair(i, j);
        }
        info.iterations = iter;
        if (!info.converged) {
            info.warnings.push_back("SVR solver reached the iteration limit of " + std::to_string(max_iter_));
        }
        return info;
    }

    double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < alpha_.size(); ++t) {
            const double yg = sign_[t] * grad_[t];
            if (at_upper(t)) {
                if (sign_[t] < 0) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else if (at_lower(t)) {
                if (sign_[t] > 0) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else {
                ++n_free;
                sum_free += yg;
            }
        }
        return n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    }

    const std::vector<double>& alpha() const { return alpha_; }

private:
    double q(std::size_t a, std::size_t b) const {
        return sign_[a] * sign_[b] * kernel_(static_cast<Eigen::Index>(a % m_), static_cast<Eigen::Index>(b % m_));
    }
    double qd(std::size_t a) const { return kernel_(static_cast<Eigen::Index>(a % m_), static_cast<Eigen::Index>(a % m_)); }
    bool at_upper(std::size_t t) const { return alpha_[t] >= C_; }
    bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }

    // Maximal violating first index, second-order choice of the partner.
    bool select_working_set(std::size_t& out_i, std::size_t& out_j) const {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmax2 = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t gmax_idx = -1;
        std::ptrdiff_t gmin_idx = -1;
        double obj_diff_min = std::numeric_limits<double>::infinity();
        const std::size_t l = alpha_.size();
        for (std::size_t t = 0; t < l; ++t) {
            if (sign_[t] > 0) {
                if (!at_upper(t) && -grad_[t] >= gmax) {
                    gmax = -grad_[t];
                    gmax_idx = static_cast<std::ptrdiff_t>(t);
                }
            } else if (!at_lower(t) && grad_[t] >= gmax) {
                gmax = grad_[t];
                gmax_idx = static_cast<std::ptrdiff_t>(t);
            }
        }
        if (gmax_idx < 0) {
            return false;
        }
        const auto i = static_cast<std::size_t>(gmax_idx);
        for (std::size_t t = 0; t < l; ++t) {
            if (sign_[t] > 0) {
                if (at_lower(t)) {
                    continue;
                }
                const double grad_diff = gmax + grad_[t];
                gmax2 = std::max(gmax2, grad_[t]);
                if (grad_diff > 0) {
                    double quad = qd(i) + qd(t) - 2.0 * sign_[i] * q(i, t);
                    const double obj_diff = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
                    if (obj_diff <= obj_diff_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(t);
                        obj_diff_min = obj_diff;
                    }
                }
            } else {
                if (at_upper(t)) {
                    continue;
                }
                const double grad_diff = gmax - grad_[t];
                gmax2 = std::max(gmax2, -grad_[t]);
                if (grad_diff > 0) {
                    double quad = qd(i) + qd(t) + 2.0 * sign_[i] * q(i, t);
                    const double obj_diff = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
                    if (obj_diff <= obj_diff_min) {
                        gmin_idx = static_cast<std::ptrdiff_t>(t);
                        obj_diff_min = obj_diff;
                    }
                }
            }
        }
        if (gmax + gmax2 < tol_ || gmin_idx < 0) {
            return false;
        }
        out_i = i;
        out_j = static_cast<std::size_t>(gmin_idx);
        return true;
    }

    void update_pair(std::size_t i, std::size_t j) {
        const double old_i = alpha_[i];
        const double old_j = alpha_[j];
        double& ai = alpha_[i];
        double& aj = alpha_[j];
        const double qij = q(i, j);
        if (sign_[i] != sign_[j]) {
            double quad = qd(i) + qd(j) + 2.0 * qij;
            if (quad <= 0) {
                quad = kTau;
            }
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0) {
                if (aj < 0) {
                    aj = 0;
                    ai = diff;
                }
            } else if (ai < 0) {
                ai = 0;
                aj = -diff;
            }
            if (diff > 0) {
                if (ai > C_) {
                    ai = C_;
                    aj = C_ - diff;
                }
            } else if (aj > C_) {
                aj = C_;
                ai = C_ + diff;
            }
        } else {
            double quad = qd(i) + qd(j) - 2.0 * qij;
            if (quad <= 0) {
                quad = kTau;
            }
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C_) {
                if (ai > C_) {
                    ai = C_;
                    aj = sum - C_;
                }
            } else if (aj < 0) {
                aj = 0;
                ai = sum;
            }
            if (sum > C_) {
                if (aj > C_) {
                    aj = C_;
                    ai = sum - C_;
                }
            } else if (ai < 0) {
                ai = 0;
                aj = sum;
            }
        }
        const double di = ai - old_i;
        const double dj = aj - old_j;
        for (std::size_t t = 0; t < alpha_.size(); ++t) {
            grad_[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    std::size_t m_;
    double C_;
    double tol_;
    std::size_t max_iter_ = 0;
    Eigen::MatrixXd kernel_;
    std::vector<double> alpha_;
    std::vector<double> sign_;
    std::vector<double> grad_;
};

}  // namespace

SvrModel::SvrModel(Matrix support, Vector dual_coef, double rho, double gamma, Vector alpha, Vector alpha_star,
                   FitInfo info)
    : RegressorModel(Family::SVR, static_cast<std::size_t>(support.cols()), std::move(info)),
      support_(std::move(support)),
      dual_coef_(std::move(dual_coef)),
      rho_(rho),
      gamma_(gamma),
      alpha_(std::move(alpha)),
      alpha_star_(std::move(alpha_star)) {}

Vector SvrModel::predict_rows(const Matrix& X) const {
    Vector out(X.rows());
    for (Eigen::Index q = 0; q < X.rows(); ++q) {
        double sum = 0.0;
        for (Eigen::Index s = 0; s < support_.rows(); ++s) {
            sum += dual_coef_(s) * rbf(support_.row(s), X.row(q), gamma_);
        }
        out(q) = sum - rho_;
    }
    return out;
}

void SvrModel::save_payload(std::ostream& out) const {
    io::put_f64(out, rho_);
    io::put_f64(out, gamma_);
    io::put_matrix(out, support_);
    io::put_vector(out, dual_coef_);
}

std::unique_ptr<SvrModel> SvrModel::load_payload(std::istream& in, FitInfo info) {
    const double rho = io::get_f64(in);
    const double gamma = io::get_f64(in);
    auto support = io::get_matrix(in);
    auto coef = io::get_vector(in);
    if (coef.size() != support.rows()) {
        throw IoError("corrupt model artifact (SVR support set)");
    }
    return std::make_unique<SvrModel>(std::move(support), std::move(coef), rho, gamma, Vector{}, Vector{},
                                      std::move(info));
}

std::unique_ptr<SvrModel> fit_svr(const Matrix& X, const Vector& y, const SvrOptions& options) {
    SmoSolver solver(X, y, options);
    auto info = solver.solve();
    const auto m = X.rows();
    const auto& a = solver.alpha();
    Vector alpha(m);
    Vector alpha_star(m);
    std::vector<Eigen::Index> support_rows;
    for (Eigen::Index i = 0; i < m; ++i) {
        alpha(i) = a[static_cast<std::size_t>(i)];
        alpha_star(i) = a[static_cast<std::size_t>(i + m)];
        if (alpha(i) - alpha_star(i) != 0.0) {
            support_rows.push_back(i);
        }
    }
    Matrix support(static_cast<Eigen::Index>(support_rows.size()), X.cols());
    Vector coef(static_cast<Eigen::Index>(support_rows.size()));
    for (std::size_t s = 0; s < support_rows.size(); ++s) {
        support.row(static_cast<Eigen::Index>(s)) = X.row(support_rows[s]);
        coef(static_cast<Eigen::Index>(s)) = alpha(support_rows[s]) - alpha_star(support_rows[s]);
    }
    return std::make_unique<SvrModel>(std::move(support), std::move(coef), solver.rho(), options.gamma,
                                      std::move(alpha), std::move(alpha_star), std::move(info));
}

}  // namespace tafs::regress
