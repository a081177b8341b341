#include "nhim/jets.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <ostream>
#include <utility>

#include "nhim/errors.hpp"

namespace nhim {

namespace detail {

struct MonomialTable {
    struct Product {
        std::uint32_t i, j, k;
    };

    int nvars = 0;
    int order = 0;
    std::vector<std::vector<int>> exps;
    std::vector<int> degree;
    std::map<std::vector<int>, std::size_t> index;
    std::vector<Product> products;
    // exps[k] = exps[parent[k]] + e_{var[k]} for k > 0.
    std::vector<std::size_t> parent;
    std::vector<int> var;
};

namespace {

void append_degree(int nvars, int remaining, int pos, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
    if (pos == nvars - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[pos] = e;
        append_degree(nvars, remaining - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

std::shared_ptr<const MonomialTable> build_table(int nvars, int order) {
    auto t = std::make_shared<MonomialTable>();
    t->nvars = nvars;
    t->order = order;
    if (nvars == 0) {
        t->exps.emplace_back();
    } else {
        std::vector<int> cur(nvars, 0);
        for (int d = 0; d <= order; ++d) append_degree(nvars, d, 0, cur, t->exps);
    }
    for (std::size_t k = 0; k < t->exps.size(); ++k) {
        int deg = 0;
        for (int e : t->exps[k]) deg += e;
        t->degree.push_back(deg);
        t->index.emplace(t->exps[k], k);
    }
    const std::size_t n = t->exps.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (t->degree[i] + t->degree[j] > order) continue;
            std::vector<int> sum = t->exps[i];
            for (int v = 0; v < nvars; ++v) sum[v] += t->exps[j][v];
            t->products.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                   static_cast<std::uint32_t>(t->index.at(sum))});
        }
    }
    t->parent.assign(n, 0);
    t->var.assign(n, -1);
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<int> e = t->exps[k];
        int v = 0;
        while (e[v] == 0) ++v;
        e[v] -= 1;
        t->parent[k] = t->index.at(e);
        t->var[k] = v;
    }
    return t;
}

std::shared_ptr<const MonomialTable> table_for(int nvars, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(nvars, order);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto t = build_table(nvars, order);
    cache.emplace(key, t);
    return t;
}

}  // namespace
}  // namespace detail

TruncPoly::TruncPoly(int nvars, int order) : nvars_(nvars), order_(order) {
    if (nvars < 0 || order < 0) throw ShapeError("TruncPoly needs nvars >= 0 and order >= 0");
    table_ = detail::table_for(nvars, order);
    coeffs_.assign(table_->exps.size(), 0.0);
}

TruncPoly TruncPoly::constant(int nvars, int order, double value) {
    TruncPoly p(nvars, order);
    p.coeffs_[0] = value;
    return p;
}

TruncPoly TruncPoly::variable(int nvars, int order, int index, double value) {
    if (index < 0 || index >= nvars) throw ShapeError("variable index out of range");
    TruncPoly p(nvars, order);
    p.coeffs_[0] = value;
    if (order >= 1) {
        std::vector<int> e(nvars, 0);
        e[index] = 1;
        p.coeffs_[p.table_->index.at(e)] = 1.0;
    }
    return p;
}

double TruncPoly::coeff(const std::vector<int>& exponents) const {
    if (static_cast<int>(exponents.size()) != nvars_) throw ShapeError("multi-index length mismatch");
    auto it = table_->index.find(exponents);
    return it == table_->index.end() ? 0.0 : coeffs_[it->second];
}

void TruncPoly::set_coeff(const std::vector<int>& exponents, double value) {
    if (static_cast<int>(exponents.size()) != nvars_) throw ShapeError("multi-index length mismatch");
    auto it = table_->index.find(exponents);
    if (it == table_->index.end()) throw ShapeError("multi-index above truncation order");
    coeffs_[it->second] = value;
}

const std::vector<int>& TruncPoly::exponents(std::size_t k) const { return table_->exps.at(k); }

int TruncPoly::degree(std::size_t k) const { return table_->degree.at(k); }

double TruncPoly::eval(const std::vector<double>& h) const {
    if (static_cast<int>(h.size()) != nvars_) throw ShapeError("evaluation point has wrong length");
    std::vector<double> mono(coeffs_.size(), 1.0);
    double sum = coeffs_.empty() ? 0.0 : coeffs_[0];
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        mono[k] = mono[table_->parent[k]] * h[table_->var[k]];
        sum += coeffs_[k] * mono[k];
    }
    return sum;
}

double TruncPoly::max_abs_of_degree(int d) const {
    double best = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        if (table_->degree[k] == d) best = std::max(best, std::fabs(coeffs_[k]));
    }
    return best;
}

void TruncPoly::require_compatible(const TruncPoly& o) const {
    if (nvars_ != o.nvars_) throw ShapeError("TruncPoly variable-count mismatch");
    if (order_ != o.order_) throw ShapeError("TruncPoly truncation-order mismatch");
}

TruncPoly& TruncPoly::operator+=(const TruncPoly& o) {
    require_compatible(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
}

TruncPoly& TruncPoly::operator-=(const TruncPoly& o) {
    require_compatible(o);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
}

TruncPoly& TruncPoly::operator*=(const TruncPoly& o) { return *this = *this * o; }

TruncPoly& TruncPoly::operator+=(double c) {
    coeffs_.at(0) += c;
    return *this;
}

TruncPoly& TruncPoly::operator-=(double c) {
    coeffs_.at(0) -= c;
    return *this;
}

TruncPoly& TruncPoly::operator*=(double c) {
    for (double& v : coeffs_) v *= c;
    return *this;
}

TruncPoly operator+(TruncPoly a, const TruncPoly& b) { return a += b; }
TruncPoly operator-(TruncPoly a, const TruncPoly& b) { return a -= b; }
TruncPoly operator-(TruncPoly a) { return a *= -1.0; }
TruncPoly operator+(TruncPoly a, double c) { return a += c; }
TruncPoly operator+(double c, TruncPoly a) { return a += c; }
TruncPoly operator-(TruncPoly a, double c) { return a -= c; }
TruncPoly operator-(double c, const TruncPoly& a) { return -a + c; }
TruncPoly operator*(TruncPoly a, double c) { return a *= c; }
TruncPoly operator*(double c, TruncPoly a) { return a *= c; }

TruncPoly operator*(const TruncPoly& a, const TruncPoly& b) {
    a.require_compatible(b);
    TruncPoly out(a.nvars_, a.order_);
    for (const auto& p : a.table_->products) {
        double x = a.coeffs_[p.i];
        double y = b.coeffs_[p.j];
        if (x != 0.0 && y != 0.0) out.coeffs_[p.k] += x * y;
    }
    return out;
}

TruncPoly sqr(const TruncPoly& a) { return a * a; }

namespace {

// cos(h) and sin(h) for h with zero constant term.
std::pair<TruncPoly, TruncPoly> cos_sin_nilpotent(const TruncPoly& h) {
    TruncPoly c = TruncPoly::constant(h.nvars(), h.order(), 1.0);
    TruncPoly s(h.nvars(), h.order());
    TruncPoly power = TruncPoly::constant(h.nvars(), h.order(), 1.0);
    double factorial = 1.0;
    for (int k = 1; k <= h.order(); ++k) {
        power = power * h;
        factorial *= k;
        double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            c += power * (sign / factorial);
        } else {
            s += power * (sign / factorial);
        }
    }
    return {c, s};
}

}  // namespace

TruncPoly sin(const TruncPoly& a) {
    double a0 = a.constant_term();
    TruncPoly h = a - a0;
    auto [ch, sh] = cos_sin_nilpotent(h);
    return ch * std::sin(a0) + sh * std::cos(a0);
}

TruncPoly cos(const TruncPoly& a) {
    double a0 = a.constant_term();
    TruncPoly h = a - a0;
    auto [ch, sh] = cos_sin_nilpotent(h);
    return ch * std::cos(a0) - sh * std::sin(a0);
}

TruncPoly compose(const TruncPoly& outer, const JetMap& inner) {
    if (static_cast<int>(inner.size()) != outer.nvars()) {
        throw ShapeError("compose: outer variable count differs from number of inner polynomials");
    }
    if (inner.empty()) return outer;
    const int nv = inner[0].nvars();
    const int order = inner[0].order();
    for (const auto& p : inner) {
        if (p.nvars() != nv || p.order() != order) throw ShapeError("compose: inner polynomials differ in shape");
        if (p.constant_term() != 0.0) throw ShapeError("compose: inner polynomial has nonzero constant term");
    }
    const auto& table = *outer.table_;
    std::vector<TruncPoly> powers(outer.size());
    TruncPoly result = TruncPoly::constant(nv, order, outer.coeffs_[0]);
    powers[0] = TruncPoly::constant(nv, order, 1.0);
    for (std::size_t k = 1; k < outer.size(); ++k) {
        // Monomials above the inner truncation order vanish identically.
        if (table.degree[k] > order) break;
        powers[k] = powers[table.parent[k]] * inner[table.var[k]];
        if (outer.coeffs_[k] != 0.0) result += powers[k] * outer.coeffs_[k];
    }
    return result;
}

JetMap compose(const JetMap& outer, const JetMap& inner) {
    JetMap out;
    out.reserve(outer.size());
    for (const auto& p : outer) out.push_back(compose(p, inner));
    return out;
}

JetMap identity_jet(int nvars, int order) {
    JetMap id;
    for (int i = 0; i < nvars; ++i) id.push_back(TruncPoly::variable(nvars, order, i));
    return id;
}

Eigen::MatrixXd linear_part(const JetMap& p) {
    if (p.empty()) return Eigen::MatrixXd(0, 0);
    const int nv = p[0].nvars();
    Eigen::MatrixXd a(static_cast<Eigen::Index>(p.size()), nv);
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (int j = 0; j < nv; ++j) {
            std::vector<int> e(nv, 0);
            e[j] = 1;
            a(static_cast<Eigen::Index>(i), j) = p[i].order() >= 1 ? p[i].coeff(e) : 0.0;
        }
    }
    return a;
}

namespace {

JetMap apply_matrix(const Eigen::MatrixXd& m, const JetMap& p) {
    JetMap out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        TruncPoly acc(p[0].nvars(), p[0].order());
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) acc += p[j] * m(i, j);
        }
        out.push_back(acc);
    }
    return out;
}

}  // namespace

JetMap tpoly_inverse(const JetMap& p) {
    if (p.empty()) return p;
    const int n = p[0].nvars();
    const int order = p[0].order();
    if (static_cast<int>(p.size()) != n) throw ShapeError("tpoly_inverse needs as many components as variables");
    for (const auto& c : p) {
        if (c.nvars() != n || c.order() != order) throw ShapeError("tpoly_inverse: components differ in shape");
        if (c.constant_term() != 0.0) throw ShapeError("tpoly_inverse needs p(0) = 0");
    }
    Eigen::MatrixXd a = linear_part(p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw SingularJetError("tpoly_inverse: singular linear part");
    Eigen::MatrixXd a_inv = lu.inverse();

    JetMap id = identity_jet(n, order);
    JetMap nonlinear = p;
    JetMap linear = apply_matrix(a, id);
    for (int i = 0; i < n; ++i) nonlinear[i] -= linear[i];

    // q = A^{-1} (id - N(q)); each pass fixes one more degree.
    JetMap q = apply_matrix(a_inv, id);
    for (int pass = 1; pass < order; ++pass) {
        JetMap nq = compose(nonlinear, q);
        JetMap rhs = id;
        for (int i = 0; i < n; ++i) rhs[i] -= nq[i];
        q = apply_matrix(a_inv, rhs);
    }
    return q;
}

JetMap without_constants(JetMap p) {
    for (auto& c : p) {
        if (c.size() > 0) c.set_constant_term(0.0);
    }
    return p;
}

double degree_norm(const JetMap& p, int d) {
    double sum = 0.0;
    for (const auto& c : p) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c.degree(k) == d) sum += c[k] * c[k];
        }
    }
    return std::sqrt(sum);
}

std::ostream& operator<<(std::ostream& os, const TruncPoly& p) {
    bool first = true;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) continue;
        os << (first ? "" : " + ") << p[k];
        const auto& e = p.exponents(k);
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (e[v] == 1) os << "*h" << v;
            if (e[v] > 1) os << "*h" << v << '^' << e[v];
        }
        first = false;
    }
    if (first) os << '0';
    return os;
}

}  // namespace nhim
