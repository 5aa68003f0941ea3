#include "faridge/polysys.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <tuple>
#include <utility>

namespace faridge {

namespace {

using Int128 = __int128;

unsigned __int128 uabs128(Int128 x) {
    return x < 0 ? -static_cast<unsigned __int128>(x) : static_cast<unsigned __int128>(x);
}

unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
    while (b != 0) {
        const unsigned __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits_int64(Int128 x) {
    return x >= static_cast<Int128>(std::numeric_limits<long long>::min()) &&
           x <= static_cast<Int128>(std::numeric_limits<long long>::max());
}

// Operand bound that keeps every product and two-product sum below 2^126.
bool headroom(long long num, long long den) {
    const unsigned long long bound = 1ULL << 62;
    const unsigned long long a = num < 0 ? -static_cast<unsigned long long>(num)
                                         : static_cast<unsigned long long>(num);
    return a <= bound && static_cast<unsigned long long>(den) <= bound;
}

}  // namespace

Coeff Coeff::inexact(double x) {
    Coeff c;
    c.exact_ = false;
    c.num_ = 0;
    c.den_ = 1;
    c.val_ = x;
    return c;
}

namespace {

// Reduces n/d with d > 0 and packs it, falling back to the double
// approximation when the reduced pair leaves int64 range.
Coeff make_rational128(Int128 n, Int128 d, double approx) {
    if (d <= 0) throw UsageError("rational coefficient needs a positive denominator");
    if (n == 0) return Coeff(0);
    const unsigned __int128 g = gcd128(uabs128(n), static_cast<unsigned __int128>(d));
    n /= static_cast<Int128>(g);
    d /= static_cast<Int128>(g);
    if (!fits_int64(n) || !fits_int64(d)) return Coeff::inexact(approx);
    return Coeff::rational(static_cast<long long>(n), static_cast<long long>(d));
}

}  // namespace

Coeff Coeff::rational(long long num, long long den) {
    if (den == 0) throw UsageError("rational coefficient with zero denominator");
    Int128 n = num;
    Int128 d = den;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    if (n == 0) return Coeff(0);
    const unsigned __int128 g = gcd128(uabs128(n), static_cast<unsigned __int128>(d));
    n /= static_cast<Int128>(g);
    d /= static_cast<Int128>(g);
    Coeff c;
    c.exact_ = true;
    c.num_ = static_cast<long long>(n);
    c.den_ = static_cast<long long>(d);
    c.val_ = 0.0;
    return c;
}

Coeff Coeff::from_double(double x) {
    if (!std::isfinite(x)) throw UsageError("coefficient must be finite");
    if (x == 0.0) return Coeff(0);
    int e = 0;
    const double m = std::frexp(x, &e);
    const double scaled = std::ldexp(m, 53);
    const long long mant = static_cast<long long>(scaled);
    const int shift = e - 53;
    if (shift >= 0) {
        if (shift > 9) return inexact(x);
        return make_rational128(static_cast<Int128>(mant) << shift, 1, x);
    }
    if (shift < -62) return inexact(x);
    return make_rational128(mant, Int128(1) << (-shift), x);
}

double Coeff::value() const {
    if (exact_) return static_cast<double>(num_) / static_cast<double>(den_);
    return val_;
}

bool Coeff::is_zero() const { return exact_ ? num_ == 0 : val_ == 0.0; }

std::string Coeff::str() const {
    if (exact_) {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", val_);
    std::string s(buf);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find('E') == std::string::npos) {
        s += ".0";
    }
    return s;
}

namespace {

long long parse_int64(const std::string& text) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &pos);
    } catch (const std::exception&) {
        throw UsageError("bad integer '" + text + "' in coefficient");
    }
    if (pos != text.size()) throw UsageError("bad integer '" + text + "' in coefficient");
    return v;
}

}  // namespace

Coeff Coeff::parse(const std::string& text) {
    if (text.empty()) throw UsageError("empty coefficient");
    const std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
        return rational(parse_int64(text.substr(0, slash)), parse_int64(text.substr(slash + 1)));
    }
    if (text.find('.') != std::string::npos || text.find('e') != std::string::npos ||
        text.find('E') != std::string::npos) {
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || !std::isfinite(v)) {
            throw UsageError("bad coefficient '" + text + "'");
        }
        return inexact(v);
    }
    return Coeff(parse_int64(text));
}

Coeff Coeff::operator+(const Coeff& o) const {
    if (exact_ && o.exact_ && headroom(num_, den_) && headroom(o.num_, o.den_)) {
        const Int128 n = Int128(num_) * o.den_ + Int128(o.num_) * den_;
        const Int128 d = Int128(den_) * o.den_;
        return make_rational128(n, d, value() + o.value());
    }
    return inexact(value() + o.value());
}

Coeff Coeff::operator-(const Coeff& o) const { return *this + (-o); }

Coeff Coeff::operator*(const Coeff& o) const {
    if (exact_ && o.exact_ && headroom(num_, den_) && headroom(o.num_, o.den_)) {
        const Int128 n = Int128(num_) * o.num_;
        const Int128 d = Int128(den_) * o.den_;
        return make_rational128(n, d, value() * o.value());
    }
    return inexact(value() * o.value());
}

Coeff Coeff::operator-() const {
    if (exact_) {
        if (num_ == std::numeric_limits<long long>::min()) return inexact(-value());
        Coeff c = *this;
        c.num_ = -c.num_;
        return c;
    }
    return inexact(-val_);
}

Coeff& Coeff::operator+=(const Coeff& o) {
    *this = *this + o;
    return *this;
}

bool Coeff::operator==(const Coeff& o) const {
    if (exact_ != o.exact_) return false;
    if (exact_) return num_ == o.num_ && den_ == o.den_;
    return val_ == o.val_;
}

bool GrlexGreater::operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    const long da = std::accumulate(a.begin(), a.end(), 0L);
    const long db = std::accumulate(b.begin(), b.end(), 0L);
    if (da != db) return da > db;
    return a > b;
}

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
    if (nvars < 0) throw UsageError("polynomial needs a nonnegative variable count");
}

Polynomial Polynomial::constant(int nvars, const Coeff& c) {
    Polynomial poly(nvars);
    poly.add_term(std::vector<int>(static_cast<std::size_t>(nvars), 0), c);
    return poly;
}

Polynomial Polynomial::variable(int nvars, int index) {
    if (index < 0 || index >= nvars) {
        throw UsageError("variable index " + std::to_string(index) + " out of range for " +
                         std::to_string(nvars) + " variables");
    }
    Polynomial poly(nvars);
    std::vector<int> exps(static_cast<std::size_t>(nvars), 0);
    exps[static_cast<std::size_t>(index)] = 1;
    poly.add_term(exps, Coeff(1));
    return poly;
}

void Polynomial::add_term(const std::vector<int>& exponents, const Coeff& c) {
    if (static_cast<int>(exponents.size()) != nvars_) {
        throw UsageError("exponent vector length " + std::to_string(exponents.size()) +
                         " does not match " + std::to_string(nvars_) + " variables");
    }
    for (const int e : exponents) {
        if (e < 0) throw UsageError("negative exponent in polynomial term");
    }
    if (c.is_zero()) return;
    auto it = terms_.find(exponents);
    if (it == terms_.end()) {
        terms_.emplace(exponents, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

double Polynomial::evaluate(const Eigen::VectorXd& point) const {
    if (point.size() != nvars_) {
        throw UsageError("evaluation point has " + std::to_string(point.size()) +
                         " coordinates, expected " + std::to_string(nvars_));
    }
    double total = 0.0;
    for (const auto& [exps, coeff] : terms_) {
        double term = coeff.value();
        for (int j = 0; j < nvars_; ++j) {
            for (int e = exps[static_cast<std::size_t>(j)]; e > 0; --e) term *= point(j);
        }
        total += term;
    }
    return total;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (nvars_ != o.nvars_) throw UsageError("polynomial variable counts differ");
    for (const auto& [exps, coeff] : o.terms_) add_term(exps, coeff);
    return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial out = *this;
    out += o;
    return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (nvars_ != o.nvars_) throw UsageError("polynomial variable counts differ");
    Polynomial out(nvars_);
    std::vector<int> exps(static_cast<std::size_t>(nvars_), 0);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (std::size_t j = 0; j < exps.size(); ++j) exps[j] = ea[j] + eb[j];
            out.add_term(exps, ca * cb);
        }
    }
    return out;
}

Polynomial Polynomial::operator-() const { return scaled(Coeff(-1)); }

Polynomial Polynomial::scaled(const Coeff& c) const {
    Polynomial out(nvars_);
    for (const auto& [exps, coeff] : terms_) out.add_term(exps, coeff * c);
    return out;
}

Polynomial Polynomial::with_trailing_vars(int extra) const {
    if (extra < 0) throw UsageError("cannot extend a polynomial by a negative variable count");
    Polynomial out(nvars_ + extra);
    std::vector<int> exps;
    for (const auto& [e, coeff] : terms_) {
        exps = e;
        exps.resize(static_cast<std::size_t>(nvars_ + extra), 0);
        out.add_term(exps, coeff);
    }
    return out;
}

bool Polynomial::operator==(const Polynomial& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
}

namespace {

std::string indexed_name(const char* family, int k, int l) {
    return std::string(family) + "_" + std::to_string(k + 1) + "_" + std::to_string(l + 1);
}

void check_build_shape(int p, int q) {
    if (p < 2 || q < 1 || q >= p) {
        throw UsageError("system shape needs 1 <= q < p, got p = " + std::to_string(p) +
                         ", q = " + std::to_string(q));
    }
    if (p > 4) {
        throw UsageError("polynomial systems are supported for p <= 4, got p = " +
                         std::to_string(p));
    }
}

// Variable layout shared by the numeric and symbolic builders. The numeric
// layout omits the leading c block and the trailing x block.
struct Layout {
    int p = 0;
    int q = 0;
    bool symbolic = false;
    const SampleCovariance* cov = nullptr;

    int nsym() const { return p * (p + 1) / 2; }
    int nvars() const {
        const int core = p + p * q + FactorParams::r_size(q) + 1;
        return symbolic ? core + 2 * nsym() : core;
    }
    int upper_index(int i, int j) const { return i * p - i * (i - 1) / 2 + (j - i); }

    int c_index(int i, int j) const { return upper_index(std::min(i, j), std::max(i, j)); }
    int tau_index(int k) const { return (symbolic ? nsym() : 0) + k; }
    int b_index(int k, int l) const { return tau_index(p - 1) + 1 + k * p + l; }
    int r_index(int k, int l) const {
        return tau_index(p - 1) + 1 + p * q + FactorParams::r_index(k, l, q);
    }
    int g_index() const { return tau_index(p - 1) + 1 + p * q + FactorParams::r_size(q); }
    int x_index(int i, int j) const {
        return g_index() + 1 + upper_index(std::min(i, j), std::max(i, j));
    }

    Polynomial var(int idx) const { return Polynomial::variable(nvars(), idx); }
    Polynomial kconst(long long v) const { return Polynomial::constant(nvars(), Coeff(v)); }
    Polynomial zero() const { return Polynomial(nvars()); }

    Polynomial cpoly(int i, int j) const {
        if (symbolic) return var(c_index(i, j));
        return Polynomial::constant(nvars(), Coeff::from_double((*cov)(i, j)));
    }
};

using PolyGrid = std::vector<std::vector<Polynomial>>;

PolyGrid poly_grid(const Layout& lay) {
    return PolyGrid(static_cast<std::size_t>(lay.p),
                    std::vector<Polynomial>(static_cast<std::size_t>(lay.p), lay.zero()));
}

// Entries of tau^2 + beta' R beta as polynomials in the layout's variables.
PolyGrid sigma_grid(const Layout& lay) {
    PolyGrid sigma = poly_grid(lay);
    for (int i = 0; i < lay.p; ++i) {
        for (int j = i; j < lay.p; ++j) {
            Polynomial entry = lay.zero();
            if (i == j) {
                const Polynomial t = lay.var(lay.tau_index(i));
                entry += t * t;
            }
            for (int m = 0; m < lay.q; ++m) {
                entry += lay.var(lay.b_index(m, i)) * lay.var(lay.b_index(m, j));
            }
            for (int m = 0; m < lay.q; ++m) {
                for (int n = m + 1; n < lay.q; ++n) {
                    const Polynomial cross = lay.var(lay.b_index(m, i)) * lay.var(lay.b_index(n, j)) +
                                             lay.var(lay.b_index(n, i)) * lay.var(lay.b_index(m, j));
                    entry += lay.var(lay.r_index(m, n)) * cross;
                }
            }
            sigma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = entry;
            sigma[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = entry;
        }
    }
    return sigma;
}

std::vector<Polynomial> flatten_grid(const PolyGrid& grid) {
    std::vector<Polynomial> flat;
    flat.reserve(grid.size() * grid.size());
    for (const auto& row : grid) {
        for (const auto& entry : row) flat.push_back(entry);
    }
    return flat;
}

Polynomial grid_cofactor(const PolyGrid& grid, int i, int j, const Layout& lay) {
    const int n = static_cast<int>(grid.size());
    if (n == 1) return lay.kconst(1);
    std::vector<Polynomial> minor;
    minor.reserve(static_cast<std::size_t>(n - 1) * (n - 1));
    for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0; c < n; ++c) {
            if (c == j) continue;
            minor.push_back(grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
        }
    }
    Polynomial det = det_minor_expansion(minor, n - 1, lay.zero());
    return ((i + j) % 2 == 0) ? det : -det;
}

PolyGrid grid_product(const PolyGrid& a, const PolyGrid& b, const Layout& lay) {
    const std::size_t n = a.size();
    PolyGrid out = poly_grid(lay);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Polynomial entry = lay.zero();
            for (std::size_t k = 0; k < n; ++k) entry += a[i][k] * b[k][j];
            out[i][j] = entry;
        }
    }
    return out;
}

PolynomialSystem build_core(const Layout& lay) {
    const int p = lay.p;
    const int q = lay.q;

    const PolyGrid sigma = sigma_grid(lay);

    // The symbolic system takes determinant and cofactors over the x
    // variables; the appended equations x_ij - Sigma_ij tie them back.
    PolyGrid work = sigma;
    if (lay.symbolic) {
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                work[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    lay.var(lay.x_index(i, j));
            }
        }
    }
    const Polynomial det = det_minor_expansion(flatten_grid(work), p, lay.zero());

    PolyGrid cof = poly_grid(lay);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            cof[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                grid_cofactor(work, i, j, lay);
        }
    }

    PolyGrid cgrid = poly_grid(lay);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            cgrid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = lay.cpoly(i, j);
        }
    }
    const PolyGrid aca = grid_product(grid_product(cof, cgrid, lay), cof, lay);

    // (R beta)_{k j} with unit diagonal correlations.
    std::vector<std::vector<Polynomial>> rb(
        static_cast<std::size_t>(q), std::vector<Polynomial>(static_cast<std::size_t>(p), lay.zero()));
    for (int k = 0; k < q; ++k) {
        for (int j = 0; j < p; ++j) {
            Polynomial entry = lay.var(lay.b_index(k, j));
            for (int m = 0; m < q; ++m) {
                if (m == k) continue;
                entry += lay.var(lay.r_index(std::min(k, m), std::max(k, m))) *
                         lay.var(lay.b_index(m, j));
            }
            rb[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = entry;
        }
    }

    const Polynomial g = lay.var(lay.g_index());
    const Polynomial gg = g * g;

    PolynomialSystem sys;
    sys.variables = lay.symbolic ? symbolic_variables(p, q) : numeric_variables(p, q);

    for (int k = 0; k < p; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const Polynomial t = lay.var(lay.tau_index(k));
        const Polynomial eq =
            (t * g * cof[ku][ku]).scaled(Coeff(2)) - (t * gg * aca[ku][ku]).scaled(Coeff(2));
        sys.polys.push_back(eq);
    }

    for (int k = 0; k < q; ++k) {
        for (int l = 0; l < p; ++l) {
            const std::size_t lu = static_cast<std::size_t>(l);
            Polynomial s1 = lay.zero();
            Polynomial s2 = lay.zero();
            for (int j = 0; j < p; ++j) {
                const std::size_t ju = static_cast<std::size_t>(j);
                const Polynomial& x = rb[static_cast<std::size_t>(k)][ju];
                s1 += x * cof[ju][lu];
                s2 += x * aca[ju][lu];
            }
            sys.polys.push_back((g * s1).scaled(Coeff(2)) - (gg * s2).scaled(Coeff(2)));
        }
    }

    for (int k = 0; k < q; ++k) {
        for (int l = k + 1; l < q; ++l) {
            PolyGrid m = poly_grid(lay);
            for (int i = 0; i < p; ++i) {
                for (int j = 0; j < p; ++j) {
                    m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        lay.var(lay.b_index(k, i)) * lay.var(lay.b_index(l, j)) +
                        lay.var(lay.b_index(l, i)) * lay.var(lay.b_index(k, j));
                }
            }
            Polynomial tr_am = lay.zero();
            for (int i = 0; i < p; ++i) {
                for (int j = 0; j < p; ++j) {
                    tr_am += cof[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                             m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
                }
            }
            const PolyGrid ama = grid_product(grid_product(cof, m, lay), cof, lay);
            Polynomial tr_amac = lay.zero();
            for (int i = 0; i < p; ++i) {
                for (int j = 0; j < p; ++j) {
                    tr_amac += ama[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                               cgrid[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
                }
            }
            sys.polys.push_back(g * tr_am - gg * tr_amac);
        }
    }

    sys.polys.push_back(g * det - lay.kconst(1));

    if (lay.symbolic) {
        for (int i = 0; i < p; ++i) {
            for (int j = i; j < p; ++j) {
                sys.polys.push_back(lay.var(lay.x_index(i, j)) -
                                    sigma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            }
        }
    }
    return sys;
}

}  // namespace

std::vector<std::string> numeric_variables(int p, int q) {
    check_build_shape(p, q);
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p + p * q + FactorParams::r_size(q) + 1));
    for (int k = 0; k < p; ++k) names.push_back("tau" + std::to_string(k + 1));
    for (int k = 0; k < q; ++k) {
        for (int l = 0; l < p; ++l) names.push_back(indexed_name("b", k, l));
    }
    for (int k = 0; k < q; ++k) {
        for (int l = k + 1; l < q; ++l) names.push_back(indexed_name("r", k, l));
    }
    names.push_back("g");
    return names;
}

std::vector<std::string> symbolic_variables(int p, int q) {
    check_build_shape(p, q);
    std::vector<std::string> names;
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) names.push_back(indexed_name("c", i, j));
    }
    const std::vector<std::string> core = numeric_variables(p, q);
    names.insert(names.end(), core.begin(), core.end());
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) names.push_back(indexed_name("x", i, j));
    }
    return names;
}

PolynomialSystem build_system(const SampleCovariance& c, int p, int q) {
    check_build_shape(p, q);
    if (c.dim() != p) {
        throw UsageError("covariance dim " + std::to_string(c.dim()) +
                         " does not match p = " + std::to_string(p));
    }
    Layout lay;
    lay.p = p;
    lay.q = q;
    lay.symbolic = false;
    lay.cov = &c;
    return build_core(lay);
}

PolynomialSystem build_symbolic_system(int p, int q) {
    check_build_shape(p, q);
    Layout lay;
    lay.p = p;
    lay.q = q;
    lay.symbolic = true;
    return build_core(lay);
}

PolynomialSystem substitute_prefix(const PolynomialSystem& sys, int nsub,
                                   const Eigen::VectorXd& values) {
    const int total = static_cast<int>(sys.variables.size());
    if (nsub < 0 || nsub > total) {
        throw UsageError("cannot substitute " + std::to_string(nsub) + " of " +
                         std::to_string(total) + " variables");
    }
    if (values.size() != nsub) {
        throw UsageError("substitution needs " + std::to_string(nsub) + " values, got " +
                         std::to_string(values.size()));
    }
    PolynomialSystem out;
    out.variables.assign(sys.variables.begin() + nsub, sys.variables.end());
    const int rest = total - nsub;
    for (const Polynomial& poly : sys.polys) {
        if (poly.nvars() != total) {
            throw UsageError("system polynomial does not match its variable list");
        }
        Polynomial reduced(rest);
        std::vector<int> tail(static_cast<std::size_t>(rest), 0);
        for (const auto& [exps, coeff] : poly.terms()) {
            Coeff c = coeff;
            for (int j = 0; j < nsub; ++j) {
                const Coeff v = Coeff::from_double(values(j));
                for (int e = exps[static_cast<std::size_t>(j)]; e > 0; --e) c = c * v;
            }
            std::copy(exps.begin() + nsub, exps.end(), tail.begin());
            reduced.add_term(tail, c);
        }
        out.polys.push_back(std::move(reduced));
    }
    return out;
}

Eigen::VectorXd evaluate_system(const PolynomialSystem& sys, const Eigen::VectorXd& point) {
    if (point.size() != static_cast<Eigen::Index>(sys.variables.size())) {
        throw UsageError("point has " + std::to_string(point.size()) + " coordinates, system has " +
                         std::to_string(sys.variables.size()) + " variables");
    }
    Eigen::VectorXd residuals(static_cast<Eigen::Index>(sys.polys.size()));
    for (std::size_t i = 0; i < sys.polys.size(); ++i) {
        residuals(static_cast<Eigen::Index>(i)) = sys.polys[i].evaluate(point);
    }
    return residuals;
}

Eigen::VectorXd DecompositionPoint::to_vector() const {
    Eigen::VectorXd v(11);
    v << c11, c12, c22, tau1, tau2, beta11, beta12, gamma, x11, x12, x22;
    return v;
}

DecompositionPoint DecompositionPoint::from_vector(const Eigen::VectorXd& v) {
    if (v.size() != 11) {
        throw UsageError("ambient point needs 11 coordinates, got " + std::to_string(v.size()));
    }
    DecompositionPoint pt;
    pt.c11 = v(0);
    pt.c12 = v(1);
    pt.c22 = v(2);
    pt.tau1 = v(3);
    pt.tau2 = v(4);
    pt.beta11 = v(5);
    pt.beta12 = v(6);
    pt.gamma = v(7);
    pt.x11 = v(8);
    pt.x12 = v(9);
    pt.x22 = v(10);
    return pt;
}

DecompositionPoint lift_point(const SampleCovariance& c, const FactorParams& params) {
    if (c.dim() != 2 || params.p != 2 || params.q != 1) {
        throw UsageError("ambient lift is defined for p = 2, q = 1");
    }
    const SymMatrix sigma = model_covariance(params);
    const double det = determinant(sigma);
    if (det == 0.0) throw InfeasiblePointError("model covariance is singular at the lift");
    DecompositionPoint pt;
    pt.c11 = c(0, 0);
    pt.c12 = c(0, 1);
    pt.c22 = c(1, 1);
    pt.tau1 = params.tau(0);
    pt.tau2 = params.tau(1);
    pt.beta11 = params.beta(0, 0);
    pt.beta12 = params.beta(0, 1);
    pt.gamma = 1.0 / det;
    pt.x11 = sigma(0, 0);
    pt.x12 = sigma(0, 1);
    pt.x22 = sigma(1, 1);
    return pt;
}

namespace {

enum AmbientVar { kC11 = 0, kC12, kC22, kTau1, kTau2, kB11, kB12, kG, kX11, kX12, kX22 };

Polynomial avar(AmbientVar v) { return Polynomial::variable(11, static_cast<int>(v)); }

Polynomial aconst(long long v) { return Polynomial::constant(11, Coeff(v)); }

}  // namespace

PolynomialSystem j1_system() {
    PolynomialSystem sys;
    sys.variables = symbolic_variables(2, 1);
    sys.polys.push_back(avar(kX22) - avar(kC22));
    sys.polys.push_back(avar(kX12) - avar(kC12));
    sys.polys.push_back(avar(kX11) - avar(kC11));
    sys.polys.push_back(avar(kB11) * avar(kB12) - avar(kC12));
    sys.polys.push_back(avar(kTau2) * avar(kTau2) + avar(kB12) * avar(kB12) - avar(kC22));
    sys.polys.push_back(avar(kTau1) * avar(kTau1) + avar(kB11) * avar(kB11) - avar(kC11));
    sys.polys.push_back(avar(kG) * avar(kC12) * avar(kC12) -
                        avar(kG) * avar(kC11) * avar(kC22) + aconst(1));
    return sys;
}

PolynomialSystem j2_system() {
    PolynomialSystem sys;
    sys.variables = symbolic_variables(2, 1);
    sys.polys.push_back(avar(kX22) - avar(kC22));
    sys.polys.push_back(avar(kX12));
    sys.polys.push_back(avar(kX11) - avar(kC11));
    sys.polys.push_back(avar(kB12));
    sys.polys.push_back(avar(kB11));
    sys.polys.push_back(avar(kTau2) * avar(kTau2) - avar(kC22));
    sys.polys.push_back(avar(kTau1) * avar(kTau1) - avar(kC11));
    sys.polys.push_back(avar(kG) * avar(kC11) * avar(kC22) - aconst(1));
    return sys;
}

Eigen::VectorXd j1_residuals(const DecompositionPoint& pt) {
    return evaluate_system(j1_system(), pt.to_vector());
}

Eigen::VectorXd j2_residuals(const DecompositionPoint& pt) {
    return evaluate_system(j2_system(), pt.to_vector());
}

int jacobian_rank(const PolynomialSystem& generators, const Eigen::VectorXd& point, double h,
                  double rel_threshold) {
    if (h <= 0.0) throw UsageError("jacobian step must be positive");
    const Eigen::Index n = static_cast<Eigen::Index>(generators.variables.size());
    const Eigen::Index m = static_cast<Eigen::Index>(generators.polys.size());
    if (point.size() != n) {
        throw UsageError("point has " + std::to_string(point.size()) + " coordinates, system has " +
                         std::to_string(n) + " variables");
    }
    if (m == 0 || n == 0) return 0;
    Eigen::MatrixXd jac(m, n);
    Eigen::VectorXd shifted = point;
    for (Eigen::Index j = 0; j < n; ++j) {
        shifted(j) = point(j) + h;
        const Eigen::VectorXd hi = evaluate_system(generators, shifted);
        shifted(j) = point(j) - h;
        const Eigen::VectorXd lo = evaluate_system(generators, shifted);
        shifted(j) = point(j);
        jac.col(j) = (hi - lo) / (2.0 * h);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const Eigen::VectorXd sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = rel_threshold * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

ExportFormat parse_export_format(const std::string& name) {
    if (name == "plain") return ExportFormat::Plain;
    if (name == "m2") return ExportFormat::M2Like;
    if (name == "phc") return ExportFormat::PhcLike;
    throw UsageError("unknown system format '" + name + "' (expected plain, m2, or phc)");
}

namespace {

std::string render_polynomial(const Polynomial& poly, const std::vector<std::string>& names) {
    if (poly.nvars() != static_cast<int>(names.size())) {
        throw UsageError("system polynomial does not match its variable list");
    }
    if (poly.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [exps, coeff] : poly.terms()) {
        if (!first) out += " + ";
        first = false;
        out += coeff.str();
        for (std::size_t j = 0; j < exps.size(); ++j) {
            if (exps[j] == 0) continue;
            out += "*" + names[j];
            if (exps[j] > 1) out += "^" + std::to_string(exps[j]);
        }
    }
    return out;
}

}  // namespace

std::string export_system(const PolynomialSystem& sys, ExportFormat format) {
    std::string out;
    switch (format) {
        case ExportFormat::Plain:
            for (const Polynomial& poly : sys.polys) {
                out += render_polynomial(poly, sys.variables) + ";\n";
            }
            return out;
        case ExportFormat::M2Like: {
            out = "R = QQ[";
            for (std::size_t i = 0; i < sys.variables.size(); ++i) {
                if (i > 0) out += ", ";
                out += sys.variables[i];
            }
            out += "];\n";
            if (sys.polys.empty()) return out + "I = ideal(0);\n";
            out += "I = ideal(\n";
            for (std::size_t i = 0; i < sys.polys.size(); ++i) {
                out += "  " + render_polynomial(sys.polys[i], sys.variables);
                out += (i + 1 < sys.polys.size()) ? ",\n" : "\n";
            }
            out += ");\n";
            return out;
        }
        case ExportFormat::PhcLike:
            out = std::to_string(sys.polys.size()) + "\n";
            for (const Polynomial& poly : sys.polys) {
                out += " " + render_polynomial(poly, sys.variables) + ";\n";
            }
            return out;
    }
    throw UsageError("unknown system format");
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

// Category rank c < tau < b < r < g < x, then numeric indices within each.
struct VarKey {
    int cat = 0;
    int i = 0;
    int j = 0;

    bool operator<(const VarKey& o) const {
        return std::tie(cat, i, j) < std::tie(o.cat, o.i, o.j);
    }
};

VarKey classify_variable(const std::string& name) {
    if (name == "g") return VarKey{4, 0, 0};
    if (name.rfind("tau", 0) == 0) {
        const std::string idx = name.substr(3);
        if (!all_digits(idx)) throw UsageError("unknown variable '" + name + "'");
        return VarKey{1, std::stoi(idx), 0};
    }
    static const std::map<char, int> families = {{'c', 0}, {'b', 2}, {'r', 3}, {'x', 5}};
    const auto fam = name.empty() ? families.end() : families.find(name[0]);
    if (fam != families.end() && name.size() >= 5 && name[1] == '_') {
        const std::size_t second = name.find('_', 2);
        if (second != std::string::npos) {
            const std::string a = name.substr(2, second - 2);
            const std::string b = name.substr(second + 1);
            if (all_digits(a) && all_digits(b)) {
                return VarKey{fam->second, std::stoi(a), std::stoi(b)};
            }
        }
    }
    throw UsageError("unknown variable '" + name + "'");
}

struct ParsedTerm {
    Coeff coeff;
    std::vector<std::pair<std::string, int>> powers;
};

std::vector<std::string> split_on(const std::string& text, const std::string& sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + sep.size();
    }
}

std::string strip(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

ParsedTerm parse_term(const std::string& raw) {
    if (raw.empty()) throw UsageError("empty term in polynomial text");
    for (const char ch : raw) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            throw UsageError("malformed term '" + raw + "'");
        }
    }
    const std::vector<std::string> factors = split_on(raw, "*");
    ParsedTerm term;
    term.coeff = Coeff::parse(factors[0]);
    for (std::size_t k = 1; k < factors.size(); ++k) {
        const std::string& factor = factors[k];
        const std::size_t caret = factor.find('^');
        std::string name = factor.substr(0, caret);
        int exp = 1;
        if (caret != std::string::npos) {
            const std::string etext = factor.substr(caret + 1);
            if (!all_digits(etext)) {
                throw UsageError("bad exponent in term '" + raw + "'");
            }
            exp = std::stoi(etext);
        }
        if (name.empty()) throw UsageError("malformed term '" + raw + "'");
        classify_variable(name);
        term.powers.emplace_back(std::move(name), exp);
    }
    return term;
}

}  // namespace

PolynomialSystem parse_system(const std::string& text) {
    std::vector<std::vector<ParsedTerm>> polys;
    std::map<VarKey, std::string> names;

    const std::vector<std::string> statements = split_on(text, ";");
    for (std::size_t s = 0; s + 1 < statements.size(); ++s) {
        const std::string body = strip(statements[s]);
        if (body.empty()) throw UsageError("empty polynomial before ';'");
        std::vector<ParsedTerm> terms;
        for (const std::string& chunk : split_on(body, " + ")) {
            ParsedTerm term = parse_term(chunk);
            for (const auto& [name, exp] : term.powers) {
                (void)exp;
                names.emplace(classify_variable(name), name);
            }
            terms.push_back(std::move(term));
        }
        polys.push_back(std::move(terms));
    }
    if (!statements.empty() && !strip(statements.back()).empty()) {
        throw UsageError("trailing text after the last ';'");
    }

    PolynomialSystem sys;
    std::map<std::string, int> index;
    for (const auto& [key, name] : names) {
        index.emplace(name, static_cast<int>(sys.variables.size()));
        sys.variables.push_back(name);
    }
    const int nvars = static_cast<int>(sys.variables.size());
    for (const auto& terms : polys) {
        Polynomial poly(nvars);
        std::vector<int> exps(static_cast<std::size_t>(nvars), 0);
        for (const ParsedTerm& term : terms) {
            std::fill(exps.begin(), exps.end(), 0);
            for (const auto& [name, exp] : term.powers) {
                exps[static_cast<std::size_t>(index.at(name))] += exp;
            }
            poly.add_term(exps, term.coeff);
        }
        sys.polys.push_back(std::move(poly));
    }
    return sys;
}

Eigen::VectorXd numeric_point(const FactorParams& params, double gamma) {
    const int p = params.p;
    const int q = params.q;
    Eigen::VectorXd point(p + p * q + FactorParams::r_size(q) + 1);
    Eigen::Index at = 0;
    for (int k = 0; k < p; ++k) point(at++) = params.tau(k);
    for (int k = 0; k < q; ++k) {
        for (int l = 0; l < p; ++l) point(at++) = params.beta(k, l);
    }
    for (Eigen::Index k = 0; k < params.r.size(); ++k) point(at++) = params.r(k);
    point(at) = gamma;
    return point;
}

}  // namespace faridge
