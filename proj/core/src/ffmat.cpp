#include "levin/ffmat.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <utility>

namespace levin {

BigInt big_pow(std::uint64_t base, std::uint64_t exponent) {
    return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exponent) {
    std::uint64_t result = 1;
    for (std::uint64_t e = 0; e < exponent; ++e) {
        if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / base) {
            throw std::overflow_error("checked_pow: " + std::to_string(base) + "^" +
                                      std::to_string(exponent) + " exceeds 64 bits");
        }
        result *= base;
    }
    return result;
}

std::string to_string(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::string to_string(const BigInt& n) { return n.str(); }

double to_double(const Rational& q) { return q.convert_to<double>(); }

} // namespace levin

namespace levin::ffmat {

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

Prime::Prime(std::uint32_t p) : p_(p) {
    if (!is_prime(p)) throw std::invalid_argument("Prime: " + std::to_string(p) + " is not prime");
    if (p > kMax) throw std::invalid_argument("Prime: " + std::to_string(p) + " exceeds supported range");

    auto tables = std::make_shared<Tables>();
    tables->fact.resize(p);
    tables->inv_fact.resize(p);
    tables->fact[0] = 1;
    for (std::uint32_t a = 1; a < p; ++a) {
        tables->fact[a] = static_cast<Residue>(static_cast<std::uint64_t>(tables->fact[a - 1]) * a % p);
    }
    // (p-1)! = -1 mod p (Wilson), so its inverse is p-1.
    tables->inv_fact[p - 1] = p - 1;
    for (std::uint32_t a = p - 1; a > 0; --a) {
        tables->inv_fact[a - 1] = static_cast<Residue>(static_cast<std::uint64_t>(tables->inv_fact[a]) * a % p);
    }
    tables_ = std::move(tables);
}

Residue Prime::inverse(Residue a) const {
    a %= p_;
    if (a == 0) throw std::domain_error("Prime::inverse: zero has no inverse");
    // a^{p-2}
    std::uint64_t result = 1;
    std::uint64_t base = a;
    std::uint32_t e = p_ - 2;
    while (e > 0) {
        if (e & 1u) result = result * base % p_;
        base = base * base % p_;
        e >>= 1u;
    }
    return static_cast<Residue>(result);
}

std::vector<Residue> base_digits(const BigInt& n, Prime p, std::optional<std::size_t> width) {
    if (n < 0) throw std::domain_error("base_digits: negative input");
    std::vector<Residue> digits;
    BigInt rest = n;
    const BigInt base = p.value();
    while (rest > 0) {
        BigInt q, r;
        boost::multiprecision::divide_qr(rest, base, q, r);
        digits.push_back(r.convert_to<Residue>());
        rest = std::move(q);
    }
    if (width) {
        if (digits.size() > *width) throw std::out_of_range("base_digits: value needs more than width digits");
        digits.resize(*width, 0);
    }
    return digits;
}

std::vector<Residue> base_digits(std::uint64_t n, Prime p, std::optional<std::size_t> width) {
    std::vector<Residue> digits;
    while (n > 0) {
        digits.push_back(static_cast<Residue>(n % p.value()));
        n /= p.value();
    }
    if (width) {
        if (digits.size() > *width) throw std::out_of_range("base_digits: value needs more than width digits");
        digits.resize(*width, 0);
    }
    return digits;
}

BigInt from_digits(std::span<const Residue> little_endian, Prime p) {
    BigInt n = 0;
    for (auto it = little_endian.rbegin(); it != little_endian.rend(); ++it) {
        n *= p.value();
        n += *it;
    }
    return n;
}

Residue binom_mod(std::uint64_t n, std::uint64_t r, Prime p) noexcept {
    if (r > n) return 0;
    Residue result = 1;
    const std::uint64_t base = p.value();
    while (r > 0) {
        const auto nd = static_cast<std::uint32_t>(n % base);
        const auto rd = static_cast<std::uint32_t>(r % base);
        if (rd > nd) return 0;
        result = p.mul(result, p.digit_binom(nd, rd));
        n /= base;
        r /= base;
    }
    return result;
}

Residue binom_mod(const BigInt& n, const BigInt& r, Prime p) {
    if (n < 0 || r < 0) throw std::domain_error("binom_mod: negative argument");
    if (r > n) return 0;
    if (n <= std::numeric_limits<std::uint64_t>::max()) {
        return binom_mod(n.convert_to<std::uint64_t>(), r.convert_to<std::uint64_t>(), p);
    }
    Residue result = 1;
    BigInt nn = n;
    BigInt rr = r;
    const BigInt base = p.value();
    while (rr > 0) {
        BigInt nq, nr, rq, rrem;
        boost::multiprecision::divide_qr(nn, base, nq, nr);
        boost::multiprecision::divide_qr(rr, base, rq, rrem);
        const auto nd = nr.convert_to<std::uint32_t>();
        const auto rd = rrem.convert_to<std::uint32_t>();
        if (rd > nd) return 0;
        result = p.mul(result, p.digit_binom(nd, rd));
        nn = std::move(nq);
        rr = std::move(rq);
    }
    return result;
}

ShiftProfile::ShiftProfile(std::vector<std::uint64_t> eta) : eta_(std::move(eta)) {
    if (eta_.empty()) throw std::invalid_argument("ShiftProfile: empty profile");
    if (eta_[0] != 0) throw std::invalid_argument("ShiftProfile: eta_0 must be 0");
    for (std::size_t j = 0; j + 1 < eta_.size(); ++j) {
        if (eta_[j + 1] < eta_[j] || eta_[j + 1] > eta_[j] + 1) {
            throw std::invalid_argument("ShiftProfile: step at j=" + std::to_string(j) + " is not 0 or 1");
        }
    }
}

ShiftProfile ShiftProfile::zero(std::size_t dim) { return ShiftProfile(std::vector<std::uint64_t>(dim, 0)); }

UnitProfile::UnitProfile(std::vector<Residue> u, Prime p) : u_(std::move(u)) {
    if (u_.empty()) throw std::invalid_argument("UnitProfile: empty profile");
    for (std::size_t j = 0; j < u_.size(); ++j) {
        if (u_[j] >= p.value() || u_[j] == 0) {
            throw std::invalid_argument("UnitProfile: u_" + std::to_string(j) + " is not a unit residue");
        }
    }
}

UnitProfile UnitProfile::ones(std::size_t dim, Prime p) { return UnitProfile(std::vector<Residue>(dim, 1), p); }

ResidueMatrix ResidueMatrix::identity(std::size_t n) {
    ResidueMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

namespace {

bool is_power_of(std::size_t n, std::uint32_t p) {
    if (n == 0) return false;
    while (n % p == 0) n /= p;
    return n == 1;
}

} // namespace

PascalView::PascalView(Prime p, ShiftProfile eta, UnitProfile u)
    : PascalView(p, std::make_shared<const ShiftProfile>(std::move(eta)),
                 std::make_shared<const UnitProfile>(std::move(u)), 0) {
    if (eta_->size() != u_->size()) throw std::invalid_argument("PascalView: profile lengths differ");
    if (!is_power_of(eta_->size(), p.value()) || eta_->size() < p.value()) {
        throw std::invalid_argument("PascalView: dimension must be p^m with m >= 1");
    }
}

PascalView::PascalView(Prime p, std::shared_ptr<const ShiftProfile> eta, std::shared_ptr<const UnitProfile> u,
                       std::size_t offset)
    : p_(p),
      eta_(std::move(eta)),
      u_(std::move(u)),
      offset_(offset),
      dim_(eta_->size() - offset),
      row_limit_(eta_->size()),
      cache_(std::make_shared<RowCache>()) {}

PascalView PascalView::unshifted(Prime p, unsigned m) {
    const std::size_t dim = checked_pow(p.value(), m);
    return PascalView(p, ShiftProfile::zero(dim), UnitProfile::ones(dim, p));
}

PascalView PascalView::tail(std::size_t t) const {
    if (t > dim_) throw std::out_of_range("PascalView::tail: offset beyond dimension");
    return PascalView(p_, eta_, u_, offset_ + t);
}

Residue PascalView::compute(std::size_t i, std::size_t j) const {
    const std::uint64_t shift = eta(j);
    const std::uint64_t top = static_cast<std::uint64_t>(i) + j;
    if (top < shift) throw std::domain_error("PascalView: negative upper binomial index");
    return p_.mul(binom_mod(top - shift, j, p_), unit(j));
}

Residue PascalView::entry(std::size_t i, std::size_t j) const {
    if (i >= row_limit_ || j >= dim_) {
        throw std::out_of_range("PascalView::entry: (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") outside " + std::to_string(row_limit_) + "x" + std::to_string(dim_));
    }
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->rows.find(i); it != cache_->rows.end()) return (*it->second)[j];
    }
    return compute(i, j);
}

std::vector<Residue> PascalView::row(std::size_t i) const {
    if (i >= row_limit_) throw std::out_of_range("PascalView::row: row " + std::to_string(i) + " out of range");
    {
        std::lock_guard lock(cache_->mutex);
        if (auto it = cache_->rows.find(i); it != cache_->rows.end()) return *it->second;
    }
    auto values = std::make_shared<std::vector<Residue>>(dim_);
    for (std::size_t j = 0; j < dim_; ++j) (*values)[j] = compute(i, j);
    std::lock_guard lock(cache_->mutex);
    auto [it, inserted] = cache_->rows.emplace(i, std::move(values));
    return *it->second;
}

ResidueMatrix PascalView::materialize() const {
    if (dim_ > kMaxDenseDim) throw BudgetExceeded("PascalView::materialize: dimension exceeds 2^12");
    ResidueMatrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        const auto r = row(i);
        std::copy(r.begin(), r.end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * dim_));
    }
    return m;
}

Residue pascal_entry(std::size_t i, std::size_t j, const ShiftProfile& eta, const UnitProfile& u, Prime p) {
    if (eta.size() != u.size()) throw std::invalid_argument("pascal_entry: profile lengths differ");
    if (i >= eta.size() || j >= eta.size()) throw std::out_of_range("pascal_entry: index out of range");
    return p.mul(binom_mod(static_cast<std::uint64_t>(i) + j - eta[j], j, p), u[j]);
}

ResidueMatrix window(const PascalView& view, std::size_t row0, std::size_t rows, std::size_t col0,
                     std::size_t cols) {
    if (row0 + rows > view.row_limit() || col0 + cols > view.dim()) {
        throw std::out_of_range("window: exceeds matrix dimension");
    }
    ResidueMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto r = view.row(row0 + i);
        for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = r[col0 + j];
    }
    return m;
}

namespace {

void check_window(const PascalView& view, std::size_t k, std::size_t t, const char* what) {
    if (t == 0) throw std::out_of_range(std::string(what) + ": t must be >= 1");
    if (k + t > view.dim()) {
        throw std::out_of_range(std::string(what) + ": window k+t=" + std::to_string(k + t) + " exceeds dim " +
                                std::to_string(view.dim()));
    }
}

void check_row(const PascalView& view, std::size_t row, std::size_t t, const char* what) {
    if (t == 0) throw std::out_of_range(std::string(what) + ": t must be >= 1");
    if (row >= view.dim() || t > view.dim()) {
        throw std::out_of_range(std::string(what) + ": row " + std::to_string(row) + " exceeds dim " +
                                std::to_string(view.dim()));
    }
}

} // namespace

ResidueMatrix submatrix_A(const PascalView& view, std::size_t k, std::size_t t) {
    check_window(view, k, t, "submatrix_A");
    return window(view, k, t, 0, t);
}

ResidueMatrix submatrix_B(const PascalView& view, std::size_t k, std::size_t t) {
    check_window(view, k, t, "submatrix_B");
    return window(view, k, t, t, view.dim() - t);
}

std::vector<Residue> row_c(const PascalView& view, std::size_t row, std::size_t t) {
    check_row(view, row, t, "row_c");
    auto r = view.row(row);
    r.resize(t);
    return r;
}

std::vector<Residue> row_d(const PascalView& view, std::size_t row, std::size_t t) {
    check_row(view, row, t, "row_d");
    const auto r = view.row(row);
    return {r.begin() + static_cast<std::ptrdiff_t>(t), r.end()};
}

namespace {

// Reduces to row echelon form in place; returns the rank and the sign-adjusted
// product of pivots.
std::pair<std::size_t, Residue> eliminate(ResidueMatrix& a, Prime p, std::vector<Residue>* rhs = nullptr) {
    std::size_t rank = 0;
    Residue det = 1;
    for (std::size_t col = 0; col < a.cols && rank < a.rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < a.rows && a.at(pivot, col) == 0) ++pivot;
        if (pivot == a.rows) {
            det = 0;
            continue;
        }
        if (pivot != rank) {
            for (std::size_t j = 0; j < a.cols; ++j) std::swap(a.at(pivot, j), a.at(rank, j));
            if (rhs) std::swap((*rhs)[pivot], (*rhs)[rank]);
            det = p.neg(det);
        }
        const Residue pv = a.at(rank, col);
        det = p.mul(det, pv);
        const Residue inv = p.inverse(pv);
        for (std::size_t j = col; j < a.cols; ++j) a.at(rank, j) = p.mul(a.at(rank, j), inv);
        if (rhs) (*rhs)[rank] = p.mul((*rhs)[rank], inv);
        for (std::size_t i = 0; i < a.rows; ++i) {
            if (i == rank) continue;
            const Residue f = a.at(i, col);
            if (f == 0) continue;
            for (std::size_t j = col; j < a.cols; ++j) a.at(i, j) = p.sub(a.at(i, j), p.mul(f, a.at(rank, j)));
            if (rhs) (*rhs)[i] = p.sub((*rhs)[i], p.mul(f, (*rhs)[rank]));
        }
        ++rank;
    }
    if (rank < a.rows || rank < a.cols) det = 0;
    return {rank, det};
}

} // namespace

std::size_t rank(ResidueMatrix mat, Prime p) { return eliminate(mat, p).first; }

Residue determinant(ResidueMatrix mat, Prime p) {
    if (mat.rows != mat.cols) throw std::invalid_argument("determinant: matrix is not square");
    if (mat.rows == 0) return 1;
    return eliminate(mat, p).second;
}

bool is_regular(const ResidueMatrix& mat, Prime p) {
    if (mat.rows != mat.cols) throw std::invalid_argument("is_regular: matrix is not square");
    return rank(mat, p) == mat.rows;
}

std::optional<std::vector<Residue>> solve(ResidueMatrix mat, std::vector<Residue> rhs, Prime p) {
    if (mat.rows != mat.cols) throw std::invalid_argument("solve: matrix is not square");
    if (rhs.size() != mat.rows) throw std::invalid_argument("solve: right-hand side has wrong length");
    for (auto& v : rhs) v %= p.value();
    const auto [r, det] = eliminate(mat, p, &rhs);
    if (r < mat.rows) return std::nullopt;
    return rhs;
}

std::vector<Residue> multiply(const ResidueMatrix& mat, std::span<const Residue> x, Prime p) {
    if (x.size() != mat.cols) throw std::invalid_argument("multiply: dimension mismatch");
    std::vector<Residue> out(mat.rows, 0);
    for (std::size_t i = 0; i < mat.rows; ++i) out[i] = dot(mat.row(i), x, p);
    return out;
}

std::vector<Residue> left_multiply(std::span<const Residue> x, const ResidueMatrix& mat, Prime p) {
    if (x.size() != mat.rows) throw std::invalid_argument("left_multiply: dimension mismatch");
    std::vector<std::uint64_t> acc(mat.cols, 0);
    for (std::size_t i = 0; i < mat.rows; ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < mat.cols; ++j) acc[j] = (acc[j] + static_cast<std::uint64_t>(x[i]) * mat.at(i, j)) % p.value();
    }
    return {acc.begin(), acc.end()};
}

Residue dot(std::span<const Residue> a, std::span<const Residue> b, Prime p) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc = (acc + static_cast<std::uint64_t>(a[i]) * b[i]) % p.value();
    return static_cast<Residue>(acc);
}

std::vector<Residue> xi(std::size_t t, Prime p) {
    if (t == 0) throw std::invalid_argument("xi: t must be >= 1");
    std::vector<Residue> out(t);
    for (std::size_t i = 0; i < t; ++i) {
        const Residue c = binom_mod(static_cast<std::uint64_t>(t), i, p);
        // sign (-1)^{t+1+i}
        out[i] = ((t + 1 + i) % 2 == 0) ? c : p.neg(c);
    }
    return out;
}

Residue hockey_stick_sum(std::uint64_t i, std::uint64_t u, Prime p) {
    Residue acc = 0;
    for (std::uint64_t j = 1; j <= u; ++j) acc = p.add(acc, binom_mod(i + j, j, p));
    return acc;
}

Residue hockey_stick(std::uint64_t i, std::uint64_t u, Prime p) {
    return p.sub(binom_mod(i + 1 + u, u, p), 1);
}

std::vector<Residue> predict_c_row(const PascalView& view, std::size_t k, std::size_t t) {
    if (t == 0 || k + t >= view.dim()) throw std::out_of_range("predict_c_row: need 1 <= t and k + t <= dim - 1");
    return left_multiply(xi(t, view.prime()), submatrix_A(view, k, t), view.prime());
}

std::vector<Residue> predict_d_row(const PascalView& view, std::size_t k, std::size_t t) {
    if (t == 0 || k + t >= view.dim()) throw std::out_of_range("predict_d_row: need 1 <= t and k + t <= dim - 1");
    const Prime p = view.prime();
    auto out = left_multiply(xi(t, p), submatrix_B(view, k, t), p);
    const PascalView rest = view.tail(t);
    const auto shifted = rest.row(k + t);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = p.add(out[j], shifted[j]);
    return out;
}

DmWindow dm_window(unsigned m, Prime p) {
    if (m <= 7) throw std::domain_error("dm_window: requires m > 7 (pass an explicit window for smaller m)");
    const std::uint64_t pp = p.value();
    const std::uint64_t top = checked_pow(pp, m - 3);
    const std::uint64_t height = pp * (pp * pp * pp - 1) * checked_pow(pp, m - 7);
    return DmWindow{top - height, top, checked_pow(pp, m - 7)};
}

Residue dm_entry(std::uint64_t i, std::uint64_t j, Prime p) noexcept {
    return p.sub(binom_mod(i + 1 + j, j, p), 1);
}

ResidueMatrix dm_matrix(unsigned m, Prime p, std::optional<DmWindow> override_window) {
    const DmWindow w = override_window ? *override_window : dm_window(m, p);
    if (w.row_end < w.row_begin) throw std::invalid_argument("dm_matrix: empty or inverted row window");
    if (w.rows() * w.cols > (std::uint64_t{1} << 26)) throw BudgetExceeded("dm_matrix: window too large to materialize");
    ResidueMatrix out(w.rows(), w.cols);
    for (std::uint64_t i = 0; i < w.rows(); ++i) {
        for (std::uint64_t j = 0; j < w.cols; ++j) out.at(i, j) = dm_entry(w.row_begin + i, j, p);
    }
    return out;
}

std::vector<std::uint64_t> dm_column_counts(const DmWindow& window, Prime p, Residue value) {
    std::vector<std::uint64_t> counts(window.cols, 0);
    for (std::uint64_t i = window.row_begin; i < window.row_end; ++i) {
        for (std::uint64_t j = 0; j < window.cols; ++j) {
            if (dm_entry(i, j, p) == value) ++counts[j];
        }
    }
    return counts;
}

Rational dm_predicted_fraction(unsigned m, Prime p) {
    if (m <= 7) throw std::domain_error("dm_predicted_fraction: requires m > 7");
    const Rational ratio(BigInt(p.value() + 1), BigInt(2 * p.value()));
    Rational power = 1;
    for (unsigned e = 0; e < m - 7; ++e) power *= ratio;
    return 1 - power;
}

std::uint64_t pascal_nonzero_count(unsigned r, Prime p) {
    const std::uint64_t n = checked_pow(p.value(), r);
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t j = 0; j < n; ++j) {
            if (binom_mod(j, i, p) != 0) ++count;
        }
    }
    return count;
}

} // namespace levin::ffmat
