#include "levin/construct.hpp"

#include <algorithm>

namespace levin::construct {

AffineParams::AffineParams(Prime p_, unsigned m_, std::vector<Residue> z_, ffmat::ShiftProfile eta_,
                           ffmat::UnitProfile u_)
    : p(p_), m(m_), z(std::move(z_)), eta(std::move(eta_)), u(std::move(u_)) {
    if (m == 0) throw std::invalid_argument("AffineParams: level m must be >= 1");
    const std::size_t dim = checked_pow(p.value(), m);
    if (z.size() != dim || eta.size() != dim || u.size() != dim) {
        throw std::invalid_argument("AffineParams: z, eta and u must all have length p^m = " + std::to_string(dim));
    }
    for (Residue v : z) {
        if (v >= p.value()) throw std::invalid_argument("AffineParams: z entry not reduced mod p");
    }
}

AffineParams levin_params(unsigned m, Prime p) {
    const std::size_t dim = checked_pow(p.value(), m);
    return AffineParams(p, m, std::vector<Residue>(dim, 0), ffmat::ShiftProfile::zero(dim),
                        ffmat::UnitProfile::ones(dim, p));
}

AffineParams random_params(unsigned m, Prime p, std::mt19937_64& rng) {
    const std::size_t dim = checked_pow(p.value(), m);
    std::uniform_int_distribution<Residue> any(0, p.value() - 1);
    std::uniform_int_distribution<Residue> unit(1, p.value() - 1);
    std::bernoulli_distribution step(0.5);

    std::vector<Residue> z(dim);
    std::vector<std::uint64_t> eta(dim, 0);
    std::vector<Residue> u(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        z[j] = any(rng);
        u[j] = unit(rng);
        if (j > 0) eta[j] = eta[j - 1] + (step(rng) ? 1 : 0);
    }
    return AffineParams(p, m, std::move(z), ffmat::ShiftProfile(std::move(eta)), ffmat::UnitProfile(std::move(u), p));
}

BigInt n_offset(unsigned m, Prime p) {
    if (m == 0) throw std::invalid_argument("n_offset: m must be >= 1");
    BigInt total = 0;
    for (unsigned j = 1; j < m; ++j) total += block_length(j, p);
    return total;
}

BigInt block_length(unsigned m, Prime p) {
    const std::uint64_t dim = checked_pow(p.value(), m);
    return BigInt(dim) * big_pow(p.value(), dim);
}

AffineBlock::AffineBlock(AffineParams params)
    : params_(std::move(params)), view_(params_.view()), columns_(big_pow(params_.p.value(), params_.dim())) {
    if (dim() <= ffmat::PascalView::kMaxDenseDim) {
        dense_ = view_.materialize();
        has_dense_ = true;
    }
}

Residue AffineBlock::digit(std::size_t k, std::span<const Residue> n_digits) const {
    if (k >= dim()) throw std::out_of_range("AffineBlock::digit: row index out of range");
    if (n_digits.size() != dim()) throw std::invalid_argument("AffineBlock::digit: digit vector must have length p^m");
    const Prime p = params_.p;
    Residue acc = has_dense_ ? ffmat::dot(dense_.row(k), n_digits, p) : ffmat::dot(view_.row(k), n_digits, p);
    return p.add(acc, params_.z[k]);
}

Residue AffineBlock::digit(std::size_t k, const BigInt& n) const {
    if (n < 0 || n >= columns_) throw std::out_of_range("AffineBlock::digit: column index out of range");
    return digit(k, ffmat::base_digits(n, params_.p, dim()));
}

Residue digit_d(std::size_t k, const BigInt& n, const AffineParams& params) {
    const std::size_t dim = params.dim();
    if (k >= dim) throw std::out_of_range("digit_d: k must be < p^m");
    if (n < 0 || n >= big_pow(params.p.value(), dim)) throw std::out_of_range("digit_d: n must be < p^{p^m}");
    const auto e = ffmat::base_digits(n, params.p, dim);
    Residue acc = params.z[k];
    for (std::size_t j = 0; j < dim; ++j) {
        if (e[j] == 0) continue;
        acc = params.p.add(acc, params.p.mul(ffmat::pascal_entry(k, j, params.eta, params.u, params.p), e[j]));
    }
    return acc;
}

necklace::Word block(const AffineParams& params, std::uint64_t max_digits) {
    const BigInt length = block_length(params.m, params.p);
    if (length > max_digits) {
        throw BudgetExceeded("block: A_" + std::to_string(params.m) + " has " + length.str() +
                             " digits, budget is " + std::to_string(max_digits));
    }
    const AffineBlock evaluator(params);
    const std::size_t dim = params.dim();
    const Residue p = params.p.value();
    std::vector<necklace::Digit> out;
    out.reserve(length.convert_to<std::size_t>());
    std::vector<Residue> e(dim, 0);
    for (;;) {
        for (std::size_t k = 0; k < dim; ++k) out.push_back(static_cast<necklace::Digit>(evaluator.digit(k, e)));
        std::size_t i = 0;
        while (i < dim && ++e[i] == p) e[i++] = 0;
        if (i == dim) break;
    }
    return necklace::Word(p, std::move(out));
}

std::vector<Residue> z_prime(const AffineParams& params) {
    auto solution = ffmat::solve(params.view().materialize(), params.z, params.p);
    if (!solution) throw std::logic_error("z_prime: P is singular, which contradicts the regularity lemma");
    return *solution;
}

Residue digit_d_shifted(std::size_t k, const BigInt& n, const AffineParams& params, std::span<const Residue> zp) {
    const std::size_t dim = params.dim();
    if (k >= dim) throw std::out_of_range("digit_d_shifted: k must be < p^m");
    if (zp.size() != dim) throw std::invalid_argument("digit_d_shifted: z' must have length p^m");
    const auto e = ffmat::base_digits(n, params.p, dim);
    Residue acc = 0;
    for (std::size_t j = 0; j < dim; ++j) {
        const Residue shifted = params.p.add(e[j], zp[j]);
        acc = params.p.add(acc, params.p.mul(ffmat::pascal_entry(k, j, params.eta, params.u, params.p), shifted));
    }
    return acc;
}

ParamsSource random_source(Prime p, std::uint64_t seed) {
    return [p, seed](unsigned m) {
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (m + 1)));
        return random_params(m, p, rng);
    };
}

DigitStream::DigitStream(Prime p, unsigned max_level, ParamsSource source)
    : p_(p), max_level_(max_level), source_(std::move(source)) {
    if (max_level_ == 0) throw std::invalid_argument("DigitStream: max_level must be >= 1");
    if (!source_) source_ = [p](unsigned m) { return levin_params(m, p); };
    offsets_.push_back(0);  // unused slot for m = 0
    offsets_.push_back(0);  // n_1
}

BigInt DigitStream::offset(unsigned m) const {
    if (m == 0) throw std::invalid_argument("DigitStream::offset: m must be >= 1");
    std::lock_guard lock(mutex_);
    while (offsets_.size() <= m) {
        const auto j = static_cast<unsigned>(offsets_.size() - 1);
        offsets_.push_back(offsets_.back() + block_length(j, p_));
    }
    return offsets_[m];
}

unsigned DigitStream::level_of(const BigInt& i) const {
    if (i < 0) throw std::out_of_range("DigitStream: negative position");
    for (unsigned m = 1; m <= max_level_; ++m) {
        if (i < offset(m + 1)) return m;
    }
    throw BudgetExceeded("DigitStream: position " + i.str() + " lies beyond level " + std::to_string(max_level_));
}

const AffineBlock& DigitStream::level(unsigned m) const {
    if (m == 0 || m > max_level_) {
        throw BudgetExceeded("DigitStream: level " + std::to_string(m) + " outside 1.." + std::to_string(max_level_));
    }
    std::lock_guard lock(mutex_);
    auto it = levels_.find(m);
    if (it == levels_.end()) {
        AffineParams params = source_(m);
        if (params.m != m || !(params.p == p_)) throw std::logic_error("DigitStream: parameter source returned wrong level");
        it = levels_.emplace(m, std::make_shared<const AffineBlock>(std::move(params))).first;
    }
    return *it->second;
}

Residue DigitStream::digit(const BigInt& i) const {
    const unsigned m = level_of(i);
    const AffineBlock& blk = level(m);
    BigInt n, k;
    boost::multiprecision::divide_qr(BigInt(i - offset(m)), BigInt(blk.dim()), n, k);
    return blk.digit(k.convert_to<std::size_t>(), n);
}

necklace::Word DigitStream::slice(const BigInt& i, std::size_t len) const {
    std::vector<necklace::Digit> out;
    if (len == 0) return necklace::Word(p_.value(), std::move(out));
    out.reserve(len);

    unsigned m = level_of(i);
    const AffineBlock* blk = &level(m);
    BigInt n, kq;
    boost::multiprecision::divide_qr(BigInt(i - offset(m)), BigInt(blk->dim()), n, kq);
    std::size_t k = kq.convert_to<std::size_t>();
    std::vector<Residue> e = ffmat::base_digits(n, p_, blk->dim());

    for (;;) {
        const std::size_t dim = blk->dim();
        for (; k < dim && out.size() < len; ++k) out.push_back(static_cast<necklace::Digit>(blk->digit(k, e)));
        if (out.size() == len) break;
        k = 0;
        std::size_t pos = 0;
        while (pos < dim && ++e[pos] == p_.value()) e[pos++] = 0;
        if (pos == dim) {
            // column counter wrapped: A_m is exhausted, continue with A_{m+1}
            ++m;
            blk = &level(m);
            e.assign(blk->dim(), 0);
        }
    }
    return necklace::Word(p_.value(), std::move(out));
}

} // namespace levin::construct
