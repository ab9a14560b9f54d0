#include "qet/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qet {

namespace {

Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_site(std::size_t site) {
  if (site >= 64) throw std::out_of_range("Pauli site index exceeds 63");
}

bool pattern_less(const PauliString& a, const PauliString& b) {
  if (a.x_mask != b.x_mask) return a.x_mask < b.x_mask;
  return a.z_mask < b.z_mask;
}

}  // namespace

PauliString PauliString::identity(Complex coefficient) { return {coefficient, 0, 0}; }

PauliString PauliString::single(std::size_t site, PauliLetter letter, Complex coefficient) {
  check_site(site);
  const std::uint64_t bit = std::uint64_t{1} << site;
  switch (letter) {
    case PauliLetter::I: return {coefficient, 0, 0};
    case PauliLetter::X: return {coefficient, bit, 0};
    case PauliLetter::Y: return {coefficient, bit, bit};
    case PauliLetter::Z: return {coefficient, 0, bit};
  }
  return {};
}

PauliString PauliString::from_letters(std::string_view letters, Complex coefficient) {
  PauliString out = identity(coefficient);
  for (std::size_t site = 0; site < letters.size(); ++site) {
    check_site(site);
    const std::uint64_t bit = std::uint64_t{1} << site;
    switch (letters[site]) {
      case 'I': break;
      case 'X': out.x_mask |= bit; break;
      case 'Y': out.x_mask |= bit; out.z_mask |= bit; break;
      case 'Z': out.z_mask |= bit; break;
      default: throw std::invalid_argument("unknown Pauli letter '" + std::string(1, letters[site]) + "'");
    }
  }
  return out;
}

PauliLetter PauliString::letter(std::size_t site) const {
  check_site(site);
  const bool x = (x_mask >> site) & 1U;
  const bool z = (z_mask >> site) & 1U;
  if (x && z) return PauliLetter::Y;
  if (x) return PauliLetter::X;
  if (z) return PauliLetter::Z;
  return PauliLetter::I;
}

int PauliString::y_count() const { return std::popcount(x_mask & z_mask); }

std::string PauliString::letters(std::size_t n_sites) const {
  static constexpr char kNames[] = {'I', 'X', 'Y', 'Z'};
  std::string out(n_sites, 'I');
  for (std::size_t n = 0; n < n_sites; ++n) out[n] = kNames[static_cast<int>(letter(n))];
  return out;
}

PauliString operator*(const PauliString& lhs, const PauliString& rhs) {
  // Each string is c * i^{#Y} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{|z1 & x2|}.
  PauliString out;
  out.x_mask = lhs.x_mask ^ rhs.x_mask;
  out.z_mask = lhs.z_mask ^ rhs.z_mask;
  const int swaps = std::popcount(lhs.z_mask & rhs.x_mask);
  const int phase = lhs.y_count() + rhs.y_count() - out.y_count() + 2 * swaps;
  out.coefficient = lhs.coefficient * rhs.coefficient * i_power(phase);
  return out;
}

bool commutes(const PauliString& lhs, const PauliString& rhs) {
  return std::popcount((lhs.x_mask & rhs.z_mask) ^ (lhs.z_mask & rhs.x_mask)) % 2 == 0;
}

PauliSum::PauliSum(std::size_t n_sites) : n_sites_(n_sites) {
  if (n_sites > 64) throw std::invalid_argument("PauliSum supports at most 64 sites");
}

PauliSum::PauliSum(std::size_t n_sites, std::vector<PauliString> terms) : PauliSum(n_sites) {
  for (const auto& t : terms) add(t);
}

PauliSum& PauliSum::add(const PauliString& term) {
  if (n_sites_ < 64 && (term.support() >> n_sites_) != 0) {
    throw std::out_of_range("Pauli string acts outside the operator's sites");
  }
  terms_.push_back(term);
  return *this;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_sites_ != n_sites_) throw std::invalid_argument("PauliSum site count mismatch");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  if (other.n_sites_ != n_sites_) throw std::invalid_argument("PauliSum site count mismatch");
  for (auto t : other.terms_) {
    t.coefficient = -t.coefficient;
    terms_.push_back(t);
  }
  return *this;
}

PauliSum& PauliSum::operator*=(Complex factor) {
  for (auto& t : terms_) t.coefficient *= factor;
  return *this;
}

PauliSum& PauliSum::canonicalize(double drop_tol) {
  std::stable_sort(terms_.begin(), terms_.end(), pattern_less);
  std::vector<PauliString> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().same_pattern(t)) {
      merged.back().coefficient += t.coefficient;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [drop_tol](const PauliString& t) { return std::abs(t.coefficient) <= drop_tol; });
  terms_ = std::move(merged);
  return *this;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out(n_sites_);
  for (auto t : terms_) {
    t.coefficient = std::conj(t.coefficient);
    out.terms_.push_back(t);
  }
  return out;
}

bool PauliSum::is_hermitian(double tol) const {
  PauliSum canon = *this;
  canon.canonicalize();
  return std::all_of(canon.terms_.begin(), canon.terms_.end(),
                     [tol](const PauliString& t) { return std::abs(t.coefficient.imag()) <= tol; });
}

std::uint64_t PauliSum::support() const {
  std::uint64_t mask = 0;
  for (const auto& t : terms_) mask |= t.support();
  return mask;
}

double PauliSum::coefficient_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return s;
}

PauliSum operator+(PauliSum lhs, const PauliSum& rhs) { return lhs += rhs; }
PauliSum operator-(PauliSum lhs, const PauliSum& rhs) { return lhs -= rhs; }
PauliSum operator*(Complex factor, PauliSum op) { return op *= factor; }

PauliSum operator*(const PauliSum& lhs, const PauliSum& rhs) {
  if (lhs.n_sites() != rhs.n_sites()) throw std::invalid_argument("PauliSum site count mismatch");
  PauliSum out(lhs.n_sites());
  for (const auto& a : lhs.terms()) {
    for (const auto& b : rhs.terms()) out.add(a * b);
  }
  out.canonicalize();
  return out;
}

bool approx_equal(const PauliSum& lhs, const PauliSum& rhs, double tol) {
  if (lhs.n_sites() != rhs.n_sites()) return false;
  PauliSum diff = lhs - rhs;
  diff.canonicalize(tol);
  return diff.empty();
}

HermitianOperator::HermitianOperator(PauliSum sum, double drop_tol, double hermiticity_tol)
    : sum_(std::move(sum)) {
  sum_.canonicalize(drop_tol);
  PauliSum real_part(sum_.n_sites());
  for (auto t : sum_.terms()) {
    if (std::abs(t.coefficient.imag()) > hermiticity_tol) {
      throw std::invalid_argument("operator is not Hermitian: term " + t.letters(sum_.n_sites()) +
                                  " has an imaginary coefficient");
    }
    t.coefficient = {t.coefficient.real(), 0.0};
    real_part.add(t);
  }
  real_part.canonicalize(drop_tol);
  sum_ = std::move(real_part);
}

HermitianOperator HermitianOperator::identity(std::size_t n_sites, double scale) {
  return HermitianOperator(PauliSum(n_sites, {PauliString::identity(scale)}));
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& other) {
  sum_ += other.sum_;
  sum_.canonicalize();
  return *this;
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(Complex{factor, 0.0} * sum_);
}

HermitianOperator operator+(HermitianOperator lhs, const HermitianOperator& rhs) { return lhs += rhs; }

std::vector<std::size_t> support_sites(std::uint64_t mask) {
  std::vector<std::size_t> sites;
  while (mask != 0) {
    sites.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return sites;
}

}  // namespace qet
