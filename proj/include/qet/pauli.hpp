#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qet {

using Complex = std::complex<double>;

// Practical ceiling for state vectors; masks themselves are 64-bit.
inline constexpr std::size_t kMaxSites = 30;

enum class PauliLetter : std::uint8_t { I, X, Y, Z };

// coefficient * P_0 (x) P_1 (x) ... with P_n read from bit n of the masks:
// (x=0,z=0) I, (1,0) X, (1,1) Y, (0,1) Z.
struct PauliString {
  Complex coefficient{1.0, 0.0};
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;

  static PauliString identity(Complex coefficient = 1.0);
  static PauliString single(std::size_t site, PauliLetter letter, Complex coefficient = 1.0);
  // letters[i] in {I,X,Y,Z} acts on site i.
  static PauliString from_letters(std::string_view letters, Complex coefficient = 1.0);

  PauliLetter letter(std::size_t site) const;
  std::uint64_t support() const { return x_mask | z_mask; }
  int y_count() const;
  bool is_identity() const { return support() == 0; }
  bool same_pattern(const PauliString& other) const {
    return x_mask == other.x_mask && z_mask == other.z_mask;
  }
  std::string letters(std::size_t n_sites) const;
};

PauliString operator*(const PauliString& lhs, const PauliString& rhs);
bool commutes(const PauliString& lhs, const PauliString& rhs);

// General (not necessarily Hermitian) linear combination of Pauli strings.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(std::size_t n_sites);
  PauliSum(std::size_t n_sites, std::vector<PauliString> terms);

  std::size_t n_sites() const { return n_sites_; }
  const std::vector<PauliString>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  PauliSum& add(const PauliString& term);
  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(Complex factor);

  // Merge identical letter patterns, drop |c| <= drop_tol, sort by pattern.
  PauliSum& canonicalize(double drop_tol = 0.0);

  PauliSum adjoint() const;
  bool is_hermitian(double tol) const;
  std::uint64_t support() const;
  // Sum of |c|; an upper bound on the operator norm.
  double coefficient_norm() const;

 private:
  std::size_t n_sites_ = 0;
  std::vector<PauliString> terms_;
};

PauliSum operator+(PauliSum lhs, const PauliSum& rhs);
PauliSum operator-(PauliSum lhs, const PauliSum& rhs);
PauliSum operator*(Complex factor, PauliSum op);
PauliSum operator*(const PauliSum& lhs, const PauliSum& rhs);
// Canonical forms compared term by term within tol.
bool approx_equal(const PauliSum& lhs, const PauliSum& rhs, double tol);

class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Canonicalizes; throws std::invalid_argument when an imaginary coefficient
  // exceeds hermiticity_tol. Surviving coefficients are stored as real.
  explicit HermitianOperator(PauliSum sum, double drop_tol = 0.0, double hermiticity_tol = 1e-12);

  static HermitianOperator identity(std::size_t n_sites, double scale = 1.0);

  std::size_t n_sites() const { return sum_.n_sites(); }
  const PauliSum& sum() const { return sum_; }
  const std::vector<PauliString>& terms() const { return sum_.terms(); }
  std::uint64_t support() const { return sum_.support(); }

  HermitianOperator& operator+=(const HermitianOperator& other);
  HermitianOperator scaled(double factor) const;

 private:
  PauliSum sum_;
};

HermitianOperator operator+(HermitianOperator lhs, const HermitianOperator& rhs);

// Site indices covered by a support mask, ascending.
std::vector<std::size_t> support_sites(std::uint64_t mask);

}  // namespace qet
