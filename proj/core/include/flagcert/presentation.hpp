#pragma once

// Words over a finite generating set and their images under a
// representation into PGL(d, R).

#include <string>
#include <string_view>
#include <vector>

#include "flagcert/linalg.hpp"

namespace flagcert {

/// Letters are signed generator indices: +(i+1) for generator i and
/// -(i+1) for its inverse.
struct Word {
  std::vector<int> letters;

  bool empty() const noexcept { return letters.empty(); }
  std::size_t size() const noexcept { return letters.size(); }
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;
};

/// Cancels adjacent inverse pairs.
Word reduce(Word w);
Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
Word letter_power(int generator, long long exponent);

struct Generator {
  std::string name;
  Matrix matrix;
  Matrix inverse;
};

struct Peripheral {
  std::string name;
  std::vector<std::size_t> generators;
  /// Number of elements kept from each cofinite family.
  std::size_t truncation = 16;
  bool abelian = true;
};

class GroupPresentation {
 public:
  explicit GroupPresentation(std::size_t dim = 2) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Generator>& generators() const noexcept { return generators_; }
  const std::vector<Peripheral>& peripherals() const noexcept { return peripherals_; }

  /// When set, words that are equal after free reduction are equal group
  /// elements and distinct reduced words are distinct.
  bool free_model() const noexcept { return free_model_; }
  void set_free_model(bool on) { free_model_ = on; }

  std::size_t add_generator(std::string name, const Matrix& m);
  void add_peripheral(Peripheral p);
  /// Replaces a generator matrix, keeping its name and index.
  void set_generator(std::size_t index, const Matrix& m);

  std::size_t generator_index(std::string_view name) const;
  std::size_t peripheral_index(std::string_view name) const;

  const Matrix& letter(int l) const;
  /// rho(w) as the left-to-right product of letter matrices, rescaled when
  /// entries drift far from 1.
  Matrix evaluate(const Word& w) const;

  /// Space-separated tokens "name", "name^n" or "name^-n"; the empty
  /// string or "id" is the identity.
  Word parse(std::string_view text) const;
  std::string format(const Word& w) const;

  /// Inverse consistency and commutation of abelian peripherals.
  void validate(double tol = 1e-9) const;

  /// Elements of the peripheral subgroup in shell order (largest absolute
  /// exponent, or word length for non-abelian peripherals), then
  /// lexicographic; the identity is omitted.
  std::vector<Word> peripheral_elements(std::size_t peripheral, std::size_t count) const;

  /// Canonical key for element equality: the reduced word in the free
  /// model, otherwise the normalized matrix entries rounded to 1e-9
  /// relative precision.
  std::string element_key(const Word& w) const;
  /// The matrix part of element_key, ignoring the free model.
  std::string matrix_key(const Matrix& m) const;

 private:
  std::size_t dim_;
  bool free_model_ = false;
  std::vector<Generator> generators_;
  std::vector<Peripheral> peripherals_;
};

}  // namespace flagcert
