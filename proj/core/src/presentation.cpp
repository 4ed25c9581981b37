#include "flagcert/presentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "flagcert/errors.hpp"

namespace flagcert {

Word reduce(Word w) {
  std::vector<int> out;
  out.reserve(w.letters.size());
  for (int l : w.letters) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return Word{std::move(out)};
}

Word inverse(const Word& w) {
  Word r;
  r.letters.reserve(w.letters.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) r.letters.push_back(-*it);
  return r;
}

Word concat(const Word& a, const Word& b) {
  Word r = a;
  r.letters.insert(r.letters.end(), b.letters.begin(), b.letters.end());
  return reduce(std::move(r));
}

Word letter_power(int generator, long long exponent) {
  Word w;
  const int l = exponent >= 0 ? generator + 1 : -(generator + 1);
  w.letters.assign(static_cast<std::size_t>(std::llabs(exponent)), l);
  return w;
}

std::size_t GroupPresentation::add_generator(std::string name, const Matrix& m) {
  if (m.dim() != dim_) fail(ErrorCode::DimensionMismatch, "generator " + name + " has the wrong dimension");
  for (const Generator& g : generators_)
    if (g.name == name) fail(ErrorCode::ConfigError, "duplicate generator name " + name);
  generators_.push_back({std::move(name), m, inverse(m)});
  return generators_.size() - 1;
}

void GroupPresentation::set_generator(std::size_t index, const Matrix& m) {
  if (m.dim() != dim_) fail(ErrorCode::DimensionMismatch, "generator has the wrong dimension");
  generators_.at(index).matrix = m;
  generators_.at(index).inverse = inverse(m);
}

void GroupPresentation::add_peripheral(Peripheral p) {
  if (p.generators.empty()) fail(ErrorCode::ConfigError, "peripheral " + p.name + " has no generators");
  for (std::size_t g : p.generators)
    if (g >= generators_.size()) fail(ErrorCode::ConfigError, "peripheral " + p.name + " references an unknown generator");
  peripherals_.push_back(std::move(p));
}

std::size_t GroupPresentation::generator_index(std::string_view name) const {
  for (std::size_t i = 0; i < generators_.size(); ++i)
    if (generators_[i].name == name) return i;
  fail(ErrorCode::ConfigError, "unknown generator " + std::string(name));
}

std::size_t GroupPresentation::peripheral_index(std::string_view name) const {
  for (std::size_t i = 0; i < peripherals_.size(); ++i)
    if (peripherals_[i].name == name) return i;
  fail(ErrorCode::ConfigError, "unknown peripheral " + std::string(name));
}

const Matrix& GroupPresentation::letter(int l) const {
  const std::size_t i = static_cast<std::size_t>(std::abs(l)) - 1;
  if (l == 0 || i >= generators_.size()) fail(ErrorCode::EvaluationError, "word letter out of range");
  return l > 0 ? generators_[i].matrix : generators_[i].inverse;
}

Matrix GroupPresentation::evaluate(const Word& w) const {
  Matrix m = Matrix::identity(dim_);
  for (int l : w.letters) {
    m = m * letter(l);
    const double s = m.max_abs();
    if (!std::isfinite(s) || s == 0.0) fail(ErrorCode::EvaluationError, "word evaluation overflowed");
    if (s > 1e100 || s < 1e-100) m *= 1.0 / s;
  }
  return m;
}

Word GroupPresentation::parse(std::string_view text) const {
  std::istringstream in{std::string(text)};
  std::string tok;
  Word w;
  while (in >> tok) {
    if (tok == "id") continue;
    const auto caret = tok.find('^');
    const std::string name = tok.substr(0, caret);
    long long e = 1;
    if (caret != std::string::npos) {
      const std::string ex = tok.substr(caret + 1);
      char* end = nullptr;
      e = std::strtoll(ex.c_str(), &end, 10);
      if (ex.empty() || *end != '\0') fail(ErrorCode::ConfigError, "bad exponent in word token " + tok);
    }
    const Word p = letter_power(static_cast<int>(generator_index(name)), e);
    w.letters.insert(w.letters.end(), p.letters.begin(), p.letters.end());
  }
  return reduce(std::move(w));
}

std::string GroupPresentation::format(const Word& w) const {
  if (w.empty()) return "id";
  std::string out;
  std::size_t i = 0;
  while (i < w.letters.size()) {
    std::size_t j = i;
    while (j < w.letters.size() && w.letters[j] == w.letters[i]) ++j;
    const long long run = static_cast<long long>(j - i);
    const int l = w.letters[i];
    if (!out.empty()) out += ' ';
    out += generators_.at(static_cast<std::size_t>(std::abs(l)) - 1).name;
    const long long e = l > 0 ? run : -run;
    if (e != 1) out += '^' + std::to_string(e);
    i = j;
  }
  return out;
}

void GroupPresentation::validate(double tol) const {
  for (const Generator& g : generators_) {
    const Matrix p = g.matrix * g.inverse;
    if (!projectively_equal(p, Matrix::identity(dim_), tol))
      fail(ErrorCode::ConfigError, "generator " + g.name + " is not invertible to tolerance");
  }
  for (const Peripheral& p : peripherals_) {
    if (!p.abelian) continue;
    for (std::size_t a : p.generators)
      for (std::size_t b : p.generators) {
        const Matrix& A = generators_[a].matrix;
        const Matrix& B = generators_[b].matrix;
        if (!projectively_equal(A * B, B * A, tol))
          fail(ErrorCode::ConfigError, "peripheral " + p.name + " is declared abelian but its generators do not commute");
      }
  }
}

std::vector<Word> GroupPresentation::peripheral_elements(std::size_t peripheral, std::size_t count) const {
  const Peripheral& p = peripherals_.at(peripheral);
  const std::size_t r = p.generators.size();
  std::vector<Word> out;
  for (long long shell = 1; out.size() < count && shell < 1000000; ++shell) {
    std::vector<Word> layer;
    if (p.abelian) {
      // Exponent vectors with max |e_i| == shell, in lexicographic order.
      std::vector<long long> e(r, -shell);
      while (true) {
        const bool on_shell = std::any_of(e.begin(), e.end(), [&](long long x) { return std::llabs(x) == shell; });
        if (on_shell) {
          Word w;
          for (std::size_t i = 0; i < r; ++i) {
            const Word part = letter_power(static_cast<int>(p.generators[i]), e[i]);
            w.letters.insert(w.letters.end(), part.letters.begin(), part.letters.end());
          }
          layer.push_back(std::move(w));
        }
        std::size_t k = r;
        while (k > 0 && e[k - 1] == shell) e[--k] = -shell;
        if (k == 0) break;
        ++e[k - 1];
      }
    } else {
      // Reduced words of length == shell over the peripheral letters.
      std::vector<int> alphabet;
      for (std::size_t g : p.generators) {
        alphabet.push_back(-static_cast<int>(g + 1));
        alphabet.push_back(static_cast<int>(g + 1));
      }
      std::sort(alphabet.begin(), alphabet.end());
      std::vector<Word> frontier{Word{}};
      for (long long len = 0; len < shell; ++len) {
        std::vector<Word> next;
        for (const Word& w : frontier)
          for (int a : alphabet) {
            if (!w.empty() && w.letters.back() == -a) continue;
            Word x = w;
            x.letters.push_back(a);
            next.push_back(std::move(x));
          }
        frontier = std::move(next);
        if (frontier.size() > 4 * count + 16) break;
      }
      layer = std::move(frontier);
    }
    for (Word& w : layer) {
      if (out.size() >= count) break;
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::string GroupPresentation::element_key(const Word& w) const {
  if (free_model_) {
    std::string key;
    for (int l : reduce(w).letters) key += std::to_string(l) + ',';
    return key;
  }
  return matrix_key(evaluate(w));
}

std::string GroupPresentation::matrix_key(const Matrix& m) const {
  if (m.is_exact_integer()) {
    // Integer matrices up to sign; unimodular ones are already canonical.
    Matrix n = m;
    for (double x : m.data()) {
      if (x != 0.0) {
        if (x < 0.0) n *= -1.0;
        break;
      }
    }
    std::string key = "z";
    for (double x : n.data()) key += std::to_string(static_cast<long long>(x)) + ',';
    return key;
  }
  const Matrix n = projective_normalize(m);
  const double s = n.max_abs();
  std::string key = "r";
  char buf[32];
  for (double x : n.data()) {
    std::snprintf(buf, sizeof buf, "%.9e,", std::round(x / s * 1e9) / 1e9 + 0.0);
    key += buf;
  }
  return key;
}

}  // namespace flagcert
