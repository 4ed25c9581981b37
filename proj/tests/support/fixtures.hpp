#pragma once

// Small hand-built systems shared by the unit tests.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "flagcert/automaton.hpp"
#include "flagcert/linalg.hpp"
#include "flagcert/presentation.hpp"

namespace fixtures {

using namespace flagcert;

inline Matrix rotation(double a) { return Matrix::from_rows({{std::cos(a), -std::sin(a)}, {std::sin(a), std::cos(a)}}); }

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t d, double lo = -10, double hi = 10) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = u(rng);
  return m;
}

inline Matrix random_invertible(std::mt19937_64& rng, std::size_t d) {
  for (;;) {
    Matrix m = random_matrix(rng, d, -2, 2);
    if (std::abs(determinant(m)) > 0.2) return m;
  }
}

struct System {
  GroupPresentation pres;
  GammaGraph graph;
  CompatibleSystem system;
};

/// g = diag(3, 1/3), h its conjugate by the rotation through pi/4; each of
/// the four letters owns the FS arc of radius r about its attracting point.
inline System schottky(double r = 0.3, double eps = 0.01, bool repelling = false) {
  GroupPresentation pres(2);
  pres.set_free_model(true);
  const Matrix g = Matrix::from_rows({{3.0, 0.0}, {0.0, 1.0 / 3.0}});
  const Matrix rot = rotation(std::numbers::pi / 4);
  pres.add_generator("g", g);
  pres.add_generator("h", rot * g * inverse(rot));

  const std::vector<std::string> ids{"g", "G", "h", "H"};
  const std::vector<std::string> words{"g", "g^-1", "h", "h^-1"};
  // Attracting angles of g, g^-1, h, h^-1.
  std::vector<double> angle{0.0, std::numbers::pi / 2, std::numbers::pi / 4, 3 * std::numbers::pi / 4};
  if (repelling) std::swap(angle[0], angle[1]), std::swap(angle[2], angle[3]);

  std::vector<GraphVertex> vertices;
  std::vector<ProperDomain> domains;
  for (std::size_t i = 0; i < 4; ++i) {
    vertices.push_back({ids[i], SingletonLabel{pres.parse(words[i])}});
    domains.push_back(ProperDomain::fs_ball(ProjPoint{std::cos(angle[i]), std::sin(angle[i])}, r));
  }
  std::vector<GraphEdge> edges;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      if (b != (a ^ 1)) edges.push_back({a, b});
  GammaGraph graph(pres, vertices, edges, eps);
  return {pres, graph, CompatibleSystem(std::move(domains))};
}

/// One vertex labeled diag(s, 1/s) with a self-loop.
inline System single_loop(double s = 4.0, bool repelling = false, double r = 0.3) {
  GroupPresentation pres(2);
  pres.set_free_model(true);
  pres.add_generator("a", Matrix::from_rows({{s, 0.0}, {0.0, 1.0 / s}}));
  std::vector<GraphVertex> vertices{{"a", SingletonLabel{pres.parse("a")}}};
  std::vector<ProperDomain> domains{
      ProperDomain::fs_ball(repelling ? ProjPoint{0.0, 1.0} : ProjPoint{1.0, 0.0}, r)};
  GammaGraph graph(pres, vertices, {{0, 0}}, 0.01);
  return {pres, graph, CompatibleSystem(std::move(domains))};
}

/// Same for an arbitrary 2x2 matrix centered at the given angle.
inline System loop_of(const Matrix& m, double center_angle, double r = 0.3) {
  GroupPresentation pres(2);
  pres.set_free_model(true);
  pres.add_generator("a", m);
  std::vector<GraphVertex> vertices{{"a", SingletonLabel{pres.parse("a")}}};
  std::vector<ProperDomain> domains{
      ProperDomain::fs_ball(ProjPoint{std::cos(center_angle), std::sin(center_angle)}, r)};
  GammaGraph graph(pres, vertices, {{0, 0}}, 0.01);
  return {pres, graph, CompatibleSystem(std::move(domains))};
}

}  // namespace fixtures
