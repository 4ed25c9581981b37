#pragma once

// Automaton synthesis for groups acting on RP^1 by expansion dynamics:
// parabolic vertices from cofinite peripheral cosets, conical vertices
// from expanding words, edges by the intersection rule.

#include <string>
#include <vector>

#include "flagcert/automaton.hpp"

namespace flagcert {

/// Closed arc of RP^1 in angle coordinates: [lo, lo + width] mod pi, where
/// the angle a stands for the point (cos a, sin a).
struct Arc {
  double lo = 0.0;
  double width = 0.0;

  double center() const noexcept { return lo + 0.5 * width; }
};

double wrap_angle(double a);
double angle_of(std::span<const double> v);
Arc arc_image(const Matrix& m, const Arc& a);
Arc widen(const Arc& a, double by);
bool arc_contains(const Arc& outer, const Arc& inner, double margin = 0.0);
bool arcs_meet(const Arc& a, const Arc& b);
ProperDomain arc_domain(const Arc& a, std::uint64_t seed = 0);

struct SynthesisParams {
  double epsilon = 0.005;
  /// Slack between the expanded cover and the expanded domain.
  double delta = 0.005;
  /// Half-width of the covering arcs V_a at conical vertices.
  double cover_radius = 0.02;
  /// Half-width of U_a at conical vertices.
  double domain_radius = 0.04;
  /// FS radius of U_q about each cusp, in the frame of its peripheral.
  double parabolic_radius = 0.1;
  /// Cusps g p with g of word length at most this get parabolic vertices.
  std::size_t cusp_depth = 2;
  /// Word length bound R for expanding elements.
  std::size_t search_radius = 8;
  std::size_t truncation = 16;
  double margin = 1e-6;
  /// Arcs known to contain the limit set; only these are covered. Empty
  /// means all of RP^1, as for lattices.
  std::vector<Arc> boundary;
};

struct SynthesizedVertex {
  std::string id;
  bool parabolic = false;
  /// Center angle z_a (the cusp for parabolic vertices).
  double point = 0.0;
  Arc cover;
  Arc domain;
  /// Expanding element, or the coset representative for parabolic vertices.
  Word word;
  /// Smallest |n| of the cofinite family g P^n.
  long long n0 = 0;
};

struct SynthesisResult {
  GammaGraph graph;
  CompatibleSystem system;
  std::vector<SynthesizedVertex> vertices;
  /// The sets V_a.
  std::vector<ProperDomain> cover;
  /// The boundary model is RP^1 itself, so W_a coincides with U_a.
  std::vector<ProperDomain> boundary_sets;
  std::size_t words_searched = 0;
};

/// Throws SynthesisFailed naming the first unsatisfiable clause and the
/// boundary point at which it failed.
SynthesisResult synthesize_rp1(const GroupPresentation& pres, const SynthesisParams& params = {});

}  // namespace flagcert
