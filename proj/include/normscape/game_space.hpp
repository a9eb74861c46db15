#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <utility>

namespace normscape {

struct UtilityModel;

enum class Action : std::size_t { C = 0, D = 1 };

// A symmetric 2x2 game in the normalized UV plane: row payoffs [[1, U], [V, 0]].
// U plays the role of the sucker payoff S, V the temptation payoff T.
struct Game {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Game&, const Game&) = default;
};

struct GameBounds {
  double u_min = -1.0;
  double u_max = 2.0;
  double v_min = -1.0;
  double v_max = 2.0;

  bool contains(const Game& g) const noexcept {
    return g.u >= u_min && g.u <= u_max && g.v >= v_min && g.v <= v_max;
  }
  Game clamp(const Game& g) const noexcept;
  Game centroid() const noexcept { return {0.5 * (u_min + u_max), 0.5 * (v_min + v_max)}; }
};

// Payoffs indexed by (own action, opponent action).
struct PayoffMatrix {
  std::array<std::array<double, 2>, 2> entries{};

  double operator()(Action own, Action opp) const noexcept {
    return entries[static_cast<std::size_t>(own)][static_cast<std::size_t>(opp)];
  }
  double& operator()(Action own, Action opp) noexcept {
    return entries[static_cast<std::size_t>(own)][static_cast<std::size_t>(opp)];
  }

  double mean() const noexcept;
  PayoffMatrix transposed() const noexcept;
  PayoffMatrix shifted(double delta) const noexcept;

  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;
};

enum class GameClass { PD, DL, SD, SH, C, AC, H, Unclassified };

struct ClassifyOptions {
  // Label the corner U > 1, V < 0 as Deadlock. The textbook DL ordering T > P > R > S
  // cannot hold once R = 1 and P = 0, so without this switch DL is never produced.
  bool dl_corner = true;
};

// Maps canonical payoffs (R, S, T, P) to the UV plane. Throws DegeneratePayoffs if R == P.
Game from_canonical(double reward, double sucker, double temptation, double punishment);

// Row player's matrix and the column player's matrix (its transpose), optionally mean-normalized.
std::pair<PayoffMatrix, PayoffMatrix> payoff_matrices(const Game& g, bool normalize);

// Row matrix with normalization blended in: strength 0 is raw, 1 is mean-subtracted.
PayoffMatrix blended_matrix(const Game& g, double normalization_strength);

// Negative Pearson correlation between row payoffs (1, U, V, 0) and column payoffs (1, V, U, 0).
double zero_sumness(const Game& g);

GameClass classify(const Game& g, const ClassifyOptions& opts = {});

// Subjective payoffs re-expressed in canonical UV form. Throws DegenerateUtility if u(1) == u(0).
Game perceived_game(const Game& g, const UtilityModel& u);

std::string_view to_string(GameClass c) noexcept;
GameClass game_class_from_string(std::string_view s);

// Points lying on the common-interest diagonal U = V (within tolerance) have Z = -1.
bool on_coordination_diagonal(const Game& g, double tolerance);

// Writes U,V,Z,class_label for a resolution x resolution grid over the bounds.
void write_grid_csv(std::ostream& os, const GameBounds& bounds, std::size_t resolution,
                    const ClassifyOptions& opts = {});

}  // namespace normscape
