#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pocketrl::cube {

// Exact 2x2x2 (pocket cube) group engine: states, quarter-turn moves,
// canonicalization over the 24 whole-cube rotations, perfect ranking of the
// 3,674,160 canonical states, and the one-hot observation encoding.
//
// Sticker layout. Faces are ordered [U, D, F, B, L, R]; face f owns sticker
// indices [4f, 4f+4). Within a face, stickers are row-major as seen when
// looking straight at the face from outside the cube, row 0 on top, column 0
// on the left, with these view orientations (axes: x->R, y->U, z->F):
//
//   face  normal  view "up"        face  normal  view "up"
//   U     +y      -z (toward B)    B     -z      +y
//   D     -y      +z (toward F)    L     -x      +y
//   F     +z      +y               R     +x      +y
//
// This is the usual unfolded-cross convention: U sits above F, D below F,
// and L F R B read left to right around the equator.

enum class Color : std::uint8_t { CU = 0, CD, CF, CB, CL, CR };

// Quarter turns, clockwise as seen from outside the turned face; Xp = X'.
enum class Move : std::uint8_t {
  U = 0, Up, D, Dp, F, Fp, B, Bp, L, Lp, R, Rp
};

inline constexpr int kNumMoves = 12;
inline constexpr int kNumRotations = 24;
inline constexpr int kNumStickers = 24;
inline constexpr int kNumColors = 6;
inline constexpr int kObservationSize = kNumStickers * kNumColors;  // 144

// Number of canonical states: 7! * 3^6.
inline constexpr std::uint32_t kStateCount = 3'674'160;

// Face a move turns (0..5 in U,D,F,B,L,R order).
constexpr int move_face(Move m) { return static_cast<int>(m) / 2; }

struct CubeState {
  std::array<Color, kNumStickers> stickers;
  bool operator==(const CubeState&) const = default;
};

struct CubeStateHash {
  std::size_t operator()(const CubeState& s) const noexcept;
};

// Index into the canonical state space, in [0, kStateCount).
struct CanonicalIndex {
  std::uint32_t value = 0;
  bool operator==(const CanonicalIndex&) const = default;
};

// Per-sticker one-hot encoding, 24 blocks of 6, in sticker-index order.
using Observation = std::array<double, kObservationSize>;

CubeState solved();
CubeState apply_move(const CubeState& s, Move m);
Move inverse(Move m);

// True iff every face is monochromatic. All 24 whole-cube orientations of
// the solved cube count as solved.
bool is_solved(const CubeState& s);

// Whole-cube rotations, indexed 0..23 with 0 = identity.
CubeState apply_rotation(const CubeState& s, int rotation);
int inverse_rotation(int rotation);
// Move m', with apply_rotation(r, apply_move(s, m)) ==
// apply_move(apply_rotation(r, s), rotate_move(r, m)) for every state.
Move rotate_move(int rotation, Move m);

struct CanonicalResult {
  CubeState state;
  int rotation;  // canonicalize(s) == apply_rotation(rotation, s)
};

// Unique whole-cube rotation that puts the cubie carrying colors
// {CD, CL, CB} into the DLB slot in its reference orientation.
CanonicalResult canonical_form(const CubeState& s);
CubeState canonicalize(const CubeState& s);

// Perfect hash of canonical states: Lehmer rank of the 7 free cubies'
// permutation * 729 + base-3 code of the first 6 free orientations (the 7th
// is forced by the mod-3 twist constraint). rank requires a canonical state.
CanonicalIndex rank(const CubeState& s);
CubeState unrank(CanonicalIndex index);  // throws std::out_of_range

Observation encode(const CubeState& s);

struct SnapResult {
  CubeState state;
  bool valid;  // false when the per-color sticker counts are violated
};

// Per-sticker argmax over each 6-block, ties to the lowest color ordinal.
// Throws std::invalid_argument unless logits.size() == 144.
SnapResult snap(std::span<const double> logits);

struct ScrambleResult {
  CubeState state;
  std::vector<Move> moves;
};

// `depth` uniformly random moves from solved, never turning the same face
// twice in a row.
ScrambleResult scramble(int depth, std::mt19937_64& rng);

// 24-byte color-ordinal serialization.
std::array<std::uint8_t, kNumStickers> to_bytes(const CubeState& s);
// Validates color counts, cubie structure, and the twist constraint;
// throws std::invalid_argument on anything unreachable.
CubeState from_bytes(std::span<const std::uint8_t> bytes);

}  // namespace pocketrl::cube
