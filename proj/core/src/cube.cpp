#include "pocketrl/cube.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pocketrl::cube {
namespace {

using Perm = std::array<std::uint8_t, kNumStickers>;

// Move tables are data, derived from the 3D sticker model described in the
// header; the group-law and state-count tests validate them. All arrays are
// "source" permutations: out[j] = in[perm[j]].
constexpr Perm kCwU = {2, 0, 3, 1, 4, 5, 6, 7, 20, 21, 10, 11,
                       16, 17, 14, 15, 8, 9, 18, 19, 12, 13, 22, 23};
constexpr Perm kCwD = {0, 1, 2, 3, 6, 4, 7, 5, 8, 9, 18, 19,
                       12, 13, 22, 23, 16, 17, 14, 15, 20, 21, 10, 11};
constexpr Perm kCwF = {0, 1, 19, 17, 22, 20, 6, 7, 10, 8, 11, 9,
                       12, 13, 14, 15, 16, 4, 18, 5, 2, 21, 3, 23};
constexpr Perm kCwB = {21, 23, 2, 3, 4, 5, 16, 18, 8, 9, 10, 11,
                       14, 12, 15, 13, 1, 17, 0, 19, 20, 7, 22, 6};
constexpr Perm kCwL = {15, 1, 13, 3, 8, 5, 10, 7, 0, 9, 2, 11,
                       12, 6, 14, 4, 18, 16, 19, 17, 20, 21, 22, 23};
constexpr Perm kCwR = {0, 9, 2, 11, 4, 14, 6, 12, 8, 5, 10, 7,
                       3, 13, 1, 15, 16, 17, 18, 19, 22, 20, 23, 21};

// Whole-cube clockwise rotations about +x (as an R turn) and +y (as a U turn).
constexpr Perm kRotX = {8, 9, 10, 11, 15, 14, 13, 12, 4, 5, 6, 7,
                        3, 2, 1, 0, 17, 19, 16, 18, 22, 20, 23, 21};
constexpr Perm kRotY = {2, 0, 3, 1, 5, 7, 4, 6, 20, 21, 22, 23,
                        16, 17, 18, 19, 8, 9, 10, 11, 12, 13, 14, 15};

// Corner slots: 3 sticker indices each, U/D facet first, then clockwise as
// seen from outside the corner. Slot order: DBL DLF ULB UFL DRB DFR UBR URF.
constexpr std::array<std::array<std::uint8_t, 3>, 8> kSlotStickers = {{
    {6, 15, 18}, {4, 19, 10}, {0, 16, 13}, {2, 8, 17},
    {7, 23, 14}, {5, 11, 22}, {1, 12, 21}, {3, 20, 9}}};
constexpr int kDlbSlot = 0;

constexpr Perm kIdentity = [] {
  Perm p{};
  for (int i = 0; i < kNumStickers; ++i) p[i] = static_cast<std::uint8_t>(i);
  return p;
}();

Perm invert(const Perm& p) {
  Perm inv{};
  for (int j = 0; j < kNumStickers; ++j) inv[p[j]] = static_cast<std::uint8_t>(j);
  return inv;
}

// Applying `before` first, then `after`.
Perm compose(const Perm& after, const Perm& before) {
  Perm out{};
  for (int j = 0; j < kNumStickers; ++j) out[j] = before[after[j]];
  return out;
}

struct Tables {
  std::array<Perm, kNumMoves> moves;
  std::array<Perm, kNumRotations> rots;
  std::array<int, kNumRotations> rot_inv;
  // conj[r][m] = m' with rot_r(move_m(s)) == move_m'(rot_r(s)).
  std::array<std::array<Move, kNumMoves>, kNumRotations> conj;
  // (slot*3 + ori) of the DLB-colored cubie -> canonicalizing rotation.
  std::array<int, 24> canon_rot;
  // Reference color triple of each cubie (colors of its home slot, solved).
  std::array<std::array<Color, 3>, 8> ref_colors;
  // c0*36 + c1*6 + c2 -> (cubie << 2) | ori, or -1 when not a valid triple.
  std::array<std::int16_t, 216> triple_lookup;
  std::array<int, 8> free_slots;   // the 7 non-DLB slots, plus padding
  std::array<int, 8> cubie_to_free;

  Tables() {
    const Perm cw[6] = {kCwU, kCwD, kCwF, kCwB, kCwL, kCwR};
    for (int f = 0; f < 6; ++f) {
      moves[2 * f] = cw[f];
      moves[2 * f + 1] = invert(cw[f]);
    }

    // Closure of {rot about x, rot about y}: all 24 rotations, identity first.
    std::vector<Perm> found{kIdentity};
    for (std::size_t head = 0; head < found.size(); ++head) {
      for (const Perm& g : {kRotX, kRotY}) {
        Perm next = compose(found[head], g);
        if (std::find(found.begin(), found.end(), next) == found.end())
          found.push_back(next);
      }
    }
    if (found.size() != kNumRotations)
      throw std::logic_error("rotation closure size != 24");
    std::copy(found.begin(), found.end(), rots.begin());

    for (int r = 0; r < kNumRotations; ++r) {
      Perm inv = invert(rots[r]);
      rot_inv[r] = static_cast<int>(
          std::find(rots.begin(), rots.end(), inv) - rots.begin());
    }

    for (int r = 0; r < kNumRotations; ++r) {
      for (int m = 0; m < kNumMoves; ++m) {
        // Solve "move m then rotation r" == "rotation r then move m'" over
        // the 12 candidates.
        const Perm lhs = compose(rots[r], moves[m]);
        int match = -1;
        for (int c = 0; c < kNumMoves; ++c) {
          if (compose(moves[c], rots[r]) == lhs) {
            match = c;
            break;
          }
        }
        if (match < 0) throw std::logic_error("move conjugation not closed");
        conj[r][m] = static_cast<Move>(match);
      }
    }

    CubeState home = solved_state();
    for (int c = 0; c < 8; ++c)
      for (int j = 0; j < 3; ++j)
        ref_colors[c][j] = home.stickers[kSlotStickers[c][j]];

    triple_lookup.fill(-1);
    for (int c = 0; c < 8; ++c) {
      for (int ori = 0; ori < 3; ++ori) {
        int code = 0;
        for (int j = 0; j < 3; ++j)
          code = code * 6 + static_cast<int>(ref_colors[c][(j + ori) % 3]);
        triple_lookup[code] = static_cast<std::int16_t>((c << 2) | ori);
      }
    }

    // For each rotation r, where r(solved) puts the DLB cubie; canonicalizing
    // from there takes r^-1.
    canon_rot.fill(-1);
    for (int r = 0; r < kNumRotations; ++r) {
      CubeState s = permute(home, rots[r]);
      for (int k = 0; k < 8; ++k) {
        auto [c, ori] = slot_contents(*this, s, k);
        if (c == kDlbSlot) {
          canon_rot[k * 3 + ori] = rot_inv[r];
          break;
        }
      }
    }
    for (int v : canon_rot)
      if (v < 0) throw std::logic_error("canonicalization table incomplete");

    int fi = 0;
    for (int k = 0; k < 8; ++k)
      if (k != kDlbSlot) free_slots[fi++] = k;
    free_slots[7] = -1;
    cubie_to_free.fill(-1);
    fi = 0;
    for (int c = 0; c < 8; ++c)
      if (c != kDlbSlot) cubie_to_free[c] = fi++;
  }

  static CubeState solved_state() {
    CubeState s{};
    for (int i = 0; i < kNumStickers; ++i)
      s.stickers[i] = static_cast<Color>(i / 4);
    return s;
  }

  static CubeState permute(const CubeState& s, const Perm& p) {
    CubeState out{};
    for (int j = 0; j < kNumStickers; ++j) out.stickers[j] = s.stickers[p[j]];
    return out;
  }

  // (cubie, ori) occupying slot k; ori o means facet j shows ref[(j+o)%3].
  static std::pair<int, int> slot_contents(const Tables& t, const CubeState& s,
                                           int k) {
    int code = 0;
    for (int j = 0; j < 3; ++j)
      code = code * 6 + static_cast<int>(s.stickers[kSlotStickers[k][j]]);
    std::int16_t v = t.triple_lookup[code];
    if (v < 0)
      throw std::invalid_argument("cube state has no valid cubie in slot " +
                                  std::to_string(k));
    return {v >> 2, v & 3};
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

constexpr std::array<std::uint32_t, 7> kFactorial = {1, 1, 2, 6, 24, 120, 720};

}  // namespace

std::size_t CubeStateHash::operator()(const CubeState& s) const noexcept {
  // FNV-1a over the sticker bytes.
  std::size_t h = 1469598103934665603ull;
  for (Color c : s.stickers) {
    h ^= static_cast<std::size_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

CubeState solved() { return Tables::solved_state(); }

CubeState apply_move(const CubeState& s, Move m) {
  return Tables::permute(s, tables().moves[static_cast<int>(m)]);
}

Move inverse(Move m) {
  return static_cast<Move>(static_cast<int>(m) ^ 1);
}

bool is_solved(const CubeState& s) {
  for (int f = 0; f < 6; ++f) {
    const Color c = s.stickers[4 * f];
    for (int i = 1; i < 4; ++i)
      if (s.stickers[4 * f + i] != c) return false;
  }
  return true;
}

CubeState apply_rotation(const CubeState& s, int rotation) {
  return Tables::permute(s, tables().rots[rotation]);
}

int inverse_rotation(int rotation) { return tables().rot_inv[rotation]; }

Move rotate_move(int rotation, Move m) {
  return tables().conj[rotation][static_cast<int>(m)];
}

CanonicalResult canonical_form(const CubeState& s) {
  const Tables& t = tables();
  for (int k = 0; k < 8; ++k) {
    int code = 0;
    for (int j = 0; j < 3; ++j)
      code = code * 6 + static_cast<int>(s.stickers[kSlotStickers[k][j]]);
    std::int16_t v = t.triple_lookup[code];
    if (v < 0 || (v >> 2) != kDlbSlot) continue;
    int rot = t.canon_rot[k * 3 + (v & 3)];
    return {Tables::permute(s, t.rots[rot]), rot};
  }
  throw std::invalid_argument("cube state has no DLB-colored cubie");
}

CubeState canonicalize(const CubeState& s) { return canonical_form(s).state; }

CanonicalIndex rank(const CubeState& s) {
  const Tables& t = tables();
  std::array<int, 7> perm{};
  std::array<int, 7> ori{};
  for (int i = 0; i < 7; ++i) {
    auto [c, o] = Tables::slot_contents(t, s, t.free_slots[i]);
    if (c == kDlbSlot)
      throw std::invalid_argument("rank requires a canonical state");
    perm[i] = t.cubie_to_free[c];
    ori[i] = o;
  }
  std::uint32_t lehmer = 0;
  for (int i = 0; i < 7; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < 7; ++j)
      if (perm[j] < perm[i]) ++smaller;
    lehmer += static_cast<std::uint32_t>(smaller) * kFactorial[6 - i];
  }
  std::uint32_t twist = 0;
  for (int i = 0; i < 6; ++i) twist = twist * 3 + static_cast<std::uint32_t>(ori[i]);
  return CanonicalIndex{lehmer * 729 + twist};
}

CubeState unrank(CanonicalIndex index) {
  if (index.value >= kStateCount)
    throw std::out_of_range("canonical index out of range: " +
                            std::to_string(index.value));
  const Tables& t = tables();
  std::uint32_t lehmer = index.value / 729;
  std::uint32_t twist = index.value % 729;

  std::array<int, 7> perm{};
  std::array<bool, 7> used{};
  for (int i = 0; i < 7; ++i) {
    std::uint32_t digit = lehmer / kFactorial[6 - i];
    lehmer %= kFactorial[6 - i];
    int count = 0;
    for (int v = 0; v < 7; ++v) {
      if (used[v]) continue;
      if (count == static_cast<int>(digit)) {
        perm[i] = v;
        used[v] = true;
        break;
      }
      ++count;
    }
  }

  std::array<int, 7> ori{};
  int twist_sum = 0;
  for (int i = 5; i >= 0; --i) {
    ori[i] = static_cast<int>(twist % 3);
    twist /= 3;
    twist_sum += ori[i];
  }
  ori[6] = (3 - twist_sum % 3) % 3;

  CubeState s{};
  for (int j = 0; j < 3; ++j)
    s.stickers[kSlotStickers[kDlbSlot][j]] = t.ref_colors[kDlbSlot][j];
  for (int i = 0; i < 7; ++i) {
    const int slot = t.free_slots[i];
    const int cubie = [&] {
      int fi = 0;
      for (int c = 0; c < 8; ++c) {
        if (c == kDlbSlot) continue;
        if (fi == perm[i]) return c;
        ++fi;
      }
      return -1;
    }();
    for (int j = 0; j < 3; ++j)
      s.stickers[kSlotStickers[slot][j]] = t.ref_colors[cubie][(j + ori[i]) % 3];
  }
  return s;
}

Observation encode(const CubeState& s) {
  Observation obs{};
  for (int i = 0; i < kNumStickers; ++i)
    obs[i * kNumColors + static_cast<int>(s.stickers[i])] = 1.0;
  return obs;
}

SnapResult snap(std::span<const double> logits) {
  if (logits.size() != kObservationSize)
    throw std::invalid_argument("snap expects 144 logits, got " +
                                std::to_string(logits.size()));
  SnapResult out{};
  std::array<int, kNumColors> counts{};
  for (int i = 0; i < kNumStickers; ++i) {
    int best = 0;
    for (int c = 1; c < kNumColors; ++c)
      if (logits[i * kNumColors + c] > logits[i * kNumColors + best]) best = c;
    out.state.stickers[i] = static_cast<Color>(best);
    ++counts[best];
  }
  out.valid =
      std::all_of(counts.begin(), counts.end(), [](int n) { return n == 4; });
  return out;
}

ScrambleResult scramble(int depth, std::mt19937_64& rng) {
  ScrambleResult out{solved(), {}};
  out.moves.reserve(static_cast<std::size_t>(std::max(depth, 0)));
  int prev_face = -1;
  for (int i = 0; i < depth; ++i) {
    int pick;
    if (prev_face < 0) {
      pick = static_cast<int>(std::uniform_int_distribution<int>(0, 11)(rng));
    } else {
      // 10 legal moves: skip both twists of the previous face.
      int r = std::uniform_int_distribution<int>(0, 9)(rng);
      pick = r >= 2 * prev_face ? r + 2 : r;
    }
    const Move m = static_cast<Move>(pick);
    out.state = apply_move(out.state, m);
    out.moves.push_back(m);
    prev_face = move_face(m);
  }
  return out;
}

std::array<std::uint8_t, kNumStickers> to_bytes(const CubeState& s) {
  std::array<std::uint8_t, kNumStickers> out{};
  for (int i = 0; i < kNumStickers; ++i)
    out[i] = static_cast<std::uint8_t>(s.stickers[i]);
  return out;
}

CubeState from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kNumStickers)
    throw std::invalid_argument("cube state needs 24 bytes");
  CubeState s{};
  std::array<int, kNumColors> counts{};
  for (int i = 0; i < kNumStickers; ++i) {
    if (bytes[i] >= kNumColors)
      throw std::invalid_argument("sticker byte out of range");
    s.stickers[i] = static_cast<Color>(bytes[i]);
    ++counts[bytes[i]];
  }
  for (int n : counts)
    if (n != 4) throw std::invalid_argument("color counts violated");

  // Structural reachability: 8 distinct cubies, twist sum 0 mod 3.
  const Tables& t = tables();
  std::array<bool, 8> seen{};
  int twist_sum = 0;
  for (int k = 0; k < 8; ++k) {
    auto [c, o] = Tables::slot_contents(t, s, k);
    if (seen[c]) throw std::invalid_argument("duplicate cubie");
    seen[c] = true;
    twist_sum += o;
  }
  if (twist_sum % 3 != 0)
    throw std::invalid_argument("corner twist constraint violated");
  return s;
}

}  // namespace pocketrl::cube
