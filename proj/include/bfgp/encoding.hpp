#pragma once

// Bit-vector view of the program space. For n lines and |A| grounded actions,
// a program is action bits ((n-1)*|A|), then transition bits ((n-1)*(n-2)),
// then proposition bits ((n-1)*4). The fixed end line is not encoded.

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "bfgp/error.hpp"
#include "bfgp/program.hpp"

namespace bfgp {

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i, bool v = true) {
    auto mask = std::uint64_t{1} << (i % 64);
    if (v) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }
  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if (test(i)) s[i] = '1';
    }
    return s;
  }

  static BitVector from_string(std::string_view s) {
    BitVector b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') {
        b.set(i);
      } else if (s[i] != '0') {
        throw Error(ErrorCode::malformed_encoding, "bit string must contain only 0 and 1");
      }
    }
    return b;
  }

  bool operator==(const BitVector&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

constexpr std::size_t encoding_length(std::size_t n, std::size_t num_actions) noexcept {
  return n < 2 ? 0 : (n - 1) * (num_actions + (n - 2) + 4);
}

struct EncodingLayout {
  std::size_t n = 0;
  std::size_t num_actions = 0;

  std::size_t action_bit(std::size_t line, std::size_t a) const { return line * num_actions + a; }
  std::size_t transition_base() const { return (n - 1) * num_actions; }
  // Slot of target t among the n-2 legal targets of `line`.
  std::size_t transition_bit(std::size_t line, std::size_t target) const {
    std::size_t slot = target < line ? target : target - 2;
    return transition_base() + line * (n - 2) + slot;
  }
  std::size_t proposition_base() const { return transition_base() + (n - 1) * (n - 2); }
  std::size_t proposition_bit(std::size_t line, Feature f) const {
    return proposition_base() + line * 4 + static_cast<std::size_t>(f);
  }
};

inline BitVector encode(const PlanningProgram& prog, std::size_t num_actions) {
  const auto n = prog.size();
  BitVector bits(encoding_length(n, num_actions));
  EncodingLayout layout{n, num_actions};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto& w = prog[i];
    switch (w.kind) {
      case ProgramLine::Kind::action: bits.set(layout.action_bit(i, w.action)); break;
      case ProgramLine::Kind::jump:
        bits.set(layout.transition_bit(i, w.target));
        bits.set(layout.proposition_bit(i, w.feature));
        break;
      case ProgramLine::Kind::undefined: break;
      case ProgramLine::Kind::end:
        throw Error(ErrorCode::malformed_program, "end is only allowed on the last line");
    }
  }
  return bits;
}

inline PlanningProgram decode(const BitVector& bits, std::size_t num_actions, std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_size, "decoding needs n >= 2");
  if (bits.size() != encoding_length(n, num_actions)) {
    throw Error(ErrorCode::length_mismatch, "bit length does not match (n-1)(|A|+(n-2)+4)");
  }
  EncodingLayout layout{n, num_actions};
  auto prog = PlanningProgram::empty(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t nact = 0, ntr = 0, nprop = 0;
    std::size_t act = 0, tgt = 0, prop = 0;
    for (std::size_t a = 0; a < num_actions; ++a) {
      if (bits.test(layout.action_bit(i, a))) {
        ++nact;
        act = a;
      }
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (!legal_target(i, t, n)) continue;
      if (bits.test(layout.transition_bit(i, t))) {
        ++ntr;
        tgt = t;
      }
    }
    for (std::size_t f = 0; f < 4; ++f) {
      if (bits.test(layout.proposition_bit(i, static_cast<Feature>(f)))) {
        ++nprop;
        prop = f;
      }
    }
    if (nact == 0 && ntr == 0 && nprop == 0) continue;
    if (nact == 1 && ntr == 0 && nprop == 0) {
      prog[i] = ProgramLine::act(static_cast<ActionId>(act));
    } else if (nact == 0 && ntr == 1 && nprop == 1) {
      prog[i] = ProgramLine::go(tgt, static_cast<Feature>(prop));
    } else {
      throw Error(ErrorCode::malformed_encoding, "line " + std::to_string(i) + " violates mutual exclusion");
    }
  }
  return prog;
}

inline std::size_t hamming(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::length_mismatch, "hamming distance of different lengths");
  std::size_t d = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) {
    d += static_cast<std::size_t>(std::popcount(a.words()[w] ^ b.words()[w]));
  }
  return d;
}

}  // namespace bfgp
