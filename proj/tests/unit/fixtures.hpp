#pragma once

#include "qdmol/basis.hpp"
#include "qdmol/error.hpp"
#include "qdmol/grid.hpp"
#include "qdmol/model.hpp"

namespace fixture {

// Default qubit on a coarse grid, solved once per test binary.
inline const qdmol::QubitBasis& coarse_basis() {
  static const qdmol::QubitBasis b = [] {
    const auto g = qdmol::default_qubit();
    return qdmol::build_basis(g, qdmol::grid_for(g, {28, 28, 40}), {}, 1e-6);
  }();
  return b;
}

// Operating point used by the gate tests: computed dipoles with a
// 24.81 meV splitting.
inline qdmol::QubitParams operating_point() {
  return {24.81, -13.470178583174501, 0.14519075425202654, 10.981745094427845};
}

}  // namespace fixture

#define CHECK_QDMOL_ERROR(expr, expected_code)                 \
  do {                                                         \
    bool thrown_ = false;                                      \
    try {                                                      \
      (void)(expr);                                            \
    } catch (const qdmol::Error& e_) {                         \
      thrown_ = true;                                          \
      CHECK_MESSAGE(e_.code() == (expected_code), e_.what());  \
    }                                                          \
    CHECK_MESSAGE(thrown_, "expected qdmol::Error from " #expr); \
  } while (0)
