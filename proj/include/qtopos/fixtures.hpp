// Copyright 2026 The qtopos developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qtopos/contexts.hpp"

namespace qtopos::fixtures {

// A reproducible poset recipe: ambient dimension, labeled observables and
// seed contexts, plus the build options.
struct Fixture {
  std::string name;
  int dim = 0;
  std::vector<contexts::Observable> observables;
  std::vector<contexts::SeedContext> seeds;
  contexts::BuildOptions options;
};

// Qubit with observable sigma_z and a seed context generated by sigma_x:
// 3 contexts, flat collapses the x context to the trivial one.
Fixture fixture_a();
// Dimension 5 with one degenerate diagonal observable and three diagonal
// seed contexts: 6 contexts forming a chain with one side branch; one
// context has 5 minimal projections.
Fixture fixture_b();
// Qutrit chain: full diagonal observable above a coarse seed context,
// 3 contexts in a chain with flat collapsing the middle stage.
Fixture fixture_c();
// One observable, no seeds: a single nontrivial context over the bottom.
Fixture trivial_fixture();
// Deterministic pseudo-random fixture: dim 2-4, two conjugated-diagonal
// observables and one seed context, at most 12 contexts.
Fixture random_fixture(uint64_t seed);

contexts::ContextPoset build_fixture(const Fixture& f);

}  // namespace qtopos::fixtures
