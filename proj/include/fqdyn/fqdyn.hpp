// Copyright 2026 The fqdyn Authors
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

#include "fqdyn/clifford.hpp"
#include "fqdyn/combinatorics.hpp"
#include "fqdyn/costmodel.hpp"
#include "fqdyn/errors.hpp"
#include "fqdyn/grid.hpp"
#include "fqdyn/hamiltonian.hpp"
#include "fqdyn/linalg.hpp"
#include "fqdyn/meanfield.hpp"
#include "fqdyn/random.hpp"
#include "fqdyn/shadows.hpp"
#include "fqdyn/state.hpp"
#include "fqdyn/state_io.hpp"
#include "fqdyn/stateprep.hpp"
