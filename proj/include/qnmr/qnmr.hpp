// Copyright 2026 The qnmr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNMR_QNMR_HPP
#define QNMR_QNMR_HPP

#include "qnmr/circuit.hpp"
#include "qnmr/core.hpp"
#include "qnmr/correlation.hpp"
#include "qnmr/density_matrix.hpp"
#include "qnmr/exact_reference.hpp"
#include "qnmr/lindblad.hpp"
#include "qnmr/molecule_io.hpp"
#include "qnmr/noise_budget.hpp"
#include "qnmr/noise_model.hpp"
#include "qnmr/noisy_simulator.hpp"
#include "qnmr/pauli.hpp"
#include "qnmr/runner.hpp"
#include "qnmr/spectrum.hpp"
#include "qnmr/spin_system.hpp"

#endif  // QNMR_QNMR_HPP
