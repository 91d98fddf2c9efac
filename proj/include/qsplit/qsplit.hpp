// Copyright 2026 The qsplit Authors
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

#ifndef QSPLIT_QSPLIT_HPP_
#define QSPLIT_QSPLIT_HPP_

#include "qsplit/entropy_splitting.hpp"
#include "qsplit/model_finite.hpp"
#include "qsplit/model_tfim.hpp"
#include "qsplit/operator_algebra.hpp"
#include "qsplit/quadrature.hpp"
#include "qsplit/quench_perturbation.hpp"
#include "qsplit/random_protocols.hpp"
#include "qsplit/trajectory_statistics.hpp"

#endif  // QSPLIT_QSPLIT_HPP_
