// SPDX-License-Identifier: Apache-2.0
//
// qmimo: quantized massive-MIMO uplink rate analysis and simulation
// Copyright (C) 2026 The qmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef QMIMO_QMIMO_HPP
#define QMIMO_QMIMO_HPP

#include "qmimo/channel.hpp"
#include "qmimo/experiments.hpp"
#include "qmimo/experiments_io.hpp"
#include "qmimo/quantizer.hpp"
#include "qmimo/rate_analysis.hpp"
#include "qmimo/rng.hpp"
#include "qmimo/validation.hpp"

#endif
