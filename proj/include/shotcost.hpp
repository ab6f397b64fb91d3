// Copyright 2026 The shotcost Authors
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


#pragma once

#include "shotcost/allocation.hpp"
#include "shotcost/ansatz.hpp"
#include "shotcost/common.hpp"
#include "shotcost/estimator.hpp"
#include "shotcost/evolution.hpp"
#include "shotcost/pauli.hpp"
#include "shotcost/propagation.hpp"
#include "shotcost/rng.hpp"
#include "shotcost/shot_model.hpp"
#include "shotcost/statevector.hpp"
