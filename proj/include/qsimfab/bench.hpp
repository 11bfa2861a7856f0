// Copyright 2026 The qsimfab Authors
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

#include "qsimfab/bench/config.hpp"
#include "qsimfab/bench/fidelity.hpp"
#include "qsimfab/bench/harness.hpp"
#include "qsimfab/bench/output.hpp"
#include "qsimfab/bench/report.hpp"
