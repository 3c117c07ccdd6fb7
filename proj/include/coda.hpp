// Copyright 2026 The Coda Authors
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

// Everything in one include.

#include "coda/ast.hpp"
#include "coda/bench.hpp"
#include "coda/campaign.hpp"
#include "coda/dataset.hpp"
#include "coda/embedding.hpp"
#include "coda/error.hpp"
#include "coda/est.hpp"
#include "coda/http.hpp"
#include "coda/http_embedding.hpp"
#include "coda/identifiers.hpp"
#include "coda/interpreter.hpp"
#include "coda/irt.hpp"
#include "coda/lexer.hpp"
#include "coda/model.hpp"
#include "coda/model_remote.hpp"
#include "coda/parser.hpp"
#include "coda/printer.hpp"
#include "coda/random.hpp"
#include "coda/reference.hpp"
#include "coda/report.hpp"
#include "coda/rules.hpp"
#include "coda/walk.hpp"
