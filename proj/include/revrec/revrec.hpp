// Copyright 2026 The revrec Authors.
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

#ifndef REVREC_REVREC_HPP_
#define REVREC_REVREC_HPP_

#include "revrec/coldstart.hpp"
#include "revrec/corpus.hpp"
#include "revrec/errors.hpp"
#include "revrec/evaluation.hpp"
#include "revrec/lda.hpp"
#include "revrec/metrics.hpp"
#include "revrec/persistence.hpp"
#include "revrec/pipeline.hpp"
#include "revrec/porter_stemmer.hpp"
#include "revrec/profiles.hpp"
#include "revrec/random.hpp"
#include "revrec/recommender.hpp"
#include "revrec/text.hpp"

#endif  // REVREC_REVREC_HPP_
