// Copyright 2026 The CMSF Authors.
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

#include "cmsf/backend.hpp"
#include "cmsf/bundle.hpp"
#include "cmsf/commands.hpp"
#include "cmsf/dataset.hpp"
#include "cmsf/embedding.hpp"
#include "cmsf/error.hpp"
#include "cmsf/evaluation.hpp"
#include "cmsf/fixtures.hpp"
#include "cmsf/geometry.hpp"
#include "cmsf/mask_io.hpp"
#include "cmsf/mock_backend.hpp"
#include "cmsf/pipelines.hpp"
#include "cmsf/render.hpp"
