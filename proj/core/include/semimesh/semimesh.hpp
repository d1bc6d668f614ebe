// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "semimesh/camera.hpp"
#include "semimesh/errors.hpp"
#include "semimesh/eval.hpp"
#include "semimesh/fixtures.hpp"
#include "semimesh/grid.hpp"
#include "semimesh/image.hpp"
#include "semimesh/io.hpp"
#include "semimesh/losses.hpp"
#include "semimesh/mesh.hpp"
#include "semimesh/meshex.hpp"
#include "semimesh/point_index.hpp"
#include "semimesh/refine.hpp"
#include "semimesh/softras.hpp"
#include "semimesh/volren.hpp"
#include "semimesh/zbuffer.hpp"
