#pragma once

#include "guderley/barriers.hpp"
#include "guderley/critical.hpp"
#include "guderley/errors.hpp"
#include "guderley/io.hpp"
#include "guderley/model.hpp"
#include "guderley/profile.hpp"
#include "guderley/series.hpp"
#include "guderley/shooting.hpp"
#include "guderley/trajectory.hpp"
