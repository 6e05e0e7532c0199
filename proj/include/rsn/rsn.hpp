#pragma once

#include "audit.hpp"
#include "common.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "field.hpp"
#include "landscape.hpp"
#include "model.hpp"
#include "table.hpp"
