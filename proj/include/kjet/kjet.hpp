#pragma once

#include "kjet/circle.hpp"
#include "kjet/disc.hpp"
#include "kjet/domain.hpp"
#include "kjet/errors.hpp"
#include "kjet/extension.hpp"
#include "kjet/jets.hpp"
#include "kjet/json_io.hpp"
#include "kjet/kobayashi.hpp"
#include "kjet/stationarity.hpp"
