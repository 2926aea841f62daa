#pragma once

#include "lossgame/asymptotics.hpp"
#include "lossgame/dynamics.hpp"
#include "lossgame/erlang.hpp"
#include "lossgame/errors.hpp"
#include "lossgame/mc_validation.hpp"
#include "lossgame/model.hpp"
#include "lossgame/partitions.hpp"
#include "lossgame/stability.hpp"
#include "lossgame/wardrop.hpp"
