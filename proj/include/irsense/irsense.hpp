// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "irsense/config.hpp"
#include "irsense/estimators.hpp"
#include "irsense/flops.hpp"
#include "irsense/hosvd.hpp"
#include "irsense/montecarlo.hpp"
#include "irsense/signal.hpp"
#include "irsense/steering.hpp"
#include "irsense/system.hpp"
#include "irsense/tensor.hpp"
#include "irsense/tensor_io.hpp"
#include "irsense/types.hpp"
