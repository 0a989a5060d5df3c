#pragma once

#include "checkpoint.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "galerkin.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "random_field.hpp"
#include "spectral.hpp"
#include "stepper.hpp"
