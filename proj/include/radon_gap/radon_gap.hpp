#pragma once

#include "radon_gap/bounds.hpp"
#include "radon_gap/experiments.hpp"
#include "radon_gap/geometry.hpp"
#include "radon_gap/hermite.hpp"
#include "radon_gap/kernel.hpp"
#include "radon_gap/quadrature.hpp"
#include "radon_gap/radon.hpp"
