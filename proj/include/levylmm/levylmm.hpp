#ifndef LEVYLMM_LEVYLMM_HPP
#define LEVYLMM_LEVYLMM_HPP

#include "config.hpp"
#include "drift.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "levy_models.hpp"
#include "loglevy.hpp"
#include "market.hpp"
#include "paths.hpp"
#include "piecewise.hpp"
#include "pricing.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "subordination.hpp"

#endif // LEVYLMM_LEVYLMM_HPP
