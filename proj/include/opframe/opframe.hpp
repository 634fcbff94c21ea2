#ifndef OPFRAME_OPFRAME_HPP
#define OPFRAME_OPFRAME_HPP

#include "opframe/algebra.hpp"
#include "opframe/duals.hpp"
#include "opframe/errors.hpp"
#include "opframe/family.hpp"
#include "opframe/frames.hpp"
#include "opframe/hilbert_module.hpp"
#include "opframe/perturbation.hpp"
#include "opframe/quadrature.hpp"
#include "opframe/reconstruction.hpp"

#endif // OPFRAME_OPFRAME_HPP
