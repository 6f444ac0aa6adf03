#ifndef TRAJREC_TRAJREC_HPP_
#define TRAJREC_TRAJREC_HPP_

#include "trajrec/assignment.hpp"
#include "trajrec/baseline.hpp"
#include "trajrec/enhanced.hpp"
#include "trajrec/error.hpp"
#include "trajrec/evaluation.hpp"
#include "trajrec/geo.hpp"
#include "trajrec/ingest.hpp"
#include "trajrec/io.hpp"
#include "trajrec/step_costs.hpp"
#include "trajrec/synth.hpp"
#include "trajrec/trajectory.hpp"

#endif  // TRAJREC_TRAJREC_HPP_
