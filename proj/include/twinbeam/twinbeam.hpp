#ifndef TWINBEAM_TWINBEAM_HPP_
#define TWINBEAM_TWINBEAM_HPP_

#include "twinbeam/core.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/fockspace.hpp"
#include "twinbeam/gaussian.hpp"
#include "twinbeam/multimode.hpp"
#include "twinbeam/params.hpp"
#include "twinbeam/random.hpp"

#endif // TWINBEAM_TWINBEAM_HPP_
