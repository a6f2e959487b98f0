#pragma once

// Capacity of faster-than-Nyquist MIMO signaling: pulse folding, Gram
// operators, waterfilling in the time and frequency domains, and a
// brute-force optimizer for certification.

#include "ftn/capacity_freq.hpp"
#include "ftn/capacity_time.hpp"
#include "ftn/channel.hpp"
#include "ftn/errors.hpp"
#include "ftn/experiment.hpp"
#include "ftn/gram.hpp"
#include "ftn/linalg.hpp"
#include "ftn/oracle.hpp"
#include "ftn/pulse.hpp"
#include "ftn/rng.hpp"
#include "ftn/waterfill.hpp"
